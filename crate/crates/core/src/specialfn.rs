//! Sine integral, adaptive Simpson quadrature and forward differences.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Upper end of the Maclaurin branch of [`si`].
pub const SERIES_MAX: f64 = 16.0;
/// Lower end of the asymptotic branch of [`si`].
pub const ASYMPTOTIC_MIN: f64 = 32.0;

/// `sin x / x`, continuous at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Sine integral `Si(x) = ∫₀ˣ sin s / s ds`, odd in `x`.
///
/// Maclaurin series up to [`SERIES_MAX`], the complex continued fraction
/// for `E₁(ix)` on the middle range, and the asymptotic expansion from
/// [`ASYMPTOTIC_MIN`] on. Absolute error stays below `1e-10` everywhere.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x <= SERIES_MAX {
        si_series(x)
    } else if x < ASYMPTOTIC_MIN {
        si_continued_fraction(x)
    } else {
        si_asymptotic(x)
    }
}

/// `Σ (−1)ᵏ x^{2k+1} / ((2k+1)·(2k+1)!)`.
pub fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x; // (−1)^k x^{2k+1} / (2k+1)!
    let mut sum = x;
    for k in 1..200 {
        let m = (2 * k) as f64;
        term *= -x2 / (m * (m + 1.0));
        let add = term / (m + 1.0);
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `π/2 − f(x) cos x − g(x) sin x` with the auxiliary series
/// `f ~ Σ (−1)ᵏ (2k)!/x^{2k+1}` and `g ~ Σ (−1)ᵏ (2k+1)!/x^{2k+2}`, each
/// truncated before its smallest term starts growing again.
pub fn si_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let truncated = |first: f64, ratio: &dyn Fn(usize) -> f64| {
        let mut term = first;
        let mut sum = 0.0;
        for k in 1..500 {
            let next = term * ratio(k);
            if next.abs() >= term.abs() {
                break;
            }
            sum += term;
            term = next;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum + term
    };
    // (2k)!/(2k−2)! = 2k(2k−1); (2k+1)!/(2k−1)! = (2k+1)2k
    let f = truncated(inv, &|k| -((2 * k) as f64) * ((2 * k - 1) as f64) * inv2);
    let g = truncated(inv2, &|k| -((2 * k + 1) as f64) * ((2 * k) as f64) * inv2);
    FRAC_PI_2 - f * x.cos() - g * x.sin()
}

/// Modified Lentz evaluation of the continued fraction for `E₁(ix)`,
/// accurate to rounding for `x ≳ 2`.
fn si_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let h = Complex64::new(x.cos(), -x.sin()) * h;
    FRAC_PI_2 + h.im
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: usize = 50;

/// Adaptive Simpson quadrature with Richardson acceptance.
///
/// A panel is accepted once `|S₂ − S₁| ≤ 15·tol_panel` and contributes
/// `S₂ + (S₂ − S₁)/15`; the tolerance is halved on each bisection.
pub fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = adaptive_simpson(f, b, a, tol)?;
        return Ok(QuadratureResult {
            value: -r.value,
            ..r
        });
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut acc = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 3,
    };
    step(&f, a, b, fa, fm, fb, whole, tol, 0, &mut acc)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    acc: &mut QuadratureResult,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    acc.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        acc.value += left + right + delta / 15.0;
        acc.error_estimate += delta.abs() / 15.0;
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure(format!(
            "recursion depth {MAX_DEPTH} exhausted on [{a}, {b}]"
        )));
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, acc)?;
    step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, acc)
}

/// Forward difference `(f(t+h) − f(t))/h` of a vector-valued function.
pub fn finite_diff(f: impl Fn(f64) -> Vec<f64>, t: f64, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let lo = f(t);
    let hi = f(t + h);
    if lo.len() != hi.len() {
        return Err(Error::InvalidArgument(
            "function changed output length".into(),
        ));
    }
    Ok(hi.iter().zip(&lo).map(|(p, q)| (p - q) / h).collect())
}
