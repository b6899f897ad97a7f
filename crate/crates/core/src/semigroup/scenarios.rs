//! The worked scenarios: shift-and-double on sequences, multiplication by
//! `xᵗ` on `C[0,1]`, translations, the Jordan flow, and the two coupled
//! translation semigroups built on `C₀(ℝ₊) × ℝⁿ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::{GrowthClass, Lift, SemigroupScenario, TimeDomain, X0Distance};
use crate::error::{Error, Result};
use crate::space::{AmbientSpace, Evaluator, Subspace, Vector};
use crate::specialfn::{si, sinc};

/// Half-line truncation used by every translation scenario.
pub const HALF_LINE_MAX: f64 = 400.0;
pub const HALF_LINE_STEP: f64 = 0.02;
/// Grid step of the `C[0,1]` scenario.
pub const UNIT_INTERVAL_STEP: f64 = 1e-4;

/// `f ↦ f(· + t)` in pointwise form.
pub fn translation_lift() -> Lift {
    Arc::new(|f: &Evaluator, t: f64| {
        let f = f.clone();
        Arc::new(move |x: f64| f(x + t)) as Evaluator
    })
}

/// Translates a grid-kind vector. Reads beyond the grid through the
/// evaluator when present, otherwise holds the limit (or last sample).
fn translate(v: &Vector, t: f64) -> Result<Vector> {
    if t == 0.0 {
        return Ok(v.clone());
    }
    let space = v.space().clone();
    match v.evaluator() {
        Some(f) => Vector::from_evaluator(
            space,
            translation_lift()(f, t),
            v.limit_at_inf(),
            Vec::new(),
        ),
        None => {
            let grid = *space.grid().ok_or(Error::SpaceMismatch)?;
            let samples = grid.points().map(|x| v.eval(x + t)).collect();
            Vector::from_parts(space, samples, v.limit_at_inf(), Vec::new())
        }
    }
}

fn translation_evolution(
    space: AmbientSpace,
    name: &str,
    growth: GrowthClass,
) -> SemigroupScenario {
    SemigroupScenario::new(
        name,
        TimeDomain::Continuous,
        space,
        growth,
        Arc::new(|v: &Vector, t: f64| translate(v, t)),
    )
    .with_lift(translation_lift())
}

// ---------------------------------------------------------------------------
// Sequences

/// `T(x₁, x₂, …) = (2x₂, 2x₃, …)` on ℓ² truncated to `trunc_len` coordinates.
///
/// Each step discards one coordinate of tail information, so orbits are
/// faithful for `n ≤ trunc_len/2`.
pub fn shift_double_discrete(trunc_len: usize) -> Result<SemigroupScenario> {
    if trunc_len < 8 {
        return Err(Error::InvalidArgument(format!("trunc_len {trunc_len} < 8")));
    }
    let space = AmbientSpace::seq_l2(trunc_len)?;
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        let n = t as usize;
        let scale = 2f64.powi(n.min(i32::MAX as usize) as i32);
        let src = v.samples();
        let samples = (0..src.len())
            .map(|j| src.get(j + n).map_or(0.0, |x| scale * x))
            .collect();
        Vector::from_samples(sp.clone(), samples)
    });
    Ok(SemigroupScenario::new(
        "ex1-shift-double",
        TimeDomain::Discrete,
        space,
        GrowthClass::UnboundedExponential,
        evolve,
    )
    .with_x0("contains every finite sequence; dense but not closed", None)
    .with_horizon((trunc_len / 2) as f64))
}

/// Unit coordinate `e_k` (1-based) of a sequence space.
pub fn unit_coordinate(space: &AmbientSpace, k: usize) -> Result<Vector> {
    let n = space.sample_len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "coordinate {k} outside 1..={n}"
        )));
    }
    let mut c = vec![0.0; n];
    c[k - 1] = 1.0;
    Vector::from_samples(space.clone(), c)
}

/// `x_j = 2^{−j}` (1-based), the orbit of constant norm.
pub fn geometric_sequence(space: &AmbientSpace) -> Result<Vector> {
    let c = (1..=space.sample_len())
        .map(|j| 2f64.powi(-(j as i32)))
        .collect();
    Vector::from_samples(space.clone(), c)
}

// ---------------------------------------------------------------------------
// C[0,1]

/// `(φ_t f)(x) = xᵗ f(x)` on `C[0,1]` with the default grid.
pub fn multiplication_semigroup() -> Result<SemigroupScenario> {
    multiplication_semigroup_on(UNIT_INTERVAL_STEP)
}

pub fn multiplication_semigroup_on(step: f64) -> Result<SemigroupScenario> {
    let space = AmbientSpace::grid_sup(0.0, 1.0, step)?;
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        if t == 0.0 {
            return Ok(v.clone());
        }
        match v.evaluator() {
            Some(f) => Vector::from_evaluator(sp.clone(), power_lift()(f, t), None, Vec::new()),
            None => {
                let grid = *sp.grid().expect("grid space");
                let samples = grid
                    .points()
                    .zip(v.samples())
                    .map(|(x, f)| x.powf(t) * f)
                    .collect();
                Vector::from_samples(sp.clone(), samples)
            }
        }
    });
    Ok(SemigroupScenario::new(
        "ex2-multiplication",
        TimeDomain::Continuous,
        space,
        GrowthClass::Bounded,
        evolve,
    )
    .with_x0("{f ∈ C[0,1] : f(1) = 0}", Some(X0Distance::RightEndpoint))
    .with_lift(power_lift()))
}

fn power_lift() -> Lift {
    Arc::new(|f: &Evaluator, t: f64| {
        let f = f.clone();
        Arc::new(move |x: f64| x.powf(t) * f(x)) as Evaluator
    })
}

// ---------------------------------------------------------------------------
// Translations

/// `(φ_t f)(x) = f(x + t)` on functions with a limit at infinity.
/// Constants are invariant.
pub fn translation_limit_semigroup() -> Result<SemigroupScenario> {
    translation_limit_semigroup_on(HALF_LINE_MAX, HALF_LINE_STEP)
}

pub fn translation_limit_semigroup_on(x_max: f64, step: f64) -> Result<SemigroupScenario> {
    let space = AmbientSpace::grid_sup_with_limit(0.0, x_max, step)?;
    let constants = Subspace::new(vec![constant_with_limit(&space, 1.0)?])?;
    Ok(
        translation_evolution(space, "ex3-translation-limit", GrowthClass::Bounded)
            .with_x0(
                "functions tending to zero at infinity",
                Some(X0Distance::Limit),
            )
            .with_known_invariant(constants),
    )
}

/// Translation on `C₀(ℝ₊)` truncated to `[0, x_max]`.
pub fn translation_c0(x_max: f64, step: f64) -> Result<SemigroupScenario> {
    let space = AmbientSpace::grid_sup(0.0, x_max, step)?;
    Ok(
        translation_evolution(space, "translation-c0", GrowthClass::Bounded)
            .with_x0("the whole space", Some(X0Distance::Whole)),
    )
}

pub fn constant_with_limit(space: &AmbientSpace, c: f64) -> Result<Vector> {
    Vector::from_fn(space.clone(), move |_| c, Some(c), Vec::new())
}

/// `f(x) = 1 + sin(πx)/x`, continuous at 0 with `f(0) = 1 + π`.
pub fn example3_vector(space: &AmbientSpace) -> Result<Vector> {
    Vector::from_fn(
        space.clone(),
        |x| 1.0 + PI * sinc(PI * x),
        Some(1.0),
        Vec::new(),
    )
}

/// `f_k = φ_k f` in closed form: `1 + sin(π(x+k))/(x+k)`.
pub fn example3_orbit(space: &AmbientSpace, k: f64) -> Result<Vector> {
    Vector::from_fn(
        space.clone(),
        move |x| 1.0 + PI * sinc(PI * (x + k)),
        Some(1.0),
        Vec::new(),
    )
}

// ---------------------------------------------------------------------------
// Jordan flow on ℝ²

/// `φ_t(y, z) = (y + tz, z)` on sup-norm ℝ², with `X₀ = {0}`.
pub fn remark2_jordan() -> Result<SemigroupScenario> {
    let space = AmbientSpace::sup_coords(2)?;
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        let s = v.samples();
        let (y, z) = super::jordan_block_q(s[0], s[1], t);
        Vector::from_samples(sp.clone(), vec![y, z])
    });
    let fixed = Subspace::new(vec![Vector::from_samples(space.clone(), vec![1.0, 0.0])?])?;
    Ok(SemigroupScenario::new(
        "remark2-jordan",
        TimeDomain::Continuous,
        space,
        GrowthClass::Linear,
        evolve,
    )
    .with_x0("{0}", Some(X0Distance::Norm))
    .with_known_invariant(fixed)
    .with_law_tol(1e-12))
}

pub fn r2(y: f64, z: f64) -> Result<Vector> {
    Vector::from_samples(AmbientSpace::sup_coords(2)?, vec![y, z])
}

// ---------------------------------------------------------------------------
// Translation coupled to a Jordan block through g = sin x / x

/// Closed forms attached to the coupled semigroup on `C₀(ℝ₊) × ℝ²`.
pub mod example4 {
    use super::*;

    /// `g(x) = sin x / x`.
    pub fn g(x: f64) -> f64 {
        sinc(x)
    }

    /// `k(x) = π/2 − Si(x)`; `k′ = −g`.
    pub fn k(x: f64) -> f64 {
        FRAC_PI_2 - si(x)
    }

    /// `l(x) = x(π/2 − Si(x)) − cos x`; `l′ = k`.
    pub fn l(x: f64) -> f64 {
        x * k(x) - x.cos()
    }

    /// `Si(x + t) − Si(x)`.
    pub fn delta_si(x: f64, t: f64) -> f64 {
        si(x + t) - si(x)
    }

    /// `∫₀ᵗ s·g(x + s) ds = cos x − cos(x + t) − x(Si(x + t) − Si(x))`.
    pub fn weighted_integral(x: f64, t: f64) -> f64 {
        x.cos() - (x + t).cos() - x * delta_si(x, t)
    }

    /// `h^t_{a,b}(x) = ∫₀ᵗ g(x + s)(a − sb) ds`, the core of the element of
    /// `Y_t` with finite block `(a, b)`.
    pub fn h_ab(a: f64, b: f64, t: f64, x: f64) -> f64 {
        a * delta_si(x, t) - b * weighted_integral(x, t)
    }

    /// Coupling term of `φ_t(0, y, z)`:
    /// `∫₀ᵗ g(x + s)(y + (t − s)z) ds`.
    pub fn coupling(y: f64, z: f64, t: f64, x: f64) -> f64 {
        h_ab(y + t * z, z, t, x)
    }
}

/// The coupled semigroup with the default half-line grid.
pub fn example4_semigroup() -> Result<SemigroupScenario> {
    example4_semigroup_on(HALF_LINE_MAX, HALF_LINE_STEP)
}

/// `φ_t(f, y, z) = (f(x+t) + ∫₀ᵗ g(x+s)(y + (t−s)z) ds, y + tz, z)` with
/// `g = sin x / x`, evaluated through the sine integral.
pub fn example4_semigroup_on(x_max: f64, step: f64) -> Result<SemigroupScenario> {
    let core = AmbientSpace::grid_sup(0.0, x_max, step)?;
    let space = AmbientSpace::product_sum(core.clone(), 2)?;
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        if t == 0.0 {
            return Ok(v.clone());
        }
        let (y, z) = (v.fin_part()[0], v.fin_part()[1]);
        let shifted = translate(&v.core_part(), t)?;
        let core_vec = if y == 0.0 && z == 0.0 {
            shifted
        } else {
            let coupling = Vector::from_fn(
                shifted.space().clone(),
                move |x| example4::coupling(y, z, t, x),
                None,
                Vec::new(),
            )?;
            shifted.add(&coupling)?
        };
        let (y1, z1) = super::jordan_block_q(y, z, t);
        Vector::product(sp.clone(), core_vec, vec![y1, z1])
    });
    let y_inf = Subspace::new(vec![
        Vector::product(
            space.clone(),
            Vector::from_fn(core.clone(), example4::k, None, vec![])?,
            vec![1.0, 0.0],
        )?,
        Vector::product(
            space.clone(),
            Vector::from_fn(core, example4::l, None, vec![])?,
            vec![0.0, 1.0],
        )?,
    ])?;
    Ok(SemigroupScenario::new(
        "ex4-nonstabilizable",
        TimeDomain::Continuous,
        space,
        GrowthClass::Linear,
        evolve,
    )
    .with_x0("C₀(ℝ₊) × {0}", Some(X0Distance::FinPart))
    .with_known_invariant(y_inf))
}

/// `Y = 0 × ℝ²` in the coupled space.
pub fn finite_block_subspace(space: &AmbientSpace) -> Result<Subspace> {
    let zero = Vector::zeros(space.core().clone());
    let mut basis = Vec::new();
    for i in 0..space.fin_dim() {
        let mut fin = vec![0.0; space.fin_dim()];
        fin[i] = 1.0;
        basis.push(Vector::product(space.clone(), zero.clone(), fin)?);
    }
    Subspace::new(basis)
}

// ---------------------------------------------------------------------------
// Translation coupled to ℝ through g = 1/(x+1)

pub fn example5_semigroup() -> Result<SemigroupScenario> {
    example5_semigroup_on(HALF_LINE_MAX, HALF_LINE_STEP)
}

/// `φ_t(f, y) = (f(x+t) + y·ln((x+1+t)/(x+1)), y)`.
pub fn example5_semigroup_on(x_max: f64, step: f64) -> Result<SemigroupScenario> {
    let core = AmbientSpace::grid_sup(0.0, x_max, step)?;
    let space = AmbientSpace::product_sum(core, 1)?;
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        if t == 0.0 {
            return Ok(v.clone());
        }
        let y = v.fin_part()[0];
        let shifted = translate(&v.core_part(), t)?;
        let core_vec = if y == 0.0 {
            shifted
        } else {
            let coupling = Vector::from_fn(
                shifted.space().clone(),
                move |x| y * example5_log(x, t),
                None,
                Vec::new(),
            )?;
            shifted.add(&coupling)?
        };
        Vector::product(sp.clone(), core_vec, vec![y])
    });
    Ok(SemigroupScenario::new(
        "ex5-log-growth",
        TimeDomain::Continuous,
        space,
        GrowthClass::Slow,
        evolve,
    )
    .with_x0("C₀(ℝ₊) × {0}", Some(X0Distance::FinPart)))
}

/// `ln((x + 1 + t)/(x + 1)) = ∫₀ᵗ ds/(x + s + 1)`.
pub fn example5_log(x: f64, t: f64) -> f64 {
    (t / (x + 1.0)).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_of_one_gives_x() {
        let sem = multiplication_semigroup_on(0.01).unwrap();
        let one = Vector::from_fn(sem.space().clone(), |_| 1.0, None, vec![]).unwrap();
        let v = sem.apply(&one, 1.0).unwrap();
        let grid = *sem.space().grid().unwrap();
        for (x, s) in grid.points().zip(v.samples()) {
            assert_eq!(*s, x);
        }
        assert_eq!(sem.apply(&one, 0.0).unwrap().samples(), one.samples());
    }

    #[test]
    fn shift_annihilates_finite_sequences() {
        let sem = shift_double_discrete(16).unwrap();
        let e3 = unit_coordinate(sem.space(), 3).unwrap();
        assert!(sem
            .apply(&e3, 3.0)
            .unwrap()
            .samples()
            .iter()
            .all(|x| *x == 0.0));
        assert_eq!(sem.apply(&e3, 2.0).unwrap().samples()[0], 4.0);
    }

    #[test]
    fn jordan_scenario_matches_formula() {
        let sem = remark2_jordan().unwrap();
        let v = sem.apply(&r2(1.0, -0.1).unwrap(), 10.0).unwrap();
        assert!(v.samples()[0].abs() < 1e-15);
        assert_eq!(v.samples()[1], -0.1);
    }

    #[test]
    fn translation_preserves_limit_and_constants() {
        let sem = translation_limit_semigroup_on(20.0, 0.05).unwrap();
        let c = constant_with_limit(sem.space(), 2.5).unwrap();
        let ct = sem.apply(&c, 3.7).unwrap();
        assert_eq!(ct.samples(), c.samples());
        let f = example3_vector(sem.space()).unwrap();
        assert!((f.samples()[0] - (1.0 + PI)).abs() < 1e-15);
        assert_eq!(sem.apply(&f, 5.0).unwrap().limit_at_inf(), Some(1.0));
    }

    #[test]
    fn example4_zero_stays_zero_and_y_inf_is_fixed() {
        let sem = example4_semigroup_on(40.0, 0.1).unwrap();
        let zero = Vector::zeros(sem.space().clone());
        assert_eq!(sem.apply(&zero, 3.0).unwrap().norm(), 0.0);
        let y_inf = sem.known_invariant().unwrap();
        let kt = sem.apply(&y_inf.basis()[0], 2.5).unwrap();
        assert!(kt.sub(&y_inf.basis()[0]).unwrap().norm() < 1e-12);
        // φ_t(l, 0, 1) = (l, 0, 1) + t(k, 1, 0)
        let lt = sem.apply(&y_inf.basis()[1], 2.5).unwrap();
        let expect =
            Vector::lin_comb(&[(1.0, &y_inf.basis()[1]), (2.5, &y_inf.basis()[0])]).unwrap();
        assert!(lt.sub(&expect).unwrap().norm() < 1e-12);
    }

    #[test]
    fn weighted_integral_at_zero_is_cosine_difference() {
        for t in [0.5, 2.0, 20.0] {
            let d = example4::weighted_integral(0.0, t + 1.0) - example4::weighted_integral(0.0, t);
            assert!((d - (t.cos() - (t + 1.0).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn example5_core_at_origin_is_log() {
        let sem = example5_semigroup_on(50.0, 0.1).unwrap();
        let v = Vector::product(
            sem.space().clone(),
            Vector::zeros(sem.space().core().clone()),
            vec![1.0],
        )
        .unwrap();
        let vt = sem.apply(&v, 7.0).unwrap();
        assert!((vt.samples()[0] - 8f64.ln()).abs() < 1e-15);
        assert!((vt.norm() - (8f64.ln() + 1.0)).abs() < 1e-15);
    }
}
