//! Measurements on semigroup orbits: decay, the m-functional, angle
//! trajectories, Cauchy series of subspace increments, limit-subspace
//! estimates, coefficient bounds, growth profiles and invariance checks.
//!
//! Every "→ 0" statement is witnessed on a finite window only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{SemigroupScenario, TimeDomain};
use crate::space::{angle, Grid, Subspace, Vector};
use crate::specialfn::finite_diff;

/// Grid points used by [`m_functional`] before golden-section refinement.
pub const M_GRID_POINTS: usize = 2000;
/// Pass threshold of [`invariance_residual`].
pub const INVARIANCE_TOL: f64 = 1e-3;
pub const GENERATOR_TOL_CLOSED_FORM: f64 = 1e-8;
pub const GENERATOR_TOL_FINITE_DIFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    Decaying,
    NonDecaying,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub verdict: DecayVerdict,
    pub threshold: f64,
    /// `(T_max/2, T_max)`
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleTrajectory {
    pub t_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// `angles[i][j] = ∠(Y_{T_i}, Y_{T_i + s_j})`
    pub angles: Vec<Vec<f64>>,
    /// Row maxima of `angles`.
    pub sup_profile: Vec<f64>,
}

/// How consecutive members of an orbit are compared in [`cauchy_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesMetric {
    /// `∠(Y_{k+1}, Y_k)`
    Angle,
    /// `‖f_{k+1} − f_k‖` for the orbit of the single basis vector `f` of a
    /// one-dimensional `Y`.
    Increment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesLedger {
    pub k_max: usize,
    pub metric: SeriesMetric,
    /// `terms[k − 1]` compares the orbit at `k` and `k + 1`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

impl SeriesLedger {
    /// `Σ_{j ≤ k} terms_j`, with `partial_sum(0) = 0`.
    pub fn partial_sum(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.partial_sums[k - 1]
        }
    }

    /// `partial_sum(2K) − partial_sum(K)`.
    pub fn dyadic_block(&self, k: usize) -> f64 {
        self.partial_sum(2 * k) - self.partial_sum(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Trajectory,
    Generator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub kind: ReportKind,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
}

impl InvarianceReport {
    fn new(kind: ReportKind, entries: Vec<(String, f64, f64)>) -> Self {
        let passed = entries.iter().all(|(_, r, tol)| r <= tol);
        let mut residuals = BTreeMap::new();
        let mut tolerances = BTreeMap::new();
        for (name, r, tol) in entries {
            residuals.insert(name.clone(), r);
            tolerances.insert(name, tol);
        }
        Self {
            kind,
            residuals,
            tolerances,
            passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub t: f64,
    pub ratio: f64,
}

fn check_grid(ts: &[f64], what: &str) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} is empty")));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be strictly increasing"
        )));
    }
    Ok(())
}

/// `‖v_t‖` over `t_grid`, judged on the window `[T_max/2, T_max]`:
/// decaying iff the window maximum is at most `threshold`, non-decaying iff
/// the window minimum exceeds it.
pub fn orbit_decay(
    sem: &SemigroupScenario,
    v: &Vector,
    t_grid: &[f64],
    threshold: f64,
) -> Result<DecayCurve> {
    check_grid(t_grid, "t_grid")?;
    let norms = t_grid
        .iter()
        .map(|&t| Ok(sem.apply(v, t)?.norm()))
        .collect::<Result<Vec<_>>>()?;
    let t_max = *t_grid.last().expect("nonempty");
    let window = (t_max / 2.0, t_max);
    let in_window: Vec<f64> = t_grid
        .iter()
        .zip(&norms)
        .filter(|(t, _)| **t >= window.0)
        .map(|(_, n)| *n)
        .collect();
    let hi = in_window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = in_window.iter().copied().fold(f64::INFINITY, f64::min);
    let verdict = if hi <= threshold {
        DecayVerdict::Decaying
    } else if lo > threshold {
        DecayVerdict::NonDecaying
    } else {
        DecayVerdict::Inconclusive
    };
    Ok(DecayCurve {
        times: t_grid.to_vec(),
        norms,
        verdict,
        threshold,
        window,
    })
}

/// `m(v) = inf_{t ≤ T_max} ρ(v_t, X₀)` on [`M_GRID_POINTS`] grid points,
/// refined by golden-section search around the best one.
pub fn m_functional(sem: &SemigroupScenario, v: &Vector, t_max: f64) -> Result<f64> {
    m_functional_with(sem, v, t_max, M_GRID_POINTS)
}

pub fn m_functional_with(
    sem: &SemigroupScenario,
    v: &Vector,
    t_max: f64,
    points: usize,
) -> Result<f64> {
    let x0 = sem.x0_distance().ok_or_else(|| {
        Error::UnsupportedScenario(format!("{} has no closed-form distance to X₀", sem.name()))
    })?;
    if !(t_max >= 0.0 && t_max.is_finite()) || points < 2 {
        return Err(Error::InvalidArgument(
            "need t_max ≥ 0 and at least two grid points".into(),
        ));
    }
    let rho = |t: f64| -> Result<f64> { Ok(x0.distance(&sem.apply(v, t)?)) };

    let times: Vec<f64> = match sem.time_domain() {
        TimeDomain::Discrete => (0..=t_max.floor() as usize).map(|n| n as f64).collect(),
        TimeDomain::Continuous => (0..points)
            .map(|i| t_max * i as f64 / (points - 1) as f64)
            .collect(),
    };
    let values = times.iter().map(|&t| rho(t)).collect::<Result<Vec<_>>>()?;
    let (best_i, mut best) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, x)| if x < acc.1 { (i, x) } else { acc },
            );
    if sem.time_domain() == TimeDomain::Discrete || times.len() < 3 {
        return Ok(best);
    }

    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = times[best_i.saturating_sub(1)];
    let mut b = times[(best_i + 1).min(times.len() - 1)];
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (rho(c)?, rho(d)?);
    for _ in 0..80 {
        best = best.min(fc).min(fd);
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = rho(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = rho(d)?;
        }
        if b - a <= 1e-12 * (1.0 + b.abs()) {
            break;
        }
    }
    Ok(best.min(fc).min(fd))
}

fn evolved(sem: &SemigroupScenario, y: &Subspace, t: f64) -> Result<Subspace> {
    if y.space() != sem.space() {
        return Err(Error::SpaceMismatch);
    }
    sem.evolve_subspace(y, t)?.renormalized()
}

/// `∠(Y_T, Y_{T+s})` on the product grid, with `m` unit-sphere samples.
pub fn angle_trajectory(
    sem: &SemigroupScenario,
    y: &Subspace,
    t_grid: &[f64],
    s_grid: &[f64],
    m: usize,
) -> Result<AngleTrajectory> {
    check_grid(t_grid, "T grid")?;
    check_grid(s_grid, "s grid")?;
    let mut angles = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let yt = evolved(sem, y, t)?;
        let row = s_grid
            .iter()
            .map(|&s| angle(&yt, &evolved(sem, y, t + s)?, m))
            .collect::<Result<Vec<_>>>()?;
        angles.push(row);
    }
    let sup_profile = angles
        .iter()
        .map(|r| r.iter().copied().fold(0.0, f64::max))
        .collect();
    Ok(AngleTrajectory {
        t_grid: t_grid.to_vec(),
        s_grid: s_grid.to_vec(),
        angles,
        sup_profile,
    })
}

/// Terms and prefix sums of the series of consecutive orbit distances for
/// `k = 1, …, k_max`. Each orbit member is computed from `Y` directly.
pub fn cauchy_series(
    sem: &SemigroupScenario,
    y: &Subspace,
    k_max: usize,
    metric: SeriesMetric,
    m: usize,
) -> Result<SeriesLedger> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be positive".into()));
    }
    if y.space() != sem.space() {
        return Err(Error::SpaceMismatch);
    }
    let mut terms = Vec::with_capacity(k_max);
    match metric {
        SeriesMetric::Increment => {
            if y.dim() != 1 {
                return Err(Error::UnsupportedDimension {
                    dim: y.dim(),
                    max: 1,
                });
            }
            let f = &y.basis()[0];
            let mut prev = sem.apply(f, 1.0)?;
            for k in 1..=k_max {
                let next = sem.apply(f, (k + 1) as f64)?;
                terms.push(next.sub(&prev)?.norm());
                prev = next;
            }
        }
        SeriesMetric::Angle => {
            let mut prev = evolved(sem, y, 1.0)?;
            for k in 1..=k_max {
                let next = evolved(sem, y, (k + 1) as f64)?;
                terms.push(angle(&next, &prev, m)?);
                prev = next;
            }
        }
    }
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(SeriesLedger {
        k_max,
        metric,
        terms,
        partial_sums,
    })
}

/// `(Y_{T}, ∠(Y_T, Y_{T/2}))`; a small gap certifies stabilization on the
/// probed window.
pub fn estimate_limit_subspace(
    sem: &SemigroupScenario,
    y: &Subspace,
    t_probe: f64,
    m: usize,
) -> Result<(Subspace, f64)> {
    let late = evolved(sem, y, t_probe)?;
    let mid = evolved(sem, y, t_probe / 2.0)?;
    let gap = angle(&late, &mid, m)?;
    Ok((late, gap))
}

/// Unit-sphere coefficient vectors `β` of `Y` (`‖Σ βᵢ eⁱ‖ = 1`).
fn sphere_coefficients(y: &Subspace, m: usize) -> Result<Vec<Vec<f64>>> {
    let raw: Vec<Vec<f64>> = match y.dim() {
        1 => vec![vec![1.0]],
        2 => (0..m.max(1))
            .map(|j| {
                let th = std::f64::consts::PI * j as f64 / m.max(1) as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        dim => return Err(Error::UnsupportedDimension { dim, max: 2 }),
    };
    raw.into_iter()
        .map(|beta| {
            let n = y.combine(&beta)?.norm();
            if n == 0.0 {
                return Err(Error::DegenerateBasis(
                    "zero combination on the unit sphere".into(),
                ));
            }
            Ok(beta.iter().map(|b| b / n).collect())
        })
        .collect()
}

/// `min ‖y_t‖ / Σ|βᵢ|` over `t_grid` and unit vectors `y = Σ βᵢ eⁱ` of `Y`,
/// where `y_t = Σ βᵢ eⁱ_t`. A positive value witnesses the lower
/// coefficient bound on the window.
pub fn coefficient_bound_probe(
    sem: &SemigroupScenario,
    y: &Subspace,
    t_grid: &[f64],
    m: usize,
) -> Result<f64> {
    check_grid(t_grid, "t_grid")?;
    let betas = sphere_coefficients(y, m)?;
    let mut worst = f64::INFINITY;
    for &t in t_grid {
        let yt = sem.evolve_subspace(y, t)?;
        for beta in &betas {
            let l1: f64 = beta.iter().map(|b| b.abs()).sum();
            worst = worst.min(yt.combine(beta)?.norm() / l1);
        }
    }
    Ok(worst)
}

/// `max_probe ‖φ_t v‖ / ‖v‖` for each `t`, a lower envelope of `‖φ_t‖`.
pub fn growth_profile(
    sem: &SemigroupScenario,
    probes: &[Vector],
    t_grid: &[f64],
) -> Result<Vec<GrowthPoint>> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes".into()));
    }
    let norms: Vec<f64> = probes.iter().map(Vector::norm).collect();
    if norms.contains(&0.0) {
        return Err(Error::InvalidArgument("probes must be nonzero".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let mut ratio = 0.0_f64;
            for (p, n) in probes.iter().zip(&norms) {
                ratio = ratio.max(sem.apply(p, t)?.norm() / n);
            }
            Ok(GrowthPoint { t, ratio })
        })
        .collect()
}

/// How derivatives are obtained in [`generator_conditions_check`].
pub enum DerivativeMode<'a> {
    /// Symbolic derivatives `k′` and `l′` supplied by the caller.
    ClosedForm {
        dk: &'a dyn Fn(f64) -> f64,
        dl: &'a dyn Fn(f64) -> f64,
    },
    /// Forward differences of the translation orbit with step `h`.
    FiniteDiff { h: f64 },
}

/// Residuals `‖k′ + g‖_∞` and `‖l′ − k‖_∞` on `grid`, the conditions under
/// which `span{(k, 1, 0), (l, 0, 1)}` is invariant for the coupled
/// translation semigroup.
pub fn generator_conditions_check(
    g: &dyn Fn(f64) -> f64,
    k: &dyn Fn(f64) -> f64,
    l: &dyn Fn(f64) -> f64,
    grid: &Grid,
    mode: DerivativeMode<'_>,
) -> Result<InvarianceReport> {
    let xs: Vec<f64> = grid.points().collect();
    let (dk, dl, tol): (Vec<f64>, Vec<f64>, f64) = match mode {
        DerivativeMode::ClosedForm { dk, dl } => (
            xs.iter().map(|&x| dk(x)).collect(),
            xs.iter().map(|&x| dl(x)).collect(),
            GENERATOR_TOL_CLOSED_FORM,
        ),
        DerivativeMode::FiniteDiff { h } => {
            let xs = &xs;
            (
                finite_diff(|t| xs.iter().map(|&x| k(x + t)).collect(), 0.0, h)?,
                finite_diff(|t| xs.iter().map(|&x| l(x + t)).collect(), 0.0, h)?,
                GENERATOR_TOL_FINITE_DIFF,
            )
        }
    };
    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0_f64, |m, r| m.max(r.abs()));
    let r_k = sup(&mut xs.iter().zip(&dk).map(|(&x, d)| d + g(x)));
    let r_l = sup(&mut xs.iter().zip(&dl).map(|(&x, d)| d - k(x)));
    Ok(InvarianceReport::new(
        ReportKind::Generator,
        vec![
            ("k_prime_plus_g".into(), r_k, tol),
            ("l_prime_minus_k".into(), r_l, tol),
        ],
    ))
}

/// `max_t ∠(S, S_t)`; passes iff at most [`INVARIANCE_TOL`].
pub fn invariance_residual(
    sem: &SemigroupScenario,
    s: &Subspace,
    t_grid: &[f64],
    m: usize,
) -> Result<InvarianceReport> {
    check_grid(t_grid, "t_grid")?;
    let base = s.renormalized()?;
    let mut worst = 0.0_f64;
    let mut entries = Vec::new();
    for &t in t_grid {
        let a = angle(&base, &evolved(sem, s, t)?, m)?;
        worst = worst.max(a);
        entries.push((format!("angle_t={t}"), a, INVARIANCE_TOL));
    }
    entries.push(("max_angle".into(), worst, INVARIANCE_TOL));
    Ok(InvarianceReport::new(ReportKind::Trajectory, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::scenarios::{self, r2};

    #[test]
    fn m_functional_on_the_jordan_flow() {
        let sem = scenarios::remark2_jordan().unwrap();
        assert!((m_functional(&sem, &r2(1.0, 0.0).unwrap(), 1000.0).unwrap() - 1.0).abs() < 1e-12);
        let m = m_functional(&sem, &r2(1.0, -0.1).unwrap(), 100.0).unwrap();
        assert!((m - 0.1).abs() < 1e-6, "{m}");
        assert_eq!(
            m_functional(&sem, &r2(0.0, 0.0).unwrap(), 10.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn m_functional_needs_x0() {
        let sem = scenarios::shift_double_discrete(8).unwrap();
        let v = scenarios::unit_coordinate(sem.space(), 1).unwrap();
        assert!(matches!(
            m_functional(&sem, &v, 5.0),
            Err(Error::UnsupportedScenario(_))
        ));
    }

    #[test]
    fn decay_verdicts() {
        let sem = scenarios::shift_double_discrete(32).unwrap();
        let x = scenarios::geometric_sequence(sem.space()).unwrap();
        let ts: Vec<f64> = (0..=16).map(f64::from).collect();
        assert_eq!(
            orbit_decay(&sem, &x, &ts, 0.1).unwrap().verdict,
            DecayVerdict::NonDecaying
        );
        let e = scenarios::unit_coordinate(sem.space(), 4).unwrap();
        assert_eq!(
            orbit_decay(&sem, &e, &ts, 1e-12).unwrap().verdict,
            DecayVerdict::Decaying
        );
        assert!(orbit_decay(&sem, &e, &[], 1.0).is_err());
        assert!(orbit_decay(&sem, &e, &[2.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn ledger_sums_are_prefix_sums() {
        let sem = scenarios::multiplication_semigroup_on(1e-3).unwrap();
        let one = Vector::from_fn(sem.space().clone(), |_| 1.0, None, vec![]).unwrap();
        let y = Subspace::new(vec![one]).unwrap();
        let led = cauchy_series(&sem, &y, 20, SeriesMetric::Increment, 1).unwrap();
        let mut acc = 0.0;
        for (t, s) in led.terms.iter().zip(&led.partial_sums) {
            assert!(*t >= 0.0);
            acc += t;
            assert_eq!(acc, *s);
        }
        assert!((led.terms[0] - 0.25).abs() < 1e-6);
        assert_eq!(
            led.dyadic_block(5),
            led.partial_sums[9] - led.partial_sums[4]
        );
    }

    #[test]
    fn generator_check_detects_wrong_pairs() {
        let grid = Grid::new(0.0, 10.0, 0.01).unwrap();
        let zero = |_: f64| 0.0;
        let r = generator_conditions_check(
            &zero,
            &zero,
            &zero,
            &grid,
            DerivativeMode::ClosedForm {
                dk: &zero,
                dl: &zero,
            },
        )
        .unwrap();
        assert!(r.passed);
        assert!(r.residuals.values().all(|x| *x == 0.0));

        let k = scenarios::example4::k;
        let dk = |x: f64| -crate::specialfn::sinc(x);
        let r = generator_conditions_check(
            &|x: f64| x.sin(),
            &k,
            &zero,
            &grid,
            DerivativeMode::ClosedForm { dk: &dk, dl: &zero },
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.residuals["k_prime_plus_g"] > 0.5);
    }
}
