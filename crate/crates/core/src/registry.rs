//! Named scenario bundles: each entry builds its semigroup from run
//! parameters, runs its diagnostics and reports threshold checks.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    angle_trajectory, cauchy_series, coefficient_bound_probe, estimate_limit_subspace,
    generator_conditions_check, growth_profile, invariance_residual, m_functional, orbit_decay,
    AngleTrajectory, DecayCurve, DerivativeMode, GrowthPoint, InvarianceReport, SeriesLedger,
    SeriesMetric,
};
use crate::error::{Error, Result};
use crate::semigroup::scenarios::{self, example4};
use crate::semigroup::{duhamel_extension, GrowthClass, MatrixFlow, TriangularSpec};
use crate::space::{angle, deficiency_to_x0, AmbientSpace, Grid, Subspace, Vector};
use crate::specialfn::sinc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScenarioEntry {
    pub name: &'static str,
    pub anchor: &'static str,
}

pub const SCENARIOS: [ScenarioEntry; 7] = [
    ScenarioEntry {
        name: "ex1-shift-double",
        anchor: "Example 1: T(x1, x2, x3, ...) = (2x2, 2x3, 2x4, ...) on l2; X0 holds all finite sequences",
    },
    ScenarioEntry {
        name: "ex2-multiplication",
        anchor: "Example 2: (phi_t f)(x) = x^t f(x) on C[0,1]; ||f_{k+1} - f_k|| = (1/(k+1))(k/(k+1))^k",
    },
    ScenarioEntry {
        name: "ex3-translation-limit",
        anchor: "Example 3: translation of f(x) = 1 + sin(pi x)/x; stabilizable, yet the series diverges",
    },
    ScenarioEntry {
        name: "ex4-nonstabilizable",
        anchor: "Example 4: translation on C0(R+) coupled to the Jordan flow through g = sin x/x",
    },
    ScenarioEntry {
        name: "ex5-log-growth",
        anchor: "Example 5: translation coupled through g = 1/(x+1); ||phi_t|| ~ ln t = o(t)",
    },
    ScenarioEntry {
        name: "remark2-jordan",
        anchor: "Remark 2: phi_t(y, z) = (y + tz, z); m(1,0) = 1 and m(1,-e) = e",
    },
    ScenarioEntry {
        name: "duhamel-vs-closed-form",
        anchor: "Duhamel integral of alpha_s P Q_{t-s} versus the closed forms of Examples 4 and 5",
    },
];

pub fn names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Result<&'static ScenarioEntry> {
    SCENARIOS.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::UnsupportedScenario(format!(
            "unknown scenario '{name}'; registered: {}",
            names().join(", ")
        ))
    })
}

/// Optional overrides; unset fields take the scenario's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub s_max: Option<f64>,
    pub s_step: Option<f64>,
    pub grid_step: Option<f64>,
    /// Right end of the spatial grid; truncation length for sequences.
    pub domain_max: Option<f64>,
    pub k_max: Option<usize>,
    pub sphere_samples: Option<usize>,
}

/// Parameters after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
    pub s_max: f64,
    pub s_step: f64,
    pub grid_step: f64,
    pub domain_max: f64,
    pub k_max: usize,
    pub sphere_samples: usize,
}

impl Resolved {
    /// `t_min, t_min + t_step, …` up to `t_max` (inclusive within rounding).
    pub fn t_grid(&self) -> Vec<f64> {
        stepped(self.t_min, self.t_max, self.t_step)
    }

    /// `s_step, 2 s_step, …, s_max`.
    pub fn s_grid(&self) -> Vec<f64> {
        stepped(self.s_step, self.s_max, self.s_step)
    }
}

fn stepped(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor().max(0.0) as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

fn defaults(name: &str) -> Resolved {
    let base = Resolved {
        t_min: 0.0,
        t_max: 100.0,
        t_step: 5.0,
        s_max: 1.0,
        s_step: 0.25,
        grid_step: scenarios::HALF_LINE_STEP,
        domain_max: scenarios::HALF_LINE_MAX,
        k_max: 200,
        sphere_samples: crate::space::DEFAULT_SPHERE_SAMPLES,
    };
    match name {
        "ex1-shift-double" => Resolved {
            t_max: 32.0,
            t_step: 1.0,
            s_step: 1.0,
            grid_step: 1.0,
            domain_max: 64.0,
            k_max: 32,
            ..base
        },
        "ex2-multiplication" => Resolved {
            grid_step: scenarios::UNIT_INTERVAL_STEP,
            domain_max: 1.0,
            k_max: 1000,
            ..base
        },
        "ex3-translation-limit" => base,
        "ex4-nonstabilizable" => Resolved {
            t_min: 20.0,
            t_max: 60.0,
            t_step: 1.0,
            s_step: 1.0,
            k_max: 20,
            ..base
        },
        "ex5-log-growth" => Resolved {
            t_max: 1000.0,
            t_step: 50.0,
            s_step: 0.5,
            k_max: 100,
            ..base
        },
        "remark2-jordan" => Resolved {
            t_max: 1000.0,
            t_step: 50.0,
            s_step: 0.5,
            grid_step: 1.0,
            domain_max: 1.0,
            k_max: 100,
            ..base
        },
        _ => Resolved {
            t_max: 5.0,
            t_step: 0.5,
            ..base
        },
    }
}

pub fn resolve(name: &str, p: &RunParams) -> Result<Resolved> {
    lookup(name)?;
    let d = defaults(name);
    let r = Resolved {
        t_min: d.t_min.min(p.t_max.unwrap_or(d.t_max)),
        t_max: p.t_max.unwrap_or(d.t_max),
        t_step: p.t_step.unwrap_or(d.t_step),
        s_max: p.s_max.unwrap_or(d.s_max),
        s_step: p.s_step.unwrap_or(d.s_step),
        grid_step: p.grid_step.unwrap_or(d.grid_step),
        domain_max: p.domain_max.unwrap_or(d.domain_max),
        k_max: p.k_max.unwrap_or(d.k_max),
        sphere_samples: p.sphere_samples.unwrap_or(d.sphere_samples),
    };
    for (label, x) in [
        ("t_step", r.t_step),
        ("s_step", r.s_step),
        ("grid_step", r.grid_step),
        ("domain_max", r.domain_max),
        ("s_max", r.s_max),
    ] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{label} must be positive, got {x}"
            )));
        }
    }
    if !(r.t_max >= r.t_step) || !r.t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_max ({}) must be at least t_step ({})",
            r.t_max, r.t_step
        )));
    }
    if r.s_max < r.s_step {
        return Err(Error::InvalidArgument(
            "s_max must be at least s_step".into(),
        ));
    }
    if r.k_max == 0 || r.sphere_samples == 0 {
        return Err(Error::InvalidArgument(
            "k_max and sphere_samples must be positive".into(),
        ));
    }
    Ok(r)
}

/// One thresholded quantity of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=".into(),
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=".into(),
            threshold,
            passed: value >= threshold,
        }
    }
}

/// Everything a bundle run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub scenario: String,
    pub params: Resolved,
    pub decay: Option<DecayCurve>,
    pub angles: Option<AngleTrajectory>,
    pub series: Option<SeriesLedger>,
    pub growth: Vec<GrowthPoint>,
    /// Named scalar results (m-functional values, residuals, gaps).
    pub residuals: BTreeMap<String, f64>,
    pub reports: Vec<InvarianceReport>,
    pub checks: Vec<Check>,
}

impl Bundle {
    fn new(scenario: &str, params: Resolved) -> Self {
        Self {
            scenario: scenario.into(),
            params,
            decay: None,
            angles: None,
            series: None,
            growth: Vec::new(),
            residuals: BTreeMap::new(),
            reports: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn record(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.into(), value);
    }
}

/// Runs the diagnostic bundle of a registered scenario.
pub fn run_bundle(name: &str, params: &RunParams) -> Result<Bundle> {
    let r = resolve(name, params)?;
    let mut b = Bundle::new(name, r);
    match name {
        "ex1-shift-double" => ex1(&r, &mut b)?,
        "ex2-multiplication" => ex2(&r, &mut b)?,
        "ex3-translation-limit" => ex3(&r, &mut b)?,
        "ex4-nonstabilizable" => ex4(&r, &mut b)?,
        "ex5-log-growth" => ex5(&r, &mut b)?,
        "remark2-jordan" => remark2(&r, &mut b)?,
        "duhamel-vs-closed-form" => duhamel(&r, &mut b)?,
        _ => unreachable!("resolve rejects unknown names"),
    }
    Ok(b)
}

fn one_dim(v: Vector) -> Result<Subspace> {
    Subspace::new(vec![v])
}

fn ex1(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let len = r.domain_max.round() as usize;
    let sem = scenarios::shift_double_discrete(len)?;
    let horizon = (len / 2) as f64;
    let n_max = r.t_max.floor().min(horizon);
    let steps: Vec<f64> = (0..=n_max as usize).map(|n| n as f64).collect();
    let x = scenarios::geometric_sequence(sem.space())?;

    let decay = orbit_decay(&sem, &x, &steps, 0.5 * x.norm())?;
    let drift = decay
        .norms
        .iter()
        .map(|n| (n - x.norm()).abs())
        .fold(0.0, f64::max);
    b.checks
        .push(Check::at_most("geometric_orbit_norm_drift", drift, 1e-12));
    b.decay = Some(decay);

    let mut worst = 0.0_f64;
    for k in 1..=len.min(16) {
        let e = scenarios::unit_coordinate(sem.space(), k)?;
        worst = worst.max(sem.apply(&e, k as f64)?.norm());
    }
    b.checks
        .push(Check::at_most("unit_coordinate_after_k_steps", worst, 0.0));

    let y = one_dim(x.clone())?;
    let s_grid: Vec<f64> = r
        .s_grid()
        .into_iter()
        .map(f64::round)
        .filter(|s| *s >= 1.0)
        .collect();
    let s_grid = if s_grid.is_empty() { vec![1.0] } else { s_grid };
    let t_grid: Vec<f64> = steps
        .iter()
        .copied()
        .filter(|t| t + s_grid[s_grid.len() - 1] <= horizon)
        .collect();
    b.angles = Some(angle_trajectory(
        &sem,
        &y,
        &t_grid,
        &s_grid,
        r.sphere_samples,
    )?);
    b.series = Some(cauchy_series(
        &sem,
        &y,
        r.k_max.min(len / 2 - 1),
        SeriesMetric::Increment,
        r.sphere_samples,
    )?);
    let probes = vec![x, scenarios::unit_coordinate(sem.space(), len / 2)?];
    b.growth = growth_profile(&sem, &probes, &steps)?;
    Ok(())
}

fn ex2(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let sem = scenarios::multiplication_semigroup_on(r.grid_step)?;
    let space = sem.space().clone();
    let one = Vector::from_fn(space.clone(), |_| 1.0, None, vec![])?;
    let one_minus_x = Vector::from_fn(space.clone(), |x| 1.0 - x, None, vec![])?;
    let x = Vector::from_fn(space, |x| x, None, vec![])?;
    let t_grid = r.t_grid();

    let decay = orbit_decay(&sem, &one_minus_x, &t_grid, 0.01)?;
    b.checks.push(Check::at_most(
        "decay_of_1_minus_x_window_max",
        window_max(&decay),
        decay.threshold,
    ));
    b.decay = Some(decay);

    let y = one_dim(one.clone())?;
    let series = cauchy_series(&sem, &y, r.k_max, SeriesMetric::Increment, r.sphere_samples)?;
    let formula = |k: f64| (1.0 / (k + 1.0)) * (k / (k + 1.0)).powf(k);
    let err = series
        .terms
        .iter()
        .enumerate()
        .take(200)
        .map(|(i, t)| (t - formula((i + 1) as f64)).abs())
        .fold(0.0, f64::max);
    b.checks
        .push(Check::at_most("term_formula_max_abs_error", err, 1e-4));
    if r.k_max >= 2 {
        let block = series.dyadic_block(r.k_max / 2);
        b.record("dyadic_block", block);
        b.checks.push(Check::at_most(
            "dyadic_block_relative_error",
            (block - LN_2 / E).abs() / (LN_2 / E),
            0.1,
        ));
    }
    if r.k_max >= 10_000 {
        let tail = series.partial_sum(10_000) - series.partial_sum(1000);
        b.checks
            .push(Check::at_least("tail_1000_to_10000_lower", tail, 0.76));
        b.checks
            .push(Check::at_most("tail_1000_to_10000_upper", tail, 0.93));
    }
    b.series = Some(series);

    let angles = angle_trajectory(&sem, &y, &t_grid, &r.s_grid(), r.sphere_samples)?;
    b.checks.push(Check::at_most(
        "final_sup_profile",
        last(&angles.sup_profile),
        0.05,
    ));
    b.angles = Some(angles);

    b.growth = growth_profile(&sem, &[one.clone(), one_minus_x, x], &t_grid)?;
    let peak = b.growth.iter().map(|g| g.ratio).fold(0.0, f64::max);
    b.checks
        .push(Check::at_most("growth_ratio_max", peak, 1.0 + 1e-9));
    b.record("m(1)", m_functional(&sem, &one, r.t_max)?);
    Ok(())
}

fn window_max(d: &DecayCurve) -> f64 {
    d.times
        .iter()
        .zip(&d.norms)
        .filter(|(t, _)| **t >= d.window.0)
        .map(|(_, n)| *n)
        .fold(0.0, f64::max)
}

fn last(xs: &[f64]) -> f64 {
    *xs.last().unwrap_or(&f64::NAN)
}

fn ex3(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let sem = scenarios::translation_limit_semigroup_on(r.domain_max, r.grid_step)?;
    let space = sem.space().clone();
    let f = scenarios::example3_vector(&space)?;
    let t_grid = r.t_grid();

    let decay = orbit_decay(&sem, &f, &t_grid, 0.5)?;
    b.checks.push(Check::at_least(
        "featured_vector_norm_floor",
        decay.norms.iter().copied().fold(f64::INFINITY, f64::min),
        1.0,
    ));
    b.decay = Some(decay);
    let bump = Vector::from_fn(
        space.clone(),
        |x| (1.0 - (x - 5.0).abs() / 5.0).max(0.0),
        Some(0.0),
        vec![],
    )?;
    let bump_decay = orbit_decay(&sem, &bump, &[0.0, 5.0, 10.0, 15.0, 20.0], 0.0)?;
    b.checks.push(Check::at_most(
        "compact_bump_window_max",
        window_max(&bump_decay),
        0.0,
    ));

    let y = one_dim(f.clone())?;
    let series = cauchy_series(&sem, &y, r.k_max, SeriesMetric::Increment, r.sphere_samples)?;
    if r.k_max >= 50 {
        let scaled: Vec<f64> = (50..=r.k_max.min(200))
            .map(|k| k as f64 * series.terms[k - 1])
            .collect();
        b.checks.push(Check::at_least(
            "k_times_term_min",
            scaled.iter().copied().fold(f64::INFINITY, f64::min),
            1.8,
        ));
        b.checks.push(Check::at_most(
            "k_times_term_max",
            scaled.iter().copied().fold(0.0, f64::max),
            2.2,
        ));
    }
    let mut k = 50;
    while 2 * k <= r.k_max {
        b.checks.push(Check::at_least(
            format!("dyadic_block_{k}"),
            series.dyadic_block(k),
            0.5,
        ));
        k *= 2;
    }
    b.series = Some(series);

    let angles = angle_trajectory(&sem, &y, &t_grid, &r.s_grid(), r.sphere_samples)?;
    b.checks.push(Check::at_most(
        "final_sup_profile",
        last(&angles.sup_profile),
        0.05,
    ));
    b.angles = Some(angles);

    let constants = sem.known_invariant().expect("constants").clone();
    let inv = invariance_residual(
        &sem,
        &constants,
        &[0.5, 1.0, 2.0, 5.0, 10.0],
        r.sphere_samples,
    )?;
    b.checks.push(Check::at_most(
        "constants_invariance",
        inv.residuals["max_angle"],
        1e-8,
    ));
    b.reports.push(inv);

    let (limit, gap) = estimate_limit_subspace(&sem, &y, 200.0, r.sphere_samples)?;
    b.record("limit_gap_T200", gap);
    b.checks.push(Check::at_most(
        "limit_estimate_vs_constants",
        angle(&limit, &constants, r.sphere_samples)?,
        0.05,
    ));

    let probe_t: Vec<f64> = stepped(0.0, 200.0, 10.0);
    let k_lower = coefficient_bound_probe(&sem, &y, &probe_t, r.sphere_samples)?;
    b.checks
        .push(Check::at_least("coefficient_bound", k_lower, 0.4));

    b.growth = growth_profile(
        &sem,
        &[f, scenarios::constant_with_limit(&space, 1.0)?],
        &t_grid,
    )?;
    Ok(())
}

/// `v(t) = φ_t(0, −t, 1)`; its finite block is `(0, 1)`.
pub fn example4_v(sem: &crate::semigroup::SemigroupScenario, t: f64) -> Result<Vector> {
    let zero = Vector::zeros(sem.space().core().clone());
    sem.apply(
        &Vector::product(sem.space().clone(), zero, vec![-t, 1.0])?,
        t,
    )
}

/// `‖R(v(t))‖ = ‖v(t) − v(t + 1)‖`.
pub fn example4_r_norm(sem: &crate::semigroup::SemigroupScenario, t: f64) -> Result<f64> {
    Ok(example4_v(sem, t)?.sub(&example4_v(sem, t + 1.0)?)?.norm())
}

fn ex4(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let sem = scenarios::example4_semigroup_on(r.domain_max, r.grid_step)?;
    let y = scenarios::finite_block_subspace(sem.space())?;
    let t_grid = r.t_grid();

    let angles = angle_trajectory(&sem, &y, &t_grid, &r.s_grid(), r.sphere_samples)?;
    let windows = non_stabilization_windows(&angles, 2.0 * std::f64::consts::PI);
    b.checks.push(Check::at_least(
        "min_over_windows_of_max_angle",
        windows,
        0.1,
    ));
    b.angles = Some(angles);

    let mut slack = f64::INFINITY;
    for &t in &t_grid {
        let bound = (t.cos() - (t + 1.0).cos()).abs();
        slack = slack.min(example4_r_norm(&sem, t)? - bound);
    }
    b.checks
        .push(Check::at_least("r_norm_minus_cosine_bound", slack, -1e-3));

    let grid = Grid::new(0.0, r.domain_max, r.grid_step)?;
    let dk = |x: f64| -sinc(x);
    let dl = |x: f64| example4::k(x) - x * sinc(x) + x.sin();
    let gen = generator_conditions_check(
        &example4::g,
        &example4::k,
        &example4::l,
        &grid,
        DerivativeMode::ClosedForm { dk: &dk, dl: &dl },
    )?;
    for (name, v) in &gen.residuals {
        b.checks.push(Check::at_most(
            format!("generator_{name}"),
            *v,
            gen.tolerances[name],
        ));
    }
    b.reports.push(gen);

    let y_inf = sem.known_invariant().expect("Y_inf").clone();
    let inv = invariance_residual(&sem, &y_inf, &[0.5, 1.0, 2.0, 5.0, 10.0], r.sphere_samples)?;
    b.checks.push(Check::at_most(
        "y_inf_invariance",
        inv.residuals["max_angle"],
        1e-3,
    ));
    b.reports.push(inv);
    let moving = invariance_residual(&sem, &y, &[1.0], r.sphere_samples)?;
    b.checks.push(Check::at_least(
        "finite_block_not_invariant",
        moving.residuals["max_angle"],
        0.1,
    ));
    b.reports.push(moving);

    b.series = Some(cauchy_series(
        &sem,
        &y,
        r.k_max,
        SeriesMetric::Angle,
        r.sphere_samples,
    )?);
    let zero = Vector::zeros(sem.space().core().clone());
    let probe = Vector::product(sem.space().clone(), zero, vec![0.0, 1.0])?;
    let decay = orbit_decay(&sem, &probe, &t_grid, 0.5)?;
    b.decay = Some(decay);
    b.growth = growth_profile(&sem, &[probe], &t_grid)?;
    Ok(())
}

/// `min` over windows `[T, T + width] ⊂ [T_first, T_last]` of the largest
/// sup-profile value inside the window; falls back to the overall maximum
/// when the range is shorter than one window.
pub fn non_stabilization_windows(a: &AngleTrajectory, width: f64) -> f64 {
    let (ts, prof) = (&a.t_grid, &a.sup_profile);
    let t_last = last(ts);
    let mut worst = f64::INFINITY;
    for (i, &t0) in ts.iter().enumerate() {
        if t0 + width > t_last + 1e-9 {
            break;
        }
        let m = ts[i..]
            .iter()
            .zip(&prof[i..])
            .take_while(|(t, _)| **t <= t0 + width + 1e-9)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
        worst = worst.min(m);
    }
    if worst.is_finite() {
        worst
    } else {
        prof.iter().copied().fold(0.0, f64::max)
    }
}

fn ex5(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let sem = scenarios::example5_semigroup_on(r.domain_max, r.grid_step)?;
    let zero = Vector::zeros(sem.space().core().clone());
    let probe = Vector::product(sem.space().clone(), zero, vec![1.0])?;
    let t_grid = r.t_grid();

    b.growth = growth_profile(&sem, std::slice::from_ref(&probe), &t_grid)?;
    if r.t_max >= 1000.0 {
        let g = b
            .growth
            .iter()
            .rev()
            .find(|g| g.t > 0.0)
            .expect("positive times");
        b.checks.push(Check::at_most(
            "growth_over_t_at_t_max",
            g.ratio / g.t,
            0.01,
        ));
    }

    let mut core_err = 0.0_f64;
    for &t in &t_grid {
        let v = sem.apply(&probe, t)?;
        core_err = core_err.max((v.samples()[0] - t.ln_1p()).abs());
    }
    b.checks
        .push(Check::at_most("core_at_origin_vs_log", core_err, 1e-10));

    let x0 = sem.x0_distance().expect("fin-part distance");
    for t in [10.0, 100.0] {
        let yt = one_dim(sem.apply(&probe, t)?)?;
        let a = deficiency_to_x0(&yt, 1, |v| x0.distance(v))?;
        let expect = 1.0 / (1.0 + t.ln_1p());
        b.record(&format!("angle_to_x0_t={t}"), a);
        b.checks.push(Check::at_most(
            format!("angle_to_x0_rel_error_t={t}"),
            (a - expect).abs() / expect,
            0.1,
        ));
    }

    let y = one_dim(probe.clone())?;
    let angles = angle_trajectory(&sem, &y, &t_grid, &r.s_grid(), r.sphere_samples)?;
    b.checks.push(Check::at_most(
        "final_sup_profile",
        last(&angles.sup_profile),
        0.05,
    ));
    b.angles = Some(angles);
    b.series = Some(cauchy_series(
        &sem,
        &y,
        r.k_max,
        SeriesMetric::Angle,
        r.sphere_samples,
    )?);
    b.decay = Some(orbit_decay(&sem, &probe, &t_grid, 0.5)?);
    Ok(())
}

fn remark2(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let sem = scenarios::remark2_jordan()?;
    let t_grid = r.t_grid();
    let m10 = m_functional(&sem, &scenarios::r2(1.0, 0.0)?, r.t_max)?;
    b.record("m(1,0)", m10);
    b.checks
        .push(Check::at_most("m(1,0)_error", (m10 - 1.0).abs(), 1e-6));
    for eps in [0.1, 0.01] {
        let m = m_functional(&sem, &scenarios::r2(1.0, -eps)?, r.t_max)?;
        b.record(&format!("m(1,-{eps})"), m);
        if r.t_max >= 1.0 / eps {
            b.checks.push(Check::at_most(
                format!("m(1,-{eps})_error"),
                (m - eps).abs(),
                1e-6,
            ));
        }
    }

    let e2 = scenarios::r2(0.0, 1.0)?;
    b.growth = growth_profile(&sem, std::slice::from_ref(&e2), &t_grid)?;
    let g = b.growth.last().expect("nonempty");
    b.checks.push(Check::at_least(
        "linear_growth_ratio_over_t",
        g.ratio / g.t.max(1.0),
        1.0,
    ));

    let fixed = sem.known_invariant().expect("fixed line").clone();
    let inv = invariance_residual(&sem, &fixed, &[0.5, 1.0, 2.0, 5.0, 10.0], r.sphere_samples)?;
    b.checks.push(Check::at_most(
        "fixed_line_invariance",
        inv.residuals["max_angle"],
        1e-8,
    ));
    b.reports.push(inv);

    let y = one_dim(e2)?;
    b.angles = Some(angle_trajectory(
        &sem,
        &y,
        &t_grid,
        &r.s_grid(),
        r.sphere_samples,
    )?);
    b.series = Some(cauchy_series(
        &sem,
        &y,
        r.k_max,
        SeriesMetric::Angle,
        r.sphere_samples,
    )?);
    b.decay = Some(orbit_decay(&sem, &scenarios::r2(1.0, 0.0)?, &t_grid, 0.5)?);
    Ok(())
}

/// Times of the Duhamel fidelity study.
pub const DUHAMEL_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
/// Panel widths of the fidelity study; both divide every time in
/// [`DUHAMEL_TIMES`].
pub const DUHAMEL_STEPS: [f64; 2] = [1.0 / 32.0, 1.0 / 64.0];

/// Quadrature-built copy of the log-growth semigroup.
pub fn example5_replica(
    domain_max: f64,
    step: f64,
    quad_step: f64,
) -> Result<crate::semigroup::SemigroupScenario> {
    let alpha = scenarios::translation_c0(domain_max, step)?;
    let g = Vector::from_fn(alpha.space().clone(), |x| 1.0 / (x + 1.0), None, vec![])?;
    duhamel_extension(
        TriangularSpec::with_matrix(
            "ex5-duhamel-replica",
            alpha,
            MatrixFlow::identity(1)?,
            vec![g],
            GrowthClass::Slow,
        )
        .quad_step(quad_step),
    )
}

/// Quadrature-built copy of the Jordan-coupled semigroup.
pub fn example4_replica(
    domain_max: f64,
    step: f64,
    quad_step: f64,
) -> Result<crate::semigroup::SemigroupScenario> {
    let alpha = scenarios::translation_c0(domain_max, step)?;
    let core = alpha.space().clone();
    let g = Vector::from_fn(core.clone(), sinc, None, vec![])?;
    duhamel_extension(
        TriangularSpec::with_matrix(
            "ex4-duhamel-replica",
            alpha,
            MatrixFlow::jordan(),
            vec![g, Vector::zeros(core)],
            GrowthClass::Linear,
        )
        .quad_step(quad_step),
    )
}

/// Test input `(e^{−x}, 1, …, 1)` for a product space.
pub fn duhamel_probe(space: &AmbientSpace) -> Result<Vector> {
    let core = Vector::from_fn(space.core().clone(), |x| (-x).exp(), None, vec![])?;
    Vector::product(space.clone(), core, vec![1.0; space.fin_dim()])
}

/// Max-abs disagreement between a replica and its closed form at each of
/// `times`, per quadrature step.
pub fn duhamel_errors(
    which: &str,
    domain_max: f64,
    step: f64,
    times: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let exact = match which {
        "ex4" => scenarios::example4_semigroup_on(domain_max, step)?,
        "ex5" => scenarios::example5_semigroup_on(domain_max, step)?,
        other => return Err(Error::InvalidArgument(format!("no replica named {other}"))),
    };
    let replicas = DUHAMEL_STEPS
        .iter()
        .map(|&h| match which {
            "ex4" => example4_replica(domain_max, step, h),
            _ => example5_replica(domain_max, step, h),
        })
        .collect::<Result<Vec<_>>>()?;
    let v = duhamel_probe(exact.space())?;
    times
        .iter()
        .map(|&t| {
            let reference = exact.apply(&v, t)?;
            let mut out = [0.0; 2];
            for (slot, rep) in out.iter_mut().zip(&replicas) {
                *slot = rep.apply(&v, t)?.sub(&reference)?.norm();
            }
            Ok(out)
        })
        .collect()
}

fn duhamel(r: &Resolved, b: &mut Bundle) -> Result<()> {
    let times: Vec<f64> = DUHAMEL_TIMES
        .iter()
        .copied()
        .filter(|t| *t <= r.t_max + 1e-12)
        .collect();
    if times.is_empty() {
        return Err(Error::InvalidArgument(
            "t_max must be at least 0.5 for this bundle".into(),
        ));
    }
    for which in ["ex4", "ex5"] {
        let errs = duhamel_errors(which, r.domain_max, r.grid_step, &times)?;
        let mut worst = 0.0_f64;
        let mut ratio = f64::INFINITY;
        for (t, [coarse, fine]) in times.iter().zip(&errs) {
            b.record(&format!("{which}_err_h=1/32_t={t}"), *coarse);
            b.record(&format!("{which}_err_h=1/64_t={t}"), *fine);
            worst = worst.max(*coarse).max(*fine);
            ratio = ratio.min(coarse / fine);
        }
        b.checks.push(Check::at_most(
            format!("{which}_replica_max_error"),
            worst,
            1e-5,
        ));
        b.checks.push(Check::at_least(
            format!("{which}_halving_ratio"),
            ratio,
            4.0,
        ));

        let rep = match which {
            "ex4" => example4_replica(r.domain_max, r.grid_step, DUHAMEL_STEPS[1])?,
            _ => example5_replica(r.domain_max, r.grid_step, DUHAMEL_STEPS[1])?,
        };
        let v = duhamel_probe(rep.space())?;
        let law = rep.law_residual(&v, 1.0, 1.0)? / (1.0 + v.norm());
        b.checks.push(Check::at_most(
            format!("{which}_replica_law_residual"),
            law,
            1e-5,
        ));
    }
    Ok(())
}
