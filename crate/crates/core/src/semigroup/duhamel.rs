use std::sync::Arc;

use super::{GrowthClass, MatrixFlow, SemigroupScenario, TimeDomain, X0Distance};
use crate::error::{Error, Result};
use crate::space::{AmbientSpace, Evaluator, Vector};

/// `Q_t` acting on coordinates of `ℝⁿ`.
pub type CoordFlow = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// Data of a triangular generator `[[α, P], [0, Q]]` on `X₀ × ℝⁿ`.
#[derive(Clone)]
pub struct TriangularSpec {
    pub name: String,
    pub alpha: SemigroupScenario,
    pub q_dim: usize,
    pub q_apply: CoordFlow,
    /// `P(b) = Σ bᵢ gᵢ`; one core vector per coordinate, each with an evaluator.
    pub p_columns: Vec<Vector>,
    /// Simpson panel width; `None` selects `1e-3·t` clamped to `[1e-4, 0.01]`.
    pub quad_step: Option<f64>,
    /// Bound on the Richardson error estimate (max-abs over the grid).
    pub quad_tol: f64,
    pub growth_class: GrowthClass,
}

impl TriangularSpec {
    pub fn with_matrix(
        name: impl Into<String>,
        alpha: SemigroupScenario,
        q: MatrixFlow,
        p_columns: Vec<Vector>,
        growth_class: GrowthClass,
    ) -> Self {
        let q_dim = q.dim();
        Self {
            name: name.into(),
            alpha,
            q_dim,
            q_apply: Arc::new(move |b, t| q.apply(b, t)),
            p_columns,
            quad_step: None,
            quad_tol: 1e-7,
            growth_class,
        }
    }

    pub fn quad_step(mut self, h: f64) -> Self {
        self.quad_step = Some(h);
        self
    }
}

fn panel_count(t: f64, quad_step: Option<f64>) -> usize {
    let h = quad_step.unwrap_or_else(|| (1e-3 * t).clamp(1e-4, 0.01));
    let n = (t / h - 1e-9).ceil().max(1.0) as usize;
    // multiple of 4 so the half-resolution rule is also composite Simpson
    n.div_ceil(4) * 4
}

/// Simpson weights on `n + 1` equispaced nodes of width `h` (n even).
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Semigroup on `core × ℝⁿ` (sum norm) given by
/// `φ_t(x, b) = (α_t x + ∫₀ᵗ α_s P Q_{t−s} b ds, Q_t b)`.
///
/// The integral is composite Simpson over the nodes `s_k`; the same nodes at
/// double spacing give the Richardson estimate `|I_h − I_{2h}|/15`.
pub fn duhamel_extension(spec: TriangularSpec) -> Result<SemigroupScenario> {
    let alpha = spec.alpha.clone();
    let core = alpha.space().clone();
    if core.is_product() || core.grid().is_none() || core.has_limit() {
        return Err(Error::UnsupportedScenario(
            "Duhamel extension needs a plain grid-sup core space".into(),
        ));
    }
    if alpha.time_domain() != TimeDomain::Continuous {
        return Err(Error::UnsupportedScenario(
            "Duhamel extension needs continuous time".into(),
        ));
    }
    let lift = alpha
        .lift()
        .cloned()
        .ok_or_else(|| Error::UnsupportedScenario("core semigroup has no pointwise form".into()))?;
    if spec.q_dim == 0 || spec.q_dim > 3 {
        return Err(Error::InvalidArgument(format!(
            "Q dimension {} outside 1..=3",
            spec.q_dim
        )));
    }
    if spec.p_columns.len() != spec.q_dim {
        return Err(Error::InvalidArgument(format!(
            "{} P columns for a {}-dimensional Q",
            spec.p_columns.len(),
            spec.q_dim
        )));
    }
    if let Some(h) = spec.quad_step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "quad_step {h} must be positive"
            )));
        }
    }
    let mut columns: Vec<(usize, Evaluator)> = Vec::new();
    for (i, g) in spec.p_columns.iter().enumerate() {
        if g.space() != &core {
            return Err(Error::SpaceMismatch);
        }
        let f = g.evaluator().cloned().ok_or_else(|| {
            Error::MalformedVector("P columns need closed-form evaluators".into())
        })?;
        if g.norm() > 0.0 {
            columns.push((i, f));
        }
    }

    let space = AmbientSpace::product_sum(core.clone(), spec.q_dim)?;
    let sp = space.clone();
    let q_apply = spec.q_apply.clone();
    let (quad_step, quad_tol) = (spec.quad_step, spec.quad_tol);
    let grid = *core.grid().expect("checked above");

    let evolve = Arc::new(move |v: &Vector, t: f64| {
        if t == 0.0 {
            return Ok(v.clone());
        }
        let b = v.fin_part().to_vec();
        let fin = q_apply(&b, t);
        let ax = alpha.apply(&v.core_part(), t)?;
        if b.iter().all(|x| *x == 0.0) || columns.is_empty() {
            return Vector::product(sp.clone(), ax, fin);
        }

        let n = panel_count(t, quad_step);
        let h = t / n as f64;
        let fine = simpson_weights(n, h);
        let coarse = simpson_weights(n / 2, 2.0 * h);
        // (fine weight, coarse weight, lifted column) per node and column
        let mut terms: Vec<(f64, f64, Evaluator)> = Vec::with_capacity((n + 1) * columns.len());
        for k in 0..=n {
            let s = k as f64 * h;
            let c = q_apply(&b, t - s);
            for (i, g) in &columns {
                if c[*i] == 0.0 {
                    continue;
                }
                let wc = if k % 2 == 0 { coarse[k / 2] } else { 0.0 };
                terms.push((fine[k] * c[*i], wc * c[*i], lift(g, s)));
            }
        }

        let mut samples = Vec::with_capacity(grid.len());
        let mut err = 0.0_f64;
        for (x, base) in grid.points().zip(ax.samples()) {
            let (mut fi, mut co) = (0.0, 0.0);
            for (wf, wc, g) in &terms {
                let gx = g(x);
                fi += wf * gx;
                co += wc * gx;
            }
            err = err.max((fi - co).abs() / 15.0);
            samples.push(base + fi);
        }
        if err > quad_tol {
            return Err(Error::QuadratureFailure(format!(
                "Richardson estimate {err:.3e} exceeds {quad_tol:.1e} at t = {t}"
            )));
        }
        let mut core_vec = Vector::from_parts(core.clone(), samples, None, Vec::new())?;
        if let Some(base) = ax.evaluator().cloned() {
            let pairs: Arc<Vec<(f64, Evaluator)>> =
                Arc::new(terms.into_iter().map(|(w, _, g)| (w, g)).collect());
            let f: Evaluator =
                Arc::new(move |x: f64| base(x) + pairs.iter().map(|(w, g)| w * g(x)).sum::<f64>());
            core_vec = core_vec.with_evaluator_unchecked(f);
        }
        Vector::product(sp.clone(), core_vec, fin)
    });

    let x0 = (spec.alpha.x0_distance() == Some(X0Distance::Whole)).then_some(X0Distance::FinPart);
    let mut sem = SemigroupScenario::new(
        spec.name,
        TimeDomain::Continuous,
        space,
        spec.growth_class,
        evolve,
    )
    .with_law_tol(1e-5);
    sem = sem.with_x0(
        if x0.is_some() {
            "core × {0}"
        } else {
            "not available in closed form"
        },
        x0,
    );
    Ok(sem)
}
