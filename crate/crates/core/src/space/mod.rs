//! Discretized normed spaces, their vectors and finite-dimensional subspaces,
//! and the angle metric between subspaces.
//!
//! Function spaces are represented on a uniform grid with the sup norm taken
//! over grid samples. Vectors may carry a closed-form evaluator so that
//! operators reading outside the grid (translations) never need to
//! extrapolate.

mod angle;
mod minimax;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use angle::{
    angle, angle_with, deficiency, deficiency_to_x0, deficiency_with, distance_to_subspace,
    distance_to_subspace_with, unit_sphere_samples, DEFAULT_SPHERE_SAMPLES,
};
pub use minimax::MinimaxOptions;

/// Closed-form real function of position.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Largest subspace dimension the minimax solver accepts.
pub const MAX_SUBSPACE_DIM: usize = 4;

/// Relative tolerance of the linear-independence test.
pub const INDEPENDENCE_TOL: f64 = 1e-8;

/// Uniform grid `x_min, x_min + step, ..., x_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    step: f64,
    len: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidSpace("grid bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::InvalidSpace(format!(
                "grid step {step} must be positive"
            )));
        }
        if x_max <= x_min {
            return Err(Error::InvalidSpace(format!(
                "empty grid [{x_min}, {x_max}]"
            )));
        }
        let cells = (x_max - x_min) / step;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-12 * cells.max(1.0) {
            return Err(Error::InvalidSpace(format!(
                "step {step} does not divide [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            step,
            len: rounded as usize + 1,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th grid point; the last point is exactly `x_max`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }
}

/// Descriptor of a discretized normed space.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientSpace {
    /// Continuous functions sampled on a grid, sup norm over the samples.
    GridSup(Grid),
    /// Functions with a stored limit at infinity; the norm includes `|limit|`.
    GridSupWithLimit(Grid),
    /// First `len` coordinates of a sequence, Euclidean norm.
    SeqL2 { len: usize },
    /// `core × ℝ^fin_dim` with the sum norm `‖x‖_core + |y|_∞`.
    ProductSum {
        core: Box<AmbientSpace>,
        fin_dim: usize,
    },
}

impl AmbientSpace {
    pub fn grid_sup(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        Ok(Self::GridSup(Grid::new(x_min, x_max, step)?))
    }

    pub fn grid_sup_with_limit(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        Ok(Self::GridSupWithLimit(Grid::new(x_min, x_max, step)?))
    }

    pub fn seq_l2(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSpace(
                "sequence truncation length must be positive".into(),
            ));
        }
        Ok(Self::SeqL2 { len })
    }

    pub fn product_sum(core: AmbientSpace, fin_dim: usize) -> Result<Self> {
        if matches!(core, AmbientSpace::ProductSum { .. }) {
            return Err(Error::InvalidSpace(
                "product core must not itself be a product".into(),
            ));
        }
        Ok(Self::ProductSum {
            core: Box::new(core),
            fin_dim,
        })
    }

    /// `ℝⁿ` with the max-abs norm, realized as an `n`-point grid on `[0, n-1]`.
    pub fn sup_coords(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpace(
                "sup-norm coordinate space needs n >= 2".into(),
            ));
        }
        Self::grid_sup(0.0, (n - 1) as f64, 1.0)
    }

    /// The space holding the sampled (non-finite-block) part of a vector.
    pub fn core(&self) -> &AmbientSpace {
        match self {
            AmbientSpace::ProductSum { core, .. } => core,
            other => other,
        }
    }

    pub fn fin_dim(&self) -> usize {
        match self {
            AmbientSpace::ProductSum { fin_dim, .. } => *fin_dim,
            _ => 0,
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self.core() {
            AmbientSpace::GridSup(g) | AmbientSpace::GridSupWithLimit(g) => Some(g),
            _ => None,
        }
    }

    pub fn has_limit(&self) -> bool {
        matches!(self.core(), AmbientSpace::GridSupWithLimit(_))
    }

    pub fn is_product(&self) -> bool {
        matches!(self, AmbientSpace::ProductSum { .. })
    }

    /// Number of stored samples (grid points or sequence coordinates).
    pub fn sample_len(&self) -> usize {
        match self.core() {
            AmbientSpace::GridSup(g) | AmbientSpace::GridSupWithLimit(g) => g.len(),
            AmbientSpace::SeqL2 { len } => *len,
            AmbientSpace::ProductSum { .. } => unreachable!("nested products are rejected"),
        }
    }

    fn uses_sup(&self) -> bool {
        !matches!(self.core(), AmbientSpace::SeqL2 { .. })
    }
}

/// An element of an [`AmbientSpace`].
///
/// Samples are always materialized. For grid kinds an optional evaluator
/// gives the closed form at arbitrary positions; for product spaces the
/// samples, evaluator and limit describe the core component and `fin`
/// holds the finite coordinate block.
#[derive(Clone)]
pub struct Vector {
    space: AmbientSpace,
    samples: Vec<f64>,
    evaluator: Option<Evaluator>,
    limit: Option<f64>,
    fin: Vec<f64>,
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Vector")
            .field("space", &self.space)
            .field("samples", &self.samples.len())
            .field("evaluator", &self.evaluator.is_some())
            .field("limit", &self.limit)
            .field("fin", &self.fin)
            .finish()
    }
}

impl Vector {
    /// Builds a vector from raw samples.
    ///
    /// `limit` is required for (and only accepted by) grid-sup-with-limit
    /// cores; `fin` must have length `fin_dim` for product spaces and be
    /// empty otherwise.
    pub fn from_parts(
        space: AmbientSpace,
        samples: Vec<f64>,
        limit: Option<f64>,
        fin: Vec<f64>,
    ) -> Result<Self> {
        if samples.len() != space.sample_len() {
            return Err(Error::MalformedVector(format!(
                "expected {} samples, got {}",
                space.sample_len(),
                samples.len()
            )));
        }
        if fin.len() != space.fin_dim() {
            return Err(Error::MalformedVector(format!(
                "expected finite block of length {}, got {}",
                space.fin_dim(),
                fin.len()
            )));
        }
        match (space.has_limit(), limit) {
            (true, None) => {
                return Err(Error::MalformedVector(
                    "limit at infinity is required".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::MalformedVector(
                    "limit at infinity is only stored by grid-sup-with-limit spaces".into(),
                ))
            }
            _ => {}
        }
        if samples
            .iter()
            .chain(fin.iter())
            .chain(limit.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::MalformedVector("non-finite entry".into()));
        }
        Ok(Self {
            space,
            samples,
            evaluator: None,
            limit,
            fin,
        })
    }

    pub fn from_samples(space: AmbientSpace, samples: Vec<f64>) -> Result<Self> {
        Self::from_parts(space, samples, None, Vec::new())
    }

    /// Samples `f` on the grid of a grid-kind (or grid-core product) space
    /// and keeps `f` as the evaluator.
    pub fn from_fn(
        space: AmbientSpace,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        limit: Option<f64>,
        fin: Vec<f64>,
    ) -> Result<Self> {
        Self::from_evaluator(space, Arc::new(f), limit, fin)
    }

    pub fn from_evaluator(
        space: AmbientSpace,
        f: Evaluator,
        limit: Option<f64>,
        fin: Vec<f64>,
    ) -> Result<Self> {
        let grid = *space
            .grid()
            .ok_or_else(|| Error::MalformedVector("evaluators need a grid-kind space".into()))?;
        let samples = grid.points().map(|x| f(x)).collect();
        let mut v = Self::from_parts(space, samples, limit, fin)?;
        v.evaluator = Some(f);
        Ok(v)
    }

    /// Attaches an evaluator to sampled data, checking agreement at the grid
    /// points to `1e-10`.
    pub fn with_evaluator(mut self, f: Evaluator) -> Result<Self> {
        let grid = *self
            .space
            .grid()
            .ok_or_else(|| Error::MalformedVector("evaluators need a grid-kind space".into()))?;
        for (i, x) in grid.points().enumerate() {
            if (f(x) - self.samples[i]).abs() > 1e-10 {
                return Err(Error::MalformedVector(format!(
                    "evaluator disagrees with sample at x = {x}"
                )));
            }
        }
        self.evaluator = Some(f);
        Ok(self)
    }

    /// Attaches an evaluator already known to reproduce the samples.
    pub(crate) fn with_evaluator_unchecked(mut self, f: Evaluator) -> Self {
        self.evaluator = Some(f);
        self
    }

    pub fn zeros(space: AmbientSpace) -> Self {
        let samples = vec![0.0; space.sample_len()];
        let limit = space.has_limit().then_some(0.0);
        let fin = vec![0.0; space.fin_dim()];
        let evaluator: Option<Evaluator> = space.grid().map(|_| Arc::new(|_| 0.0) as Evaluator);
        Self {
            space,
            samples,
            evaluator,
            limit,
            fin,
        }
    }

    /// Product-space vector from a core vector and a finite block.
    pub fn product(space: AmbientSpace, core: Vector, fin: Vec<f64>) -> Result<Self> {
        if space.core() != &core.space || !space.is_product() {
            return Err(Error::SpaceMismatch);
        }
        if fin.len() != space.fin_dim() {
            return Err(Error::MalformedVector(format!(
                "expected finite block of length {}, got {}",
                space.fin_dim(),
                fin.len()
            )));
        }
        Ok(Self {
            space,
            samples: core.samples,
            evaluator: core.evaluator,
            limit: core.limit,
            fin,
        })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn evaluator(&self) -> Option<&Evaluator> {
        self.evaluator.as_ref()
    }

    pub fn limit_at_inf(&self) -> Option<f64> {
        self.limit
    }

    pub fn fin_part(&self) -> &[f64] {
        &self.fin
    }

    /// `|f(x_max) − limit|`, the visible truncation gap of a with-limit vector.
    pub fn limit_gap(&self) -> Option<f64> {
        let limit = self.limit?;
        let grid = self.space.grid()?;
        Some((self.eval(grid.x_max()) - limit).abs())
    }

    /// The core component as a vector of the core space.
    pub fn core_part(&self) -> Vector {
        Vector {
            space: self.space.core().clone(),
            samples: self.samples.clone(),
            evaluator: self.evaluator.clone(),
            limit: self.limit,
            fin: Vec::new(),
        }
    }

    /// Value of the core component at position `x`.
    ///
    /// Uses the evaluator when present; otherwise interpolates linearly
    /// between samples and holds the limit (or the last sample) beyond
    /// the grid.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(f) = &self.evaluator {
            return f(x);
        }
        let Some(grid) = self.space.grid() else {
            let i = x.round();
            return if i >= 0.0 && (i as usize) < self.samples.len() {
                self.samples[i as usize]
            } else {
                0.0
            };
        };
        if x > grid.x_max() {
            return self.limit.unwrap_or(self.samples[grid.len() - 1]);
        }
        if x <= grid.x_min() {
            return self.samples[0];
        }
        let pos = (x - grid.x_min()) / grid.step();
        let i = (pos.floor().max(0.0) as usize).min(grid.len() - 2);
        let w = pos - i as f64;
        (1.0 - w) * self.samples[i] + w * self.samples[i + 1]
    }

    /// Norm in the ambient space.
    ///
    /// Sup over samples (plus `|limit|`) for grid kinds, Euclidean for
    /// sequences, core norm plus max-abs of the finite block for products.
    /// Returns exactly zero when every stored magnitude is at most `1e-15`.
    pub fn norm(&self) -> f64 {
        let core = if self.space.uses_sup() {
            let sup = self.samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            sup.max(self.limit.map_or(0.0, f64::abs))
        } else {
            self.samples.iter().map(|x| x * x).sum::<f64>().sqrt()
        };
        let fin = self.fin.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let total = core + fin;
        let tiny = self
            .samples
            .iter()
            .chain(self.fin.iter())
            .chain(self.limit.iter())
            .all(|x| x.abs() <= 1e-15);
        if tiny {
            0.0
        } else {
            total
        }
    }

    /// `Σ cᵢ vᵢ`. All terms must share one space; the evaluator survives only
    /// if every term has one.
    pub fn lin_comb(terms: &[(f64, &Vector)]) -> Result<Vector> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        if terms.iter().any(|(_, v)| v.space != first.space) {
            return Err(Error::SpaceMismatch);
        }
        let n = first.samples.len();
        let mut samples = vec![0.0; n];
        let mut fin = vec![0.0; first.fin.len()];
        let mut limit = first.limit.map(|_| 0.0);
        for (c, v) in terms {
            for (s, x) in samples.iter_mut().zip(&v.samples) {
                *s += c * x;
            }
            for (s, x) in fin.iter_mut().zip(&v.fin) {
                *s += c * x;
            }
            if let (Some(l), Some(x)) = (limit.as_mut(), v.limit) {
                *l += c * x;
            }
        }
        let evaluator = if terms.iter().all(|(_, v)| v.evaluator.is_some()) {
            let parts: Vec<(f64, Evaluator)> = terms
                .iter()
                .map(|(c, v)| (*c, v.evaluator.clone().unwrap()))
                .collect();
            Some(
                Arc::new(move |x: f64| parts.iter().map(|(c, f)| c * f(x)).sum::<f64>())
                    as Evaluator,
            )
        } else {
            None
        };
        Ok(Vector {
            space: first.space.clone(),
            samples,
            evaluator,
            limit,
            fin,
        })
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector::lin_comb(&[(c, self)]).expect("single-term combination")
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        Vector::lin_comb(&[(1.0, self), (-1.0, other)])
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        Vector::lin_comb(&[(1.0, self), (1.0, other)])
    }

    /// `self / ‖self‖`; errors on the zero vector.
    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateBasis(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.scale(1.0 / n))
    }

    /// Components entering the sup norm of the core: samples followed by the
    /// limit when the space stores one.
    pub(crate) fn sup_rows(&self) -> Vec<f64> {
        let mut rows = self.samples.clone();
        if let Some(l) = self.limit {
            rows.push(l);
        }
        rows
    }
}

/// Finite-dimensional subspace given by a linearly independent basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    space: AmbientSpace,
    basis: Vec<Vector>,
}

impl Subspace {
    /// Validates a basis: nonempty, at most [`MAX_SUBSPACE_DIM`] vectors, one
    /// shared space, and each vector at distance more than `1e-8·‖eⁱ‖` from
    /// the span of the others.
    pub fn new(basis: Vec<Vector>) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::DegenerateBasis("empty basis".into()))?;
        if basis.len() > MAX_SUBSPACE_DIM {
            return Err(Error::UnsupportedDimension {
                dim: basis.len(),
                max: MAX_SUBSPACE_DIM,
            });
        }
        let space = first.space.clone();
        if basis.iter().any(|v| v.space != space) {
            return Err(Error::SpaceMismatch);
        }
        for (i, v) in basis.iter().enumerate() {
            let norm = v.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateBasis(format!("basis vector {i} is zero")));
            }
            if basis.len() > 1 {
                let others: Vec<Vector> = basis
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, w)| w.clone())
                    .collect();
                let rest = Subspace {
                    space: space.clone(),
                    basis: others,
                };
                let (d, _) = distance_to_subspace(v, &rest)?;
                if d <= INDEPENDENCE_TOL * norm {
                    return Err(Error::DegenerateBasis(format!(
                        "basis vector {i} lies within {d:e} of the span of the others"
                    )));
                }
            }
        }
        Ok(Self { space, basis })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Same span with every basis vector scaled to unit norm.
    pub fn renormalized(&self) -> Result<Self> {
        let basis = self
            .basis
            .iter()
            .map(Vector::normalized)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space: self.space.clone(),
            basis,
        })
    }

    /// `Σ βᵢ eⁱ`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<Vector> {
        if coeffs.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        let terms: Vec<(f64, &Vector)> = coeffs.iter().copied().zip(&self.basis).collect();
        Vector::lin_comb(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval(step: f64) -> AmbientSpace {
        AmbientSpace::grid_sup(0.0, 1.0, step).unwrap()
    }

    #[test]
    fn grid_rejects_bad_steps() {
        assert!(Grid::new(0.0, 1.0, 0.3).is_err());
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(1.0, 1.0, 0.1).is_err());
        let g = Grid::new(0.0, 1.0, 1e-4).unwrap();
        assert_eq!(g.len(), 10_001);
        assert_eq!(g.point(10_000), 1.0);
    }

    #[test]
    fn norm_of_constant_is_one() {
        let v = Vector::from_fn(unit_interval(1e-3), |_| 1.0, None, vec![]).unwrap();
        assert_eq!(v.norm(), 1.0);
    }

    #[test]
    fn norm_of_parabola() {
        let v = Vector::from_fn(unit_interval(1e-4), |x| x * x - x, None, vec![]).unwrap();
        assert!((v.norm() - 0.25).abs() <= 1e-4);
    }

    #[test]
    fn product_norm_is_sum_norm() {
        let core = unit_interval(0.5);
        let space = AmbientSpace::product_sum(core.clone(), 2).unwrap();
        let v =
            Vector::product(space.clone(), Vector::zeros(core.clone()), vec![0.0, 1.0]).unwrap();
        assert_eq!(v.norm(), 1.0);
        let c = Vector::from_samples(core, vec![0.5, -2.0, 1.0]).unwrap();
        let w = Vector::product(space, c, vec![0.25, -0.5]).unwrap();
        assert_eq!(w.norm(), 2.5);
    }

    #[test]
    fn limit_enters_the_sup_norm() {
        let s = AmbientSpace::grid_sup_with_limit(0.0, 1.0, 0.5).unwrap();
        let v = Vector::from_parts(s, vec![0.1, 0.2, 0.3], Some(-3.0), vec![]).unwrap();
        assert_eq!(v.norm(), 3.0);
        assert!((v.limit_gap().unwrap() - 3.3).abs() < 1e-15);
    }

    #[test]
    fn l2_norm() {
        let v = Vector::from_samples(AmbientSpace::seq_l2(2).unwrap(), vec![3.0, 4.0]).unwrap();
        assert_eq!(v.norm(), 5.0);
    }

    #[test]
    fn malformed_vectors_are_rejected() {
        let s = unit_interval(0.5);
        assert!(matches!(
            Vector::from_samples(s.clone(), vec![1.0, 2.0]),
            Err(Error::MalformedVector(_))
        ));
        assert!(Vector::from_parts(s.clone(), vec![0.0; 3], Some(1.0), vec![]).is_err());
        let wl = AmbientSpace::grid_sup_with_limit(0.0, 1.0, 0.5).unwrap();
        assert!(Vector::from_parts(wl, vec![0.0; 3], None, vec![]).is_err());
        let v = Vector::from_samples(s, vec![0.0, 1.0, 2.0]).unwrap();
        assert!(v.with_evaluator(Arc::new(|x| 2.0 * x + 1e-6)).is_err());
    }

    #[test]
    fn tiny_vectors_have_zero_norm() {
        let v = Vector::from_samples(AmbientSpace::sup_coords(2).unwrap(), vec![1e-16, -1e-16])
            .unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn interpolation_without_evaluator() {
        let s = AmbientSpace::grid_sup_with_limit(0.0, 2.0, 1.0).unwrap();
        let v = Vector::from_parts(s, vec![0.0, 2.0, 4.0], Some(7.0), vec![]).unwrap();
        assert_eq!(v.eval(0.5), 1.0);
        assert_eq!(v.eval(1.75), 3.5);
        assert_eq!(v.eval(10.0), 7.0);
    }

    #[test]
    fn degenerate_bases_are_rejected() {
        let s = AmbientSpace::sup_coords(3).unwrap();
        let a = Vector::from_samples(s.clone(), vec![1.0, 2.0, 3.0]).unwrap();
        let b = a.scale(-2.0);
        assert!(matches!(
            Subspace::new(vec![a.clone(), b]),
            Err(Error::DegenerateBasis(_))
        ));
        assert!(Subspace::new(vec![Vector::zeros(s.clone())]).is_err());
        assert!(Subspace::new(vec![]).is_err());
        let c = Vector::from_samples(s, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(Subspace::new(vec![a, c]).unwrap().dim(), 2);
    }
}
