//! One-parameter semigroups `φ_t` acting on discretized spaces.
//!
//! A [`SemigroupScenario`] bundles an evolution law with its metadata: time
//! domain, declared growth class, an optional known invariant subspace, and
//! a closed-form distance to `X₀ = {v : v_t → 0}` where one exists.

mod duhamel;
mod matrix;
pub mod scenarios;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{AmbientSpace, Evaluator, Subspace, Vector};

pub use duhamel::{duhamel_extension, TriangularSpec};
pub use matrix::{jordan_block_q, matrix_semigroup, MatrixFlow};

/// Evolution law `(v, t) ↦ φ_t(v)`; `t` has already been validated.
pub type Evolution = Arc<dyn Fn(&Vector, f64) -> Result<Vector> + Send + Sync>;

/// Pointwise form of an operator on function spaces: maps the closed form of
/// `f` to the closed form of `φ_t f` without sampling.
pub type Lift = Arc<dyn Fn(&Evaluator, f64) -> Evaluator + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeDomain {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    Bounded,
    /// `‖φ_t‖ = o(t)`
    Slow,
    Linear,
    UnboundedExponential,
}

/// Closed-form distance from a vector to `X₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum X0Distance {
    /// `X₀ = {0}`: the distance is the norm.
    Norm,
    /// `X₀` is the whole space.
    Whole,
    /// `X₀ = {f : f(x_max) = 0}` in a sup-norm space: `|f(x_max)|`.
    RightEndpoint,
    /// `X₀` = functions tending to zero: `|lim f|`.
    Limit,
    /// `X₀ = core × {0}` in a sum-norm product: max-abs of the finite block.
    FinPart,
}

impl X0Distance {
    pub fn distance(&self, v: &Vector) -> f64 {
        match self {
            X0Distance::Norm => v.norm(),
            X0Distance::Whole => 0.0,
            X0Distance::RightEndpoint => v.samples().last().map_or(0.0, |x| x.abs()),
            X0Distance::Limit => v.limit_at_inf().map_or(0.0, f64::abs),
            X0Distance::FinPart => v.fin_part().iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// A named semigroup together with what is known about it.
#[derive(Clone)]
pub struct SemigroupScenario {
    name: String,
    time_domain: TimeDomain,
    space: AmbientSpace,
    growth_class: GrowthClass,
    known_invariant: Option<Subspace>,
    x0_description: String,
    x0_distance: Option<X0Distance>,
    law_tol: f64,
    horizon: Option<f64>,
    evolve: Evolution,
    lift: Option<Lift>,
}

impl fmt::Debug for SemigroupScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupScenario")
            .field("name", &self.name)
            .field("time_domain", &self.time_domain)
            .field("space", &self.space)
            .field("growth_class", &self.growth_class)
            .field("x0_distance", &self.x0_distance)
            .field("law_tol", &self.law_tol)
            .finish_non_exhaustive()
    }
}

impl SemigroupScenario {
    pub fn new(
        name: impl Into<String>,
        time_domain: TimeDomain,
        space: AmbientSpace,
        growth_class: GrowthClass,
        evolve: Evolution,
    ) -> Self {
        Self {
            name: name.into(),
            time_domain,
            space,
            growth_class,
            known_invariant: None,
            x0_description: String::new(),
            x0_distance: None,
            law_tol: 1e-8,
            horizon: None,
            evolve,
            lift: None,
        }
    }

    pub fn with_x0(mut self, description: impl Into<String>, distance: Option<X0Distance>) -> Self {
        self.x0_description = description.into();
        self.x0_distance = distance;
        self
    }

    pub fn with_known_invariant(mut self, sub: Subspace) -> Self {
        self.known_invariant = Some(sub);
        self
    }

    pub fn with_law_tol(mut self, tol: f64) -> Self {
        self.law_tol = tol;
        self
    }

    /// Largest time for which the discretization is faithful.
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_lift(mut self, lift: Lift) -> Self {
        self.lift = Some(lift);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn time_domain(&self) -> TimeDomain {
        self.time_domain
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn growth_class(&self) -> GrowthClass {
        self.growth_class
    }

    pub fn known_invariant(&self) -> Option<&Subspace> {
        self.known_invariant.as_ref()
    }

    pub fn x0_description(&self) -> &str {
        &self.x0_description
    }

    pub fn x0_distance(&self) -> Option<X0Distance> {
        self.x0_distance
    }

    /// Tolerance of the semigroup law, relative to `1 + ‖v‖`.
    pub fn law_tol(&self) -> f64 {
        self.law_tol
    }

    pub fn horizon(&self) -> Option<f64> {
        self.horizon
    }

    pub fn lift(&self) -> Option<&Lift> {
        self.lift.as_ref()
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(t));
        }
        if self.time_domain == TimeDomain::Discrete && t.fract() != 0.0 {
            return Err(Error::Domain(t));
        }
        Ok(())
    }

    /// `v_t = φ_t(v)`.
    pub fn apply(&self, v: &Vector, t: f64) -> Result<Vector> {
        self.check_time(t)?;
        if v.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        (self.evolve)(v, t)
    }

    /// `‖φ_q(φ_t v) − φ_{t+q} v‖`.
    pub fn law_residual(&self, v: &Vector, t: f64, q: f64) -> Result<f64> {
        let composed = self.apply(&self.apply(v, t)?, q)?;
        let direct = self.apply(v, t + q)?;
        Ok(composed.sub(&direct)?.norm())
    }

    /// `φ_t` applied to every basis vector of `s`.
    pub fn evolve_subspace(&self, s: &Subspace, t: f64) -> Result<Subspace> {
        let basis = s
            .basis()
            .iter()
            .map(|e| self.apply(e, t))
            .collect::<Result<Vec<_>>>()?;
        Subspace::new(basis).map_err(|e| match e {
            Error::DegenerateBasis(msg) => Error::DegenerateBasis(format!("at t = {t}: {msg}")),
            other => other,
        })
    }
}

/// Free-function form of [`SemigroupScenario::law_residual`].
pub fn semigroup_law_residual(sem: &SemigroupScenario, v: &Vector, t: f64, q: f64) -> Result<f64> {
    sem.law_residual(v, t, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_domain_is_enforced() {
        let sem = scenarios::shift_double_discrete(8).unwrap();
        assert!(matches!(sem.check_time(-1.0), Err(Error::Domain(_))));
        assert!(matches!(sem.check_time(0.5), Err(Error::Domain(_))));
        assert!(sem.check_time(3.0).is_ok());
        let cont = scenarios::multiplication_semigroup().unwrap();
        assert!(cont.check_time(0.5).is_ok());
        assert!(cont.check_time(f64::NAN).is_err());
    }

    #[test]
    fn x0_distances() {
        let s = AmbientSpace::grid_sup_with_limit(0.0, 1.0, 0.5).unwrap();
        let v = Vector::from_parts(s, vec![3.0, 1.0, -2.0], Some(-0.5), vec![]).unwrap();
        assert_eq!(X0Distance::Norm.distance(&v), 3.0);
        assert_eq!(X0Distance::Whole.distance(&v), 0.0);
        assert_eq!(X0Distance::RightEndpoint.distance(&v), 2.0);
        assert_eq!(X0Distance::Limit.distance(&v), 0.5);
    }
}
