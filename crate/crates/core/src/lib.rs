//! Desk-scale numerics for semigroups of operators on Banach spaces.
//!
//! * [`space`]: discretized normed spaces, subspaces, the minimax
//!   distance-to-subspace solver and the angle metric.
//! * [`semigroup`]: the semigroup abstraction, the worked scenarios, and the
//!   triangular (Duhamel) extension constructor.
//! * [`specialfn`]: sine integral, adaptive quadrature, finite differences.
//! * [`diagnostics`]: decay, the m-functional, angle trajectories, Cauchy
//!   series, growth profiles and invariance checks.
//! * [`registry`]: the named scenario bundles used by the CLI and bindings.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod registry;
pub mod semigroup;
pub mod space;
pub mod specialfn;

pub use error::{Error, Result};
