use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ambient space: {0}")]
    InvalidSpace(String),

    #[error("malformed vector: {0}")]
    MalformedVector(String),

    #[error("vectors live in different ambient spaces")]
    SpaceMismatch,

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("unsupported subspace dimension {dim} (at most {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("minimax solver did not converge after {iterations} iterations (best value {best})")]
    SolverFailure { iterations: usize, best: f64 },

    #[error("time {0} is outside the semigroup's time domain")]
    Domain(f64),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("scenario `{0}` does not support this diagnostic")]
    UnsupportedScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
