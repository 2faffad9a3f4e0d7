use thiserror::Error;

/// Errors raised when an operation's preconditions are violated or a
/// numerical procedure cannot deliver the requested accuracy.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("outcome density {density:e} at x = {x} is below the support threshold")]
    OutOfSupport { x: f64, density: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error("objective is unbounded: {0}")]
    Unbounded(String),

    #[error("no interior minimum in [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("syndrome {0:?} matches no decoder case")]
    UnmatchedSyndrome([i8; 3]),

    #[error("requested branch has zero probability")]
    ZeroProbability,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
