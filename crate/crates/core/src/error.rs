use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants carry enough context to be rendered as a machine-readable
/// diagnostic by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("origin is not an interior point of the polytope")]
    OriginNotInterior,

    #[error("origin lies on the polytope boundary (polar set is unbounded)")]
    UnboundedPolar,

    #[error("exact computation limited to dimension <= {max}, got {dim}")]
    DimensionTooHigh { dim: usize, max: usize },

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("uncertainty set for constraint '{0}' is empty")]
    EmptyUncertaintySet(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("optimal value is not finite")]
    NuNotFinite,

    #[error("strong Slater condition could not be certified (rho* = {rho})")]
    SlaterFailed { rho: f64 },

    #[error("problem is not in the interior of the solvable set: {0}")]
    NotInteriorSolvable(String),

    #[error("epsilon {eps} must satisfy 0 < eps < {limit}")]
    EpsilonTooLarge { eps: f64, limit: f64 },

    #[error("eta {eta} must satisfy 0 < eta < {limit}")]
    EtaTooLarge { eta: f64, limit: f64 },

    #[error("problem is not solvable")]
    NotSolvable,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
