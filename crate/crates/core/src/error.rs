use thiserror::Error;

/// Errors produced by the landscape toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} is limited to dimension {max}, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no real solution: {0}")]
    NoRealSolution(String),

    #[error("candidate set is not finite: {0}")]
    UnboundedCandidates(String),

    #[error("series extension stalled: {0}")]
    Stalled(String),

    #[error("newton iteration failed after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("loss is not monotone along {0} within the window")]
    NotMonotone(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
