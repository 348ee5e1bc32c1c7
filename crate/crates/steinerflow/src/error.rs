//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid interval set: {0}")]
    InvalidIntervalSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evolution time {t} reaches the next merge at {t_merge}; step through the merge event instead")]
    EvolvePastMerge { t: f64, t_merge: f64 },

    #[error("merge time mismatch: requested {requested}, next merge at {actual}")]
    MergeTimeMismatch { requested: f64, actual: f64 },

    #[error("wall shrink progress must not decrease (current {current}, requested {requested})")]
    EtaDecrease { current: f64, requested: f64 },

    #[error("flow time must not decrease (current {current}, requested {requested})")]
    TimeDecrease { current: f64, requested: f64 },

    #[error("rasterization produced no interior nodes")]
    EmptyRasterization,

    #[error("grid geometry mismatch between masks")]
    GridMismatch,

    #[error("masks are not nested: free nodes of the smaller mask must be free in the larger")]
    NotNested,

    #[error("solver did not converge within {max_iters} iterations (residual {residual:.3e})")]
    SolverDiverged { max_iters: usize, residual: f64 },

    #[error("solver inconsistency: {0}")]
    SolverInconsistency(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown demo domain '{0}'")]
    UnknownDemo(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
