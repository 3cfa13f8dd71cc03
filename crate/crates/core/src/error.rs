use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature row {index} has norm {norm} > 1")]
    FeatureNorm { index: usize, norm: f64 },

    #[error("arm mean {value} at index {index} outside [0,1]")]
    MeanOutOfRange { index: usize, value: f64 },

    #[error("malformed action: {0}")]
    MalformedAction(String),

    #[error("Cholesky factorization failed at pivot {0}; regression state is corrupted")]
    CholeskyBreakdown(usize),

    #[error("action space too large: {candidates} candidates exceed the {limit} limit")]
    ActionSpaceTooLarge { candidates: u64, limit: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
