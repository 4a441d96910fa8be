use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {n} outside supported range {min}..={max}")]
    UnsupportedDimension { n: usize, min: usize, max: usize },

    #[error("point {bits:#x} does not fit in {n} bits")]
    PointOutOfRange { bits: u64, n: usize },

    #[error("eps = {eps} outside [1/n, 1/2] for n = {n}")]
    EpsOutOfRange { eps: f64, n: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("point set is not contained in the middle layers")]
    NotInMiddleLayers,

    #[error("side length m = {m} must be {expected}")]
    WrongParity { m: usize, expected: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed function file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
