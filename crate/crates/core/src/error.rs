use thiserror::Error;

#[derive(Debug, Error)]
pub enum PercError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("region mismatch: {0}")]
    RegionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no crossing: {0}")]
    NoCrossing(String),
    #[error("no boundary: {0}")]
    NoBoundary(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PercError>;
