use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {what} (residual {residual:e})")]
    Precondition { what: String, residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Shape(msg.into()))
}
