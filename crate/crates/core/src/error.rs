use fieldsamp_dynconn::DynConnError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("enumeration over {size} elements exceeds the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error(transparent)]
    DynConn(#[from] DynConnError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
