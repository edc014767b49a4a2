use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// printed directly on the diagnostic stream by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not enough multipliers: {0}")]
    NotEnoughMultipliers(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
