use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("no phase transition: {0}")]
    NoTransition(String),
    #[error("theta grids differ: {0}")]
    GridMismatch(String),
    #[error("parameter regime violated: {0}")]
    Regime(String),
    #[error("insufficient span: {0}")]
    InsufficientSpan(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("misaligned grid: {0}")]
    Misaligned(String),
    #[error("sampling guard: {0}")]
    Guard(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn spec<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Spec(msg.into()))
}
