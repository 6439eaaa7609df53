use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("query point outside the domain: {0}")]
    Domain(String),

    /// The difference quotients collapsed to zero, which happens when the
    /// profile derivative at the anchor point vanishes.
    #[error("degenerate derivative estimate: {0}")]
    Degenerate(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("work limit exceeded: {required} > {limit}")]
    WorkLimit { required: u128, limit: u128 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
