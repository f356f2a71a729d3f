use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad polynomial text, non-monic level, ...).
    #[error("input error: {0}")]
    Input(String),
    /// A mathematical precondition failed (zero divisor, singular matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A runtime self-check failed; this indicates a bug.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("timeout")]
    Timeout,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
