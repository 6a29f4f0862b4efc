use thiserror::Error;

/// Errors raised by the scheduling pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scenario or topology is malformed or incomplete.
    #[error("configuration error: {0}")]
    Config(String),
    /// A documented precondition does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An internal consistency check failed. Indicates a bug or an input that
    /// breaks an assumption the caller claimed to hold.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
