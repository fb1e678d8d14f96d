use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The variants mirror the failure classes the command line maps onto exit
/// codes: input problems are the caller's fault, consistency failures are ours.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("float oracle failure: {0}")]
    OracleFailure(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that indicate a bug or an inconsistent computation
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalConsistency(_) | Error::OracleFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InternalConsistency(msg.into()))
}
