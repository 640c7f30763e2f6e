use thiserror::Error;

/// Failures shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point is not on the curve: {0}")]
    NotOnCurve(String),
    #[error("singular model: {0}")]
    Singular(String),
    /// Two independent computations of the same quantity disagree.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("p-adic precision exhausted: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
