//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the library. The harness maps these onto process
/// exit codes, so the variants distinguish argument problems from
/// capacity limits and unsupported capabilities.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is out of range, empty, non-finite, or otherwise malformed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A mathematical hypothesis required by the operation does not hold;
    /// the message names the violated bound.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The request exceeds an enumeration or memory budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The operation is not supported for the given distribution family.
    #[error("unsupported capability: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
