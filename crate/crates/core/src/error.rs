//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain (e.g. rotation beyond the extremal value).
    #[error("domain error: {0}")]
    Domain(String),
    /// A solver or quadrature failed to reach its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Malformed invocation or configuration.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract: 1 domain, 2 numerical, 3 usage/environment.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 1,
            Error::Numerical(_) => 2,
            Error::Usage(_) => 3,
            Error::Io(_) => 3,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
