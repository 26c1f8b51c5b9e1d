use thiserror::Error;

/// Errors produced by the exact and numerical routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed textual input (exact fractions, expressions, JSON).
    #[error("parse error: {0}")]
    Parse(String),
    /// A stored value disagrees with a recomputation of the same key.
    #[error("inconsistent table entry: {0}")]
    Inconsistent(String),
    /// An invariant that must hold by construction was violated.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
