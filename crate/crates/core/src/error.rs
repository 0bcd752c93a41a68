use alloc::string::String;

/// Failure classes shared by every module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numeric failure: {what} (error estimate {estimate:e})")]
    Numeric { what: String, estimate: f64 },
    #[error("outside validity range: {0}")]
    OutOfValidity(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn numeric(what: impl Into<String>, estimate: f64) -> Error {
    Error::Numeric {
        what: what.into(),
        estimate,
    }
}
