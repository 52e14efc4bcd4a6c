use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MvError {
    #[error("range error: {0}")]
    Range(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver failed at sigma = {sigma}: {reason}")]
    Solver { sigma: f64, reason: String },

    #[error("target rho = {rho} unreachable at tau = {tau}")]
    Unreachable { rho: f64, tau: f64 },

    #[error("no region: {0}")]
    NoRegion(String),

    #[error("quadrature did not converge: value {value}, error estimate {error}")]
    Accuracy { value: f64, error: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, MvError>;

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(MvError::Range(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(MvError::Unsupported(msg.into()))
}
