use thiserror::Error;

/// Errors produced by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: best estimate {value} (error estimate {err_estimate})")]
    NoConvergence { value: f64, err_estimate: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("optimisation failed: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
