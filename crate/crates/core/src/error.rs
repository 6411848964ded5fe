use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inversion unstable at t = {t:e}: order-halving discrepancy {discrepancy:.3e}")]
    InversionInstability { t: f64, discrepancy: f64 },

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("process is not transient in d = {d} ({verdict})")]
    NotTransient { d: u32, verdict: String },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("simulation failed: {0}")]
    Simulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
