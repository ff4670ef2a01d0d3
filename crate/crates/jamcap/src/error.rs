//! Error type shared by every module in the crate.

use thiserror::Error;

/// Unified error for parameter validation, infeasible policies, unstable
/// regimes, solver breakdown, and under-sampled statistics.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A jamming policy violates the stability feasibility region.
    #[error("infeasible policy: {0}")]
    InfeasiblePolicy(String),

    /// An operation that requires a stable system was invoked with offered
    /// load at or above one.
    #[error("unstable system: {0}")]
    Unstable(String),

    /// The stationary solver failed to reach its residual target.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} sweeps")]
    NonConverged { residual: f64, iterations: u64 },

    /// A statistic was requested from a run with too little data to support it.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A malformed configuration value (CLI-facing helpers).
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
