//! Crate error type.

use thiserror::Error;

/// Errors surfaced by the library and harness.
///
/// Divergence of a solver is *not* an error: it is a measured outcome carried
/// in [`crate::solvers::Trace::diverged_at`] and reported through flags and
/// the CLI exit code.
#[derive(Debug, Error)]
pub enum TvError {
    /// Invalid parameter or problem construction request.
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Configuration file / override problem (missing key, bad value, ...).
    #[error("config error: {0}")]
    Config(String),

    /// Verification check name not present in the catalog.
    #[error("unknown check: {0} (see `list-checks`)")]
    UnknownCheck(String),

    /// A numeric routine failed to reach its tolerance.
    #[error("did not converge: {0}")]
    NoConvergence(String),

    /// Filesystem error while reading configs or writing CSV.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl TvError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        TvError::Invalid(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        TvError::Config(msg.into())
    }
}
