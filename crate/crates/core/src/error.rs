//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: density model is {model_dim}-dimensional but scaling context is {ctx_dim}-dimensional")]
    DimensionMismatch { model_dim: usize, ctx_dim: usize },

    #[error("rejection sampler exceeded {attempts} attempts for a single point; the density support looks malformed")]
    RejectionCapExceeded { attempts: u64 },

    #[error("clique budget of {budget} exceeded during enumeration")]
    CliqueBudgetExceeded { budget: u64 },

    #[error("series cap of {cap} terms exceeded (a_t = {a_t:.6}); t or the density sup-norm is out of tractable range")]
    SeriesCapExceeded { cap: usize, a_t: f64 },

    #[error("covariance factorization failed after maximal jitter {max_jitter:.3e}")]
    FactorizationFailed { max_jitter: f64 },

    #[error("curve was truncated by dim_cap; exact curves are required here")]
    TruncatedCurve,

    #[error("replication count {got} is too small; at least {min} required")]
    TooFewReplications { got: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Guard trips (resource/stability aborts) as opposed to validation errors.
    pub fn is_guard_trip(&self) -> bool {
        matches!(
            self,
            Error::CliqueBudgetExceeded { .. }
                | Error::SeriesCapExceeded { .. }
                | Error::FactorizationFailed { .. }
                | Error::RejectionCapExceeded { .. }
        )
    }
}
