//! Limit formulas for the Euler characteristic process.
//!
//! The limiting mean is the alternating series over the diagonal functionals
//! `psi_{k+1,k,k}(t,t)`, and the limit covariance is the alternating double
//! series over `Psi_{k1,k2}(t,s)`. Both are truncated with certified tails
//! driven by `a_t = (2t)^d * theta_d * ||f||_inf`: the k-th mean term is
//! bounded by `a_t^k / (k+1)!` and each covariance term by
//! `a^(k1+k2+1-j) / (j! (k1+1-j)! (k2+1-j)!)`.

mod cov_grid;
mod gp;
mod psi;
mod series;
mod volume;

pub use cov_grid::{build_covariance_grid, CovarianceGrid};
pub use gp::{gp_increment_check, gp_sample, GPPath, IncrementPair, IncrementReport};
pub use psi::{psi, write_psi_csv, PsiParams};
pub use series::{
    ball_volume, limit_covariance, limit_mean, theta_d, unit_ball_volume, LimitValue,
    SeriesOptions, SeriesTruncation,
};
pub use volume::{
    indicator_volume, indicator_volume_mc, EstimateMethod, IndicatorVolumeQuery, PsiEstimate,
};

/// Exact factorial as f64 (exact through 22!, correctly rounded beyond).
pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
