//! Replication campaigns verifying the limit theorems against simulation.
//!
//! Campaigns are deterministic: replication `r` of the `i`-th intensity runs
//! on the stream `mix_seed(base, i) ^ r`, reports are reduced in replication
//! order, and serialization is stable, so identical configurations produce
//! byte-identical reports.

mod fclt;
mod moments;
mod palm;
mod report;
mod slln;
pub mod stats;

pub use fclt::{fclt_statistics, run_fclt, FcltSamples};
pub use moments::run_moment_asymptotics;
pub use palm::{run_palm_check, PalmConfig};
pub use report::{ComparisonRow, ExperimentReport, Verdict};
pub use slln::run_slln;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::sample_poisson;
use crate::density::DensityModel;
use crate::region::RegionSpec;
use crate::rips::{euler_curve, RipsOptions, DEFAULT_CLIQUE_BUDGET};
use crate::rng::{mix_seed, replication_seed};
use crate::scaling::ScalingContext;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub model: DensityModel,
    /// Increasing intensities; only the largest is gated.
    pub n_values: Vec<f64>,
    /// Increasing evaluation times.
    pub t_grid: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
    /// Truncation budget for the limit series.
    pub epsilon: f64,
    /// Monte Carlo samples per series term.
    pub mc_samples: u64,
    pub region: RegionSpec,
    pub dim_cap: Option<usize>,
    /// Refuse dim-capped (inexact) curves; required for acceptance runs.
    pub require_exact: bool,
    pub clique_budget: u64,
}

impl CampaignConfig {
    pub fn new(model: DensityModel, n_values: Vec<f64>, t_grid: Vec<f64>) -> Self {
        Self {
            model,
            n_values,
            t_grid,
            replications: 200,
            base_seed: 0,
            epsilon: 1e-4,
            mc_samples: 100_000,
            region: RegionSpec::AllSpace,
            dim_cap: None,
            require_exact: true,
            clique_budget: DEFAULT_CLIQUE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.region.validate(self.model.dimension)?;
        if self.replications < 2 {
            return Err(Error::TooFewReplications { got: self.replications, min: 2 });
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|n| !(*n > 0.0)) {
            return Err(Error::InvalidParameter(
                "n_values must be nonempty and positive".into(),
            ));
        }
        if self.n_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("n_values must be increasing".into()));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidParameter(
                "t_grid must be nonempty and nonnegative".into(),
            ));
        }
        if self.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("t_grid must be increasing".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidParameter("mc_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn config_echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config echo")
    }
}

/// `replications x |t_grid|` matrix of `chi_{n,A}(t)` values for one
/// intensity, simulated in parallel with per-replication seed streams.
pub(crate) fn chi_matrix(cfg: &CampaignConfig, n: f64, n_index: usize) -> Result<Vec<Vec<f64>>> {
    let ctx = ScalingContext::new(n, cfg.model.dimension)?;
    let t_max = *cfg.t_grid.last().expect("validated grid");
    let sub_base = mix_seed(cfg.base_seed, n_index as u64);
    let opts = RipsOptions { dim_cap: cfg.dim_cap, budget: cfg.clique_budget };
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(sub_base, rep as u64);
            let cloud = sample_poisson(&cfg.model, ctx, seed)?;
            let curve = euler_curve(&cloud, t_max, &cfg.region, &opts)?;
            if cfg.require_exact && curve.meta.truncated {
                return Err(Error::TruncatedCurve);
            }
            Ok(cfg
                .t_grid
                .iter()
                .map(|&t| curve.value_at(t) as f64)
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> CampaignConfig {
        let mut cfg = CampaignConfig::new(
            DensityModel::unit_cube(1),
            vec![50.0, 200.0],
            vec![0.25, 0.5],
        );
        cfg.replications = 40;
        cfg.base_seed = 11;
        cfg.epsilon = 1e-4;
        cfg.mc_samples = 10_000;
        cfg
    }

    #[test]
    fn validation_catches_bad_campaigns() {
        let mut cfg = small_cfg();
        cfg.replications = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.n_values = vec![200.0, 50.0];
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.t_grid = vec![0.5, 0.25];
        assert!(cfg.validate().is_err());
        assert!(small_cfg().validate().is_ok());
    }

    #[test]
    fn chi_matrix_is_deterministic() {
        let cfg = small_cfg();
        let a = chi_matrix(&cfg, 200.0, 1).unwrap();
        let b = chi_matrix(&cfg, 200.0, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), cfg.replications);
        assert_eq!(a[0].len(), cfg.t_grid.len());
    }

    #[test]
    fn capped_curves_are_refused_for_exact_runs() {
        let mut cfg = small_cfg();
        cfg.dim_cap = Some(0);
        let err = chi_matrix(&cfg, 200.0, 0).unwrap_err();
        assert!(matches!(err, Error::TruncatedCurve));
    }
}
