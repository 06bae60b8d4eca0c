//! Central-limit verification: the centered, `n^(-1/2)`-scaled vector of
//! `chi_n(t)` values against the limit Gaussian covariance, with normality
//! diagnostics per coordinate and on random one-dimensional projections.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::harness::report::{ComparisonRow, ExperimentReport};
use crate::harness::stats::{covariance_entry_se, covariance_matrix, normality_battery};
use crate::harness::{chi_matrix, CampaignConfig};
use crate::limits::{build_covariance_grid, CovarianceGrid, SeriesOptions};
use crate::rng::{mix_seed, rng_from_seed};
use crate::{Error, Result};

const GRID_SEED_TAG: u64 = 0xF1;
const PROJECTION_SEED_TAG: u64 = 0xF2;
const PROJECTIONS: usize = 5;
const MIN_REPLICATIONS: usize = 100;

/// Centered and scaled replication vectors ready for distributional checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcltSamples {
    pub t_grid: Vec<f64>,
    pub n: f64,
    /// Rows are replications of `(chi_n(t_i) - mean) / sqrt(n)`.
    pub scaled: Vec<Vec<f64>>,
}

impl FcltSamples {
    /// Center by the empirical replication mean and scale by `n^(-1/2)`.
    ///
    /// Empirical-mean centering biases the plain covariance by `(R-1)/R`;
    /// downstream estimation always uses the unbiased `R-1` denominator,
    /// which is exactly that correction.
    pub fn from_raw(t_grid: Vec<f64>, n: f64, raw: &[Vec<f64>]) -> Self {
        let reps = raw.len();
        let g = t_grid.len();
        let mut mean = vec![0.0; g];
        for row in raw {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= reps as f64;
        }
        let scale = n.sqrt();
        let scaled = raw
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&mean)
                    .map(|(v, m)| (v - m) / scale)
                    .collect()
            })
            .collect();
        Self { t_grid, n, scaled }
    }
}

/// Compare empirical covariance of the scaled vectors against a predicted
/// covariance grid and run the normality batteries. Pure in its inputs, so
/// synthetic Gaussian data can exercise the same verdict path.
pub fn fclt_statistics(
    samples: &FcltSamples,
    predicted: &CovarianceGrid,
    seed: u64,
    report: &mut ExperimentReport,
) -> Result<()> {
    let g = samples.t_grid.len();
    let reps = samples.scaled.len();
    if reps < MIN_REPLICATIONS {
        return Err(Error::TooFewReplications { got: reps, min: MIN_REPLICATIONS });
    }
    if predicted.size() != g {
        return Err(Error::InvalidParameter(
            "prediction grid does not match the sample grid".into(),
        ));
    }

    let cov = covariance_matrix(&samples.scaled);
    for i in 0..g {
        for j in i..g {
            report.rows.push(ComparisonRow::new(
                samples.n,
                samples.t_grid[i],
                Some(samples.t_grid[j]),
                "covariance",
                cov[i][j],
                covariance_entry_se(&cov, i, j, reps),
                predicted.matrix[i][j],
                predicted.std_errors[i][j],
                true,
            ));
        }
    }
    let cov_ok = report.rows.iter().all(|r| r.within(3.0));
    report.add_verdict(
        "covariance_within_3_pooled_se",
        cov_ok,
        format!(
            "max |z| = {:.3} over {} entries",
            report.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max),
            report.rows.len()
        ),
    );

    // Per-coordinate batteries, then random unit projections.
    for (i, &t) in samples.t_grid.iter().enumerate() {
        let coord: Vec<f64> = samples.scaled.iter().map(|row| row[i]).collect();
        report
            .normality
            .push(normality_battery(&format!("coordinate t={t}"), &coord));
    }
    let mut rng = rng_from_seed(mix_seed(seed, PROJECTION_SEED_TAG));
    for p in 0..PROJECTIONS {
        let mut dir: Vec<f64> = (0..g).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut dir {
            *v /= norm;
        }
        let proj: Vec<f64> = samples
            .scaled
            .iter()
            .map(|row| row.iter().zip(&dir).map(|(a, b)| a * b).sum())
            .collect();
        report
            .normality
            .push(normality_battery(&format!("projection {}", p + 1), &proj));
    }
    let total = 3 * report.normality.len();
    let passed: usize = report.normality.iter().map(|r| r.passes()).sum();
    let fraction = passed as f64 / total as f64;
    report.normality_pass_fraction = Some(fraction);
    report.add_verdict(
        "normality_pass_fraction_at_least_090",
        fraction >= 0.9,
        format!("{passed}/{total} diagnostics passed ({fraction:.3})"),
    );
    Ok(())
}

/// Simulate at the largest intensity and verify finite-dimensional
/// Gaussianity against the limit covariance.
pub fn run_fclt(cfg: &CampaignConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.replications < MIN_REPLICATIONS {
        return Err(Error::TooFewReplications {
            got: cfg.replications,
            min: MIN_REPLICATIONS,
        });
    }
    let mut report = ExperimentReport::new("fclt", cfg.config_echo());
    let n_index = cfg.n_values.len() - 1;
    let n = cfg.n_values[n_index];
    let raw = chi_matrix(cfg, n, n_index)?;
    let samples = FcltSamples::from_raw(cfg.t_grid.clone(), n, &raw);

    let series_opts = SeriesOptions {
        seed: mix_seed(cfg.base_seed, GRID_SEED_TAG),
        ..SeriesOptions::new(cfg.epsilon, cfg.mc_samples, 0)
    };
    let predicted = build_covariance_grid(&cfg.t_grid, &cfg.model, &cfg.region, &series_opts)?;

    fclt_statistics(&samples, &predicted, cfg.base_seed, &mut report)?;
    report.seal();
    Ok(report)
}
