//! Strong-law verification: `chi_n(t) / n` against the limiting mean.

use crate::harness::report::{ComparisonRow, ExperimentReport};
use crate::harness::stats::sample_stats;
use crate::harness::{chi_matrix, CampaignConfig};
use crate::limits::{limit_mean, SeriesOptions};
use crate::rng::mix_seed;
use crate::Result;

const SERIES_SEED_TAG: u64 = 0x51;

/// For each intensity and grid time, compare the replication mean of
/// `chi_n(t) / n` against the limiting mean. The grid deviation trace across
/// intensities is the functional (sup-metric) proxy: the campaign passes when
/// the largest intensity agrees within 3 pooled standard errors at every time
/// and its deviations improve on the previous intensity at two thirds of the
/// grid.
pub fn run_slln(cfg: &CampaignConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new("slln", cfg.config_echo());

    let series_opts = SeriesOptions {
        seed: mix_seed(cfg.base_seed, SERIES_SEED_TAG),
        ..SeriesOptions::new(cfg.epsilon, cfg.mc_samples, 0)
    };
    let predictions: Vec<(f64, f64)> = cfg
        .t_grid
        .iter()
        .map(|&t| {
            let (lv, _) = limit_mean(t, &cfg.model, &cfg.region, &series_opts)?;
            Ok((lv.value, lv.std_error))
        })
        .collect::<Result<_>>()?;

    let last = cfg.n_values.len() - 1;
    let mut deviations: Vec<Vec<f64>> = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        let chi = chi_matrix(cfg, n, ni)?;
        let mut devs = Vec::new();
        for (ti, &t) in cfg.t_grid.iter().enumerate() {
            let scaled: Vec<f64> = chi.iter().map(|row| row[ti] / n).collect();
            let stats = sample_stats(&scaled);
            let (pred, pred_se) = predictions[ti];
            devs.push((stats.mean - pred).abs());
            report.rows.push(ComparisonRow::new(
                n,
                t,
                None,
                "mean_chi_over_n",
                stats.mean,
                stats.std_error,
                pred,
                pred_se,
                ni == last,
            ));
        }
        deviations.push(devs);
    }

    let gate_ok = report
        .rows
        .iter()
        .filter(|r| r.gated)
        .all(|r| r.within(3.0));
    report.add_verdict(
        "largest_n_within_3_pooled_se",
        gate_ok,
        format!(
            "max |z| at n = {}: {:.3}",
            cfg.n_values[last],
            report
                .rows
                .iter()
                .filter(|r| r.gated)
                .map(|r| r.z.abs())
                .fold(0.0, f64::max)
        ),
    );

    if cfg.n_values.len() >= 2 {
        let improved = deviations[last]
            .iter()
            .zip(&deviations[last - 1])
            .filter(|(now, before)| now < before)
            .count();
        let needed = cfg.t_grid.len().div_ceil(3) * 2;
        report.add_verdict(
            "deviation_shrinks_with_n",
            improved * 3 >= cfg.t_grid.len() * 2,
            format!(
                "deviation smaller at n = {} than n = {} for {improved}/{} grid points (need {needed})",
                cfg.n_values[last],
                cfg.n_values[last - 1],
                cfg.t_grid.len()
            ),
        );
    } else {
        report.add_verdict(
            "deviation_shrinks_with_n",
            true,
            "single intensity; no trace to compare".into(),
        );
    }

    report.seal();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DensityModel;

    #[test]
    fn slln_tracks_the_exponential_at_desk_scale() {
        let mut cfg = CampaignConfig::new(
            DensityModel::unit_cube(1),
            vec![300.0, 3000.0],
            vec![0.25, 0.5, 1.0],
        );
        cfg.replications = 150;
        cfg.base_seed = 41;
        cfg.epsilon = 1e-6;
        cfg.mc_samples = 1000;
        let report = run_slln(&cfg).unwrap();
        assert!(
            report.verdicts[0].passed,
            "gate failed: {:?}",
            report.verdicts
        );
        // Predictions are the closed form in d = 1.
        let gated: Vec<_> = report.rows.iter().filter(|r| r.gated).collect();
        assert_eq!(gated.len(), 3);
        for row in gated {
            assert!((row.predicted - (-2.0 * row.t).exp()).abs() < 1e-5);
            assert_eq!(row.predicted_se, 0.0);
        }
    }

    #[test]
    fn replication_error_shrinks_like_sqrt_n_of_reps() {
        // Doubling the intensity roughly halves the variance of chi/n, and the
        // empirical std error reflects the replication count directly.
        let mut cfg = CampaignConfig::new(
            DensityModel::unit_cube(1),
            vec![500.0],
            vec![0.5],
        );
        cfg.replications = 100;
        cfg.base_seed = 7;
        cfg.mc_samples = 1000;
        let r100 = run_slln(&cfg).unwrap();
        cfg.replications = 400;
        let r400 = run_slln(&cfg).unwrap();
        let se100 = r100.rows[0].empirical_se;
        let se400 = r400.rows[0].empirical_se;
        let ratio = se100 / se400;
        assert!(
            (1.4..2.9).contains(&ratio),
            "se ratio {ratio} not near 2 (se100 {se100}, se400 {se400})"
        );
    }

    #[test]
    fn chi_over_n_at_time_zero_is_poisson_mean() {
        let mut cfg = CampaignConfig::new(
            DensityModel::unit_cube(1),
            vec![400.0],
            vec![0.0, 0.3],
        );
        cfg.replications = 120;
        cfg.base_seed = 3;
        cfg.mc_samples = 1000;
        let report = run_slln(&cfg).unwrap();
        let t0 = &report.rows[0];
        assert_eq!(t0.predicted, 1.0);
        assert!(t0.within(3.0), "z = {}", t0.z);
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let mut cfg = CampaignConfig::new(
            DensityModel::unit_cube(1),
            vec![100.0],
            vec![0.25, 0.5],
        );
        cfg.replications = 30;
        cfg.base_seed = 99;
        cfg.mc_samples = 2000;
        let a = run_slln(&cfg).unwrap().to_json_bytes();
        let b = run_slln(&cfg).unwrap().to_json_bytes();
        assert_eq!(a, b);
    }
}
