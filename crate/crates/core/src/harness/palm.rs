//! Palm-identity verification: moments of simplex counts over the Poisson
//! process against i.i.d.-sample expectations with combinatorial prefactors.
//!
//! First-order identity: `E[S_k] = n^(k+1)/(k+1)! * E[h(Y)]` for `k+1`
//! i.i.d. points `Y`. Second-order: the count of ordered simplex pairs
//! sharing exactly `l` vertices equals
//! `n^(2k+2-l) / (l! ((k+1-l)!)^2) * E[h(Y1) h(Y2)]` with the two argument
//! sets sharing exactly `l` of their i.i.d. points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::sample_poisson;
use crate::density::DensityModel;
use crate::harness::report::{ComparisonRow, ExperimentReport};
use crate::harness::stats::sample_stats;
use crate::limits::factorial;
use crate::rips::{collect_k_simplices_at_radius, simplex_counts_at_radius, RipsOptions,
    DEFAULT_CLIQUE_BUDGET};
use crate::rng::{mix_seed, replication_seed, rng_from_seed};
use crate::scaling::ScalingContext;
use crate::{Error, Result};

const SIM_SEED_TAG: u64 = 0x9A;
const MC_SEED_TAG: u64 = 0x9B;
const PAIR_MC_SEED_TAG: u64 = 0x9C;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmConfig {
    pub model: DensityModel,
    pub n: f64,
    /// Simplex dimension under test.
    pub k: usize,
    /// Unscaled ball radius; simplices form at pairwise distance `<= 2 radius`.
    pub radius: f64,
    pub replications: usize,
    /// i.i.d. samples for the right-hand side expectation.
    pub mc_samples: u64,
    pub base_seed: u64,
    pub clique_budget: u64,
    /// Also verify the pair identity for overlaps 0 and 1 (k >= 1 only).
    pub check_pairs: bool,
}

impl PalmConfig {
    pub fn new(model: DensityModel, n: f64, k: usize, radius: f64) -> Self {
        Self {
            model,
            n,
            k,
            radius,
            replications: 500,
            mc_samples: 200_000,
            base_seed: 0,
            clique_budget: DEFAULT_CLIQUE_BUDGET,
            check_pairs: false,
        }
    }

    fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.n > 0.0) {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::InvalidParameter("radius must be nonnegative".into()));
        }
        if self.replications < 2 {
            return Err(Error::TooFewReplications { got: self.replications, min: 2 });
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidParameter("mc_samples must be positive".into()));
        }
        Ok(())
    }
}

/// Indicator that `count` i.i.d. model draws form a simplex at the radius.
fn iid_simplex_indicator(
    model: &DensityModel,
    count: usize,
    threshold2: f64,
    rng: &mut crate::rng::SimRng,
    buf: &mut Vec<Vec<f64>>,
) -> Result<bool> {
    buf.clear();
    let mut pt = Vec::new();
    for i in 0..count {
        model.sample_point(rng, &mut pt)?;
        for prev in buf.iter().take(i) {
            let d2: f64 = prev
                .iter()
                .zip(&pt)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 > threshold2 {
                return Ok(false);
            }
        }
        buf.push(pt.clone());
    }
    Ok(true)
}

fn overlap_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

pub fn run_palm_check(cfg: &PalmConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::new(
        "palm-check",
        serde_json::to_value(cfg).expect("config echo"),
    );
    let ctx = ScalingContext::new(cfg.n, cfg.model.dimension)?;
    let sim_base = mix_seed(cfg.base_seed, SIM_SEED_TAG);
    let threshold2 = (2.0 * cfg.radius) * (2.0 * cfg.radius);
    let opts = RipsOptions { dim_cap: Some(cfg.k), budget: cfg.clique_budget };

    // Simulation side: S_k over replications, plus pair-overlap counts.
    let per_rep: Result<Vec<(f64, f64, f64)>> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(sim_base, rep as u64);
            let cloud = sample_poisson(&cfg.model, ctx, seed)?;
            if !cfg.check_pairs {
                let (counts, _) = simplex_counts_at_radius(&cloud, cfg.radius, &opts)?;
                let s_k = counts.get(cfg.k).copied().unwrap_or(0) as f64;
                return Ok((s_k, 0.0, 0.0));
            }
            let simplices =
                collect_k_simplices_at_radius(&cloud, cfg.k, cfg.radius, cfg.clique_budget)?;
            let s_k = simplices.len() as f64;
            let mut pairs0 = 0u64;
            let mut pairs1 = 0u64;
            for i in 0..simplices.len() {
                for j in (i + 1)..simplices.len() {
                    match overlap_size(&simplices[i], &simplices[j]) {
                        0 => pairs0 += 1,
                        1 => pairs1 += 1,
                        _ => {}
                    }
                }
            }
            // Ordered pairs of distinct subsets.
            Ok((s_k, 2.0 * pairs0 as f64, 2.0 * pairs1 as f64))
        })
        .collect();
    let per_rep = per_rep?;
    let s_values: Vec<f64> = per_rep.iter().map(|r| r.0).collect();
    let stats = sample_stats(&s_values);

    // Right-hand side: n^(k+1)/(k+1)! E[h].
    let (pred, pred_se) = if cfg.k == 0 {
        (cfg.n, 0.0)
    } else {
        let scale = cfg.n.powi(cfg.k as i32 + 1) / factorial(cfg.k + 1);
        let mut rng = rng_from_seed(mix_seed(cfg.base_seed, MC_SEED_TAG));
        let mut buf = Vec::new();
        let mut hits = 0u64;
        for _ in 0..cfg.mc_samples {
            if iid_simplex_indicator(&cfg.model, cfg.k + 1, threshold2, &mut rng, &mut buf)? {
                hits += 1;
            }
        }
        let p = hits as f64 / cfg.mc_samples as f64;
        let se = (p * (1.0 - p) / cfg.mc_samples as f64).sqrt();
        (scale * p, scale * se)
    };
    report.rows.push(ComparisonRow::new(
        cfg.n,
        cfg.radius,
        None,
        &format!("mean_simplex_count_k{}", cfg.k),
        stats.mean,
        stats.std_error,
        pred,
        pred_se,
        true,
    ));

    if cfg.check_pairs && cfg.k >= 1 {
        for (ell, col) in [(0usize, 1usize), (1, 2)] {
            let values: Vec<f64> = per_rep
                .iter()
                .map(|r| if col == 1 { r.1 } else { r.2 })
                .collect();
            let sim = sample_stats(&values);
            let scale = cfg.n.powi((2 * cfg.k + 2 - ell) as i32)
                / (factorial(ell) * factorial(cfg.k + 1 - ell).powi(2));
            let draw_count = 2 * (cfg.k + 1) - ell;
            let mut rng = rng_from_seed(mix_seed(cfg.base_seed, PAIR_MC_SEED_TAG + ell as u64));
            let mut buf = Vec::new();
            let mut pt = Vec::new();
            let mut hits = 0u64;
            for _ in 0..cfg.mc_samples {
                // Draw the union, then test both overlapping argument sets.
                buf.clear();
                for _ in 0..draw_count {
                    cfg.model.sample_point(&mut rng, &mut pt)?;
                    buf.push(pt.clone());
                }
                let first = &buf[0..cfg.k + 1];
                let second: Vec<&Vec<f64>> = buf[0..ell]
                    .iter()
                    .chain(buf[cfg.k + 1..].iter())
                    .collect();
                if simplex_of(first, threshold2) && simplex_of_refs(&second, threshold2) {
                    hits += 1;
                }
            }
            let p = hits as f64 / cfg.mc_samples as f64;
            let se = (p * (1.0 - p) / cfg.mc_samples as f64).sqrt();
            report.rows.push(ComparisonRow::new(
                cfg.n,
                cfg.radius,
                None,
                &format!("ordered_pairs_overlap_{ell}"),
                sim.mean,
                sim.std_error,
                scale * p,
                scale * se,
                true,
            ));
        }
    }

    let all_ok = report.rows.iter().all(|r| r.within(3.0));
    report.add_verdict(
        "palm_identities_within_3_pooled_se",
        all_ok,
        format!(
            "max |z| = {:.3} over {} identities",
            report.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max),
            report.rows.len()
        ),
    );
    report.seal();
    Ok(report)
}

fn simplex_of(points: &[Vec<f64>], threshold2: f64) -> bool {
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 > threshold2 {
                return false;
            }
        }
    }
    true
}

fn simplex_of_refs(points: &[&Vec<f64>], threshold2: f64) -> bool {
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d2: f64 = points[i]
                .iter()
                .zip(points[j].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 > threshold2 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_count_identity_is_exact_in_expectation() {
        let mut cfg = PalmConfig::new(DensityModel::unit_cube(1), 100.0, 0, 0.05);
        cfg.replications = 400;
        cfg.base_seed = 31;
        let report = run_palm_check(&cfg).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.predicted, 100.0);
        assert!(row.within(3.0), "z = {}", row.z);
    }

    #[test]
    fn edge_count_matches_analytic_value() {
        // d = 1 uniform, a = 2r = 0.1: E[S_1] = (n^2/2)(2a - a^2) = 950 at n = 100.
        let mut cfg = PalmConfig::new(DensityModel::unit_cube(1), 100.0, 1, 0.05);
        cfg.replications = 300;
        cfg.mc_samples = 300_000;
        cfg.base_seed = 12;
        let report = run_palm_check(&cfg).unwrap();
        let row = &report.rows[0];
        let analytic = 100.0f64.powi(2) / 2.0 * (2.0 * 0.1 - 0.1 * 0.1);
        assert!((analytic - 950.0).abs() < 1e-9);
        // Simulation against the Palm right-hand side.
        assert!(row.within(3.0), "z = {}", row.z);
        // Simulation against the analytic oracle directly.
        let z_analytic = (row.empirical - analytic) / row.empirical_se;
        assert!(z_analytic.abs() <= 3.0, "z vs analytic = {z_analytic}");
    }

    #[test]
    fn pair_identities_for_small_k() {
        let mut cfg = PalmConfig::new(DensityModel::unit_cube(1), 60.0, 1, 0.04);
        cfg.replications = 250;
        cfg.mc_samples = 400_000;
        cfg.base_seed = 77;
        cfg.check_pairs = true;
        let report = run_palm_check(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            assert!(
                row.within(3.0),
                "{}: emp {} vs pred {} (z = {})",
                row.statistic,
                row.empirical,
                row.predicted,
                row.z
            );
        }
        assert!(report.passed);
    }
}
