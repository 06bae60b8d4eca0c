//! Sampling the limiting Gaussian process from a covariance grid, and the
//! increment-variance diagnostic behind its path regularity.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::limits::cov_grid::{CovarianceGrid, MAX_JITTER_FRACTION};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// One zero-mean Gaussian path on the grid; deterministic given
/// `(CovarianceGrid, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPPath {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
}

/// Draw one path through a symmetric (Cholesky) factorization of the
/// repaired covariance, escalating temporary jitter up to
/// `1e-8 * trace` if the matrix sits on the PSD boundary.
pub fn gp_sample(cov: &CovarianceGrid, seed: u64) -> Result<GPPath> {
    let g = cov.size();
    let mut rng = rng_from_seed(seed);
    let z: Vec<f64> = (0..g).map(|_| StandardNormal.sample(&mut rng)).collect();

    if cov.matrix.iter().flatten().all(|v| *v == 0.0) {
        return Ok(GPPath { t_grid: cov.t_grid.clone(), values: vec![0.0; g], seed });
    }

    let factor = cholesky_with_jitter(cov)?;
    let values = factor * DVector::from_vec(z);
    Ok(GPPath {
        t_grid: cov.t_grid.clone(),
        values: values.iter().copied().collect(),
        seed,
    })
}

fn cholesky_with_jitter(cov: &CovarianceGrid) -> Result<DMatrix<f64>> {
    let base = cov.to_dmatrix();
    if let Some(ch) = Cholesky::new(base.clone()) {
        return Ok(ch.l());
    }
    let trace = cov.trace().abs();
    let max_jitter = MAX_JITTER_FRACTION * trace;
    let mut jitter = 1e-12 * trace;
    while jitter > 0.0 && jitter <= max_jitter {
        let mut m = base.clone();
        for i in 0..cov.size() {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok(ch.l());
        }
        jitter *= 10.0;
    }
    Err(Error::FactorizationFailed { max_jitter })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementPair {
    pub t_lo: f64,
    pub t_hi: f64,
    /// `E[(H(t_hi) - H(t_lo))^2] = c(hi,hi) - 2 c(lo,hi) + c(lo,lo)`.
    pub variance: f64,
    /// Variance per unit time.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementReport {
    pub pairs: Vec<IncrementPair>,
    /// Smallest admissible `C` in `E[(H(t)-H(s))^2] <= C (t - s)` over
    /// adjacent grid pairs.
    pub fitted_c: f64,
    /// An increment variance fell below what entry noise can explain.
    pub negative_increment: bool,
}

/// Check the linear increment-variance bound on all adjacent grid pairs.
pub fn gp_increment_check(cov: &CovarianceGrid) -> IncrementReport {
    let g = cov.size();
    let mut pairs = Vec::new();
    let mut fitted_c: f64 = 0.0;
    let mut negative = false;
    for i in 0..g.saturating_sub(1) {
        let (lo, hi) = (cov.t_grid[i], cov.t_grid[i + 1]);
        let dt = hi - lo;
        let variance =
            cov.matrix[i + 1][i + 1] - 2.0 * cov.matrix[i][i + 1] + cov.matrix[i][i];
        let noise = 3.0
            * (cov.std_errors[i + 1][i + 1].powi(2)
                + 4.0 * cov.std_errors[i][i + 1].powi(2)
                + cov.std_errors[i][i].powi(2))
            .sqrt();
        if variance < -noise {
            negative = true;
        }
        let slope = if dt > 0.0 { variance / dt } else { f64::INFINITY };
        fitted_c = fitted_c.max(slope.max(0.0));
        pairs.push(IncrementPair { t_lo: lo, t_hi: hi, variance, slope });
    }
    IncrementReport { pairs, fitted_c, negative_increment: negative }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::mix_seed;

    #[test]
    fn single_point_grid_reproduces_the_variance() {
        let v = 2.5;
        let cov = CovarianceGrid::from_matrix(vec![0.5], vec![vec![v]]).unwrap();
        let draws = 10_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..draws {
            let path = gp_sample(&cov, mix_seed(3, i)).unwrap();
            sum += path.values[0];
            sumsq += path.values[0] * path.values[0];
        }
        let mean = sum / draws as f64;
        let var = sumsq / draws as f64 - mean * mean;
        assert!(
            (var - v).abs() / v < 0.05,
            "empirical variance {var} vs {v}"
        );
    }

    #[test]
    fn zero_matrix_gives_zero_paths() {
        let cov =
            CovarianceGrid::from_matrix(vec![0.1, 0.4], vec![vec![0.0; 2], vec![0.0; 2]]).unwrap();
        let path = gp_sample(&cov, 99).unwrap();
        assert_eq!(path.values, vec![0.0, 0.0]);
    }

    #[test]
    fn paths_are_deterministic_per_seed() {
        let cov = CovarianceGrid::from_matrix(
            vec![0.25, 0.5, 1.0],
            vec![
                vec![1.0, 0.6, 0.3],
                vec![0.6, 1.2, 0.7],
                vec![0.3, 0.7, 1.5],
            ],
        )
        .unwrap();
        assert_eq!(gp_sample(&cov, 5).unwrap(), gp_sample(&cov, 5).unwrap());
        assert_ne!(
            gp_sample(&cov, 5).unwrap().values,
            gp_sample(&cov, 6).unwrap().values
        );
    }

    #[test]
    fn empirical_covariance_matches_input() {
        let cov = CovarianceGrid::from_matrix(
            vec![0.25, 0.5, 1.0],
            vec![
                vec![1.0, 0.6, 0.3],
                vec![0.6, 1.2, 0.7],
                vec![0.3, 0.7, 1.5],
            ],
        )
        .unwrap();
        let draws = 20_000usize;
        let g = 3;
        let mut acc = vec![vec![0.0; g]; g];
        for i in 0..draws {
            let p = gp_sample(&cov, mix_seed(11, i as u64)).unwrap();
            for a in 0..g {
                for b in 0..g {
                    acc[a][b] += p.values[a] * p.values[b];
                }
            }
        }
        for a in 0..g {
            for b in 0..g {
                let emp = acc[a][b] / draws as f64;
                let want = cov.matrix[a][b];
                // MC se of a second moment of Gaussians.
                let se = ((cov.matrix[a][a] * cov.matrix[b][b] + want * want) / draws as f64)
                    .sqrt();
                assert!(
                    (emp - want).abs() <= 4.0 * se,
                    "entry ({a},{b}): {emp} vs {want} (se {se})"
                );
            }
        }
    }

    #[test]
    fn constant_covariance_has_zero_increments() {
        let cov = CovarianceGrid::from_matrix(
            vec![0.1, 0.2, 0.4],
            vec![vec![2.0; 3], vec![2.0; 3], vec![2.0; 3]],
        )
        .unwrap();
        let report = gp_increment_check(&cov);
        assert_eq!(report.fitted_c, 0.0);
        assert!(!report.negative_increment);
        assert!(report.pairs.iter().all(|p| p.variance == 0.0));
    }

    #[test]
    fn corrupted_covariance_is_flagged() {
        // cov(t,s) > cov(t,t) makes the increment variance negative.
        let cov = CovarianceGrid::from_matrix(
            vec![0.1, 0.2],
            vec![vec![1.0, 1.4], vec![1.4, 1.0]],
        )
        .unwrap();
        let report = gp_increment_check(&cov);
        assert!(report.negative_increment);
    }
}
