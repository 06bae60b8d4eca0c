//! The limit covariance assembled on a time grid.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::limits::series::{limit_covariance, SeriesOptions};
use crate::region::RegionSpec;
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Maximal diagonal jitter, as a fraction of the trace, that PSD repair and
/// factorization may apply before giving up.
pub const MAX_JITTER_FRACTION: f64 = 1e-8;
const MIN_JITTER_FRACTION: f64 = 1e-12;

/// Symmetric covariance estimate on an increasing time grid.
///
/// Monte Carlo noise at off-diagonal scale can push the estimate slightly
/// off the PSD cone; `repair_psd` adds visible diagonal jitter, escalating
/// tenfold from `1e-12 * trace` up to `1e-8 * trace`, and records what it
/// applied in `psd_repair` (0 when no repair was needed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceGrid {
    pub t_grid: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
    pub psd_repair: f64,
    /// Largest certified truncation tail across entries.
    pub max_tail_bound: f64,
}

impl CovarianceGrid {
    pub fn from_matrix(t_grid: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let g = t_grid.len();
        if matrix.len() != g || matrix.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidParameter(
                "covariance matrix shape does not match the grid".into(),
            ));
        }
        Ok(Self {
            t_grid,
            matrix,
            std_errors: vec![vec![0.0; g]; g],
            psd_repair: 0.0,
            max_tail_bound: 0.0,
        })
    }

    pub fn size(&self) -> usize {
        self.t_grid.len()
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        let g = self.size();
        DMatrix::from_fn(g, g, |i, j| self.matrix[i][j])
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.matrix[i][i]).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.size() == 0 {
            return 0.0;
        }
        let eig = self.to_dmatrix().symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_std_error(&self) -> f64 {
        self.std_errors
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Escalating diagonal jitter until the spectrum clears zero (within a
    /// 1e-10 relative allowance). Returns the jitter applied.
    pub fn repair_psd(&mut self) -> Result<f64> {
        let g = self.size();
        if g == 0 {
            return Ok(0.0);
        }
        let scale = self.trace().abs().max(1.0);
        let allowance = 1e-10 * scale;
        if self.min_eigenvalue() >= -allowance {
            self.psd_repair = 0.0;
            return Ok(0.0);
        }
        let trace = self.trace().abs();
        let mut jitter = MIN_JITTER_FRACTION * trace;
        let max_jitter = MAX_JITTER_FRACTION * trace;
        while jitter <= max_jitter {
            let mut candidate = self.matrix.clone();
            for (i, row) in candidate.iter_mut().enumerate() {
                row[i] += jitter;
            }
            let trial = CovarianceGrid {
                t_grid: self.t_grid.clone(),
                matrix: candidate.clone(),
                std_errors: self.std_errors.clone(),
                psd_repair: jitter,
                max_tail_bound: self.max_tail_bound,
            };
            if trial.min_eigenvalue() >= -allowance {
                self.matrix = candidate;
                self.psd_repair = jitter;
                return Ok(jitter);
            }
            jitter *= 10.0;
        }
        Err(Error::FactorizationFailed { max_jitter })
    }
}

/// Evaluate the limit covariance on every grid pair (upper triangle, then
/// mirrored) and repair the assembled matrix to the PSD cone.
pub fn build_covariance_grid(
    t_grid: &[f64],
    model: &DensityModel,
    region: &RegionSpec,
    opts: &SeriesOptions,
) -> Result<CovarianceGrid> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter("grid times must be nonnegative".into()));
    }
    let g = t_grid.len();
    let mut pairs = Vec::new();
    for i in 0..g {
        for j in i..g {
            pairs.push((i, j));
        }
    }
    let entries: Result<Vec<_>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut entry_opts = *opts;
            entry_opts.seed = mix_seed(opts.seed, (i * g + j) as u64);
            let (est, trunc) = limit_covariance(t_grid[i], t_grid[j], model, region, &entry_opts)?;
            Ok((i, j, est, trunc))
        })
        .collect();
    let entries = entries?;

    let mut matrix = vec![vec![0.0; g]; g];
    let mut std_errors = vec![vec![0.0; g]; g];
    let mut max_tail: f64 = 0.0;
    for (i, j, est, trunc) in entries {
        matrix[i][j] = est.value;
        matrix[j][i] = est.value;
        std_errors[i][j] = est.std_error;
        std_errors[j][i] = est.std_error;
        max_tail = max_tail.max(trunc.tail_bound);
    }
    let mut grid = CovarianceGrid {
        t_grid: t_grid.to_vec(),
        matrix,
        std_errors,
        psd_repair: 0.0,
        max_tail_bound: max_tail,
    };
    grid.repair_psd()?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_needs_no_repair() {
        let mut grid = CovarianceGrid::from_matrix(
            vec![0.1, 0.2],
            vec![vec![1.0, 0.2], vec![0.2, 1.0]],
        )
        .unwrap();
        assert_eq!(grid.repair_psd().unwrap(), 0.0);
        assert_eq!(grid.psd_repair, 0.0);
    }

    #[test]
    fn zero_matrix_is_psd() {
        let mut grid = CovarianceGrid::from_matrix(
            vec![0.1, 0.2],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        assert_eq!(grid.repair_psd().unwrap(), 0.0);
    }

    #[test]
    fn mild_indefiniteness_is_repaired_and_recorded() {
        // Eigenvalues 1 +/- (1 + 5e-9): indefinite beyond the allowance but
        // within reach of the maximal jitter.
        let eps = 5e-9;
        let mut grid = CovarianceGrid::from_matrix(
            vec![0.1, 0.2],
            vec![vec![1.0, 1.0 + eps], vec![1.0 + eps, 1.0]],
        )
        .unwrap();
        let jitter = grid.repair_psd().unwrap();
        assert!(jitter > 0.0);
        assert!(grid.min_eigenvalue() >= -1e-10 * grid.trace().max(1.0));
        assert_eq!(grid.psd_repair, jitter);
    }

    #[test]
    fn badly_indefinite_matrix_fails() {
        let mut grid = CovarianceGrid::from_matrix(
            vec![0.1, 0.2],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        )
        .unwrap();
        assert!(matches!(
            grid.repair_psd(),
            Err(Error::FactorizationFailed { .. })
        ));
    }

    #[test]
    fn grid_requires_increasing_times() {
        let model = DensityModel::unit_cube(1);
        let opts = SeriesOptions::new(1e-3, 1000, 1);
        assert!(build_covariance_grid(&[0.2, 0.1], &model, &RegionSpec::AllSpace, &opts).is_err());
        assert!(build_covariance_grid(&[], &model, &RegionSpec::AllSpace, &opts).is_err());
    }
}
