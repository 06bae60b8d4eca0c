//! Moment statistics and normality diagnostics for replication samples.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided 1% critical value for an asymptotically standard normal statistic.
pub const Z_CRIT_1PCT: f64 = 2.5758293035489004;

/// 1% critical value of the size-adjusted Anderson-Darling statistic
/// `A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)` for normality with estimated mean
/// and variance (Stephens).
pub const AD_CRIT_1PCT: f64 = 1.035;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub std_error: f64,
}

pub fn sample_stats(xs: &[f64]) -> SampleStats {
    let n = xs.len();
    assert!(n >= 2, "need at least two observations");
    let mean = xs.iter().sum::<f64>() / n as f64;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    let variance = m2 / (n as f64 - 1.0);
    SampleStats {
        count: n,
        mean,
        variance,
        std_error: (variance / n as f64).sqrt(),
    }
}

/// Sample skewness `m3 / m2^(3/2)` with population moments.
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Sample excess kurtosis `m4 / m2^2 - 3`.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// Anderson-Darling statistic for normality with estimated parameters,
/// returning `(A^2, A*^2)`.
pub fn anderson_darling(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 8, "Anderson-Darling needs at least 8 observations");
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf).sqrt();
    assert!(sd > 0.0, "Anderson-Darling needs a non-constant sample");
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::new(mean, sd).expect("valid normal parameters");
    let eps = 1e-15;
    let mut sum = 0.0;
    for i in 0..n {
        let fi = normal.cdf(sorted[i]).clamp(eps, 1.0 - eps);
        let fj = normal.cdf(sorted[n - 1 - i]).clamp(eps, 1.0 - eps);
        sum += (2.0 * (i as f64 + 1.0) - 1.0) * (fi.ln() + (1.0 - fj).ln());
    }
    let a2 = -nf - sum / nf;
    let a2_star = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    (a2, a2_star)
}

/// One battery of normality diagnostics at the 1% level: skewness and excess
/// kurtosis z-tests plus Anderson-Darling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityRow {
    pub label: String,
    pub skew_z: f64,
    pub kurtosis_z: f64,
    pub ad_statistic: f64,
    pub skew_pass: bool,
    pub kurtosis_pass: bool,
    pub ad_pass: bool,
}

impl NormalityRow {
    pub fn passes(&self) -> usize {
        self.skew_pass as usize + self.kurtosis_pass as usize + self.ad_pass as usize
    }
}

pub fn normality_battery(label: &str, xs: &[f64]) -> NormalityRow {
    let n = xs.len() as f64;
    let skew_z = skewness(xs) / (6.0 / n).sqrt();
    let kurtosis_z = excess_kurtosis(xs) / (24.0 / n).sqrt();
    let (_, ad_star) = anderson_darling(xs);
    NormalityRow {
        label: label.to_string(),
        skew_z,
        kurtosis_z,
        ad_statistic: ad_star,
        skew_pass: skew_z.abs() <= Z_CRIT_1PCT,
        kurtosis_pass: kurtosis_z.abs() <= Z_CRIT_1PCT,
        ad_pass: ad_star <= AD_CRIT_1PCT,
    }
}

/// Unbiased sample covariance matrix of row-vectors.
pub fn covariance_matrix(samples: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let reps = samples.len();
    assert!(reps >= 2);
    let g = samples[0].len();
    let mut mean = vec![0.0; g];
    for row in samples {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= reps as f64;
    }
    let mut cov = vec![vec![0.0; g]; g];
    for row in samples {
        for i in 0..g {
            let di = row[i] - mean[i];
            for jj in i..g {
                cov[i][jj] += di * (row[jj] - mean[jj]);
            }
        }
    }
    for i in 0..g {
        for jj in i..g {
            let v = cov[i][jj] / (reps as f64 - 1.0);
            cov[i][jj] = v;
            cov[jj][i] = v;
        }
    }
    cov
}

/// Normal-approximation standard error of the sample covariance entry
/// `(i, j)`: `sqrt((c_ii c_jj + c_ij^2) / (R - 1))`.
pub fn covariance_entry_se(cov: &[Vec<f64>], i: usize, j: usize, reps: usize) -> f64 {
    ((cov[i][i] * cov[j][j] + cov[i][j] * cov[i][j]) / (reps as f64 - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn stats_of_a_known_sample() {
        let s = sample_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ad_accepts_gaussian_and_rejects_uniform() {
        let mut rng = rng_from_seed(123);
        let gauss: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let unif: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let (_, ad_g) = anderson_darling(&gauss);
        let (_, ad_u) = anderson_darling(&unif);
        assert!(ad_g <= AD_CRIT_1PCT, "gaussian sample rejected: {ad_g}");
        assert!(ad_u > AD_CRIT_1PCT, "uniform sample accepted: {ad_u}");
    }

    #[test]
    fn battery_flags_skewed_data() {
        let mut rng = rng_from_seed(5);
        let skewed: Vec<f64> = (0..1500)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * z
            })
            .collect();
        let row = normality_battery("chi2", &skewed);
        assert!(!row.skew_pass);
        assert!(!row.ad_pass);
        let gauss: Vec<f64> = (0..1500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let row = normality_battery("gauss", &gauss);
        assert_eq!(row.passes(), 3);
    }

    #[test]
    fn covariance_matrix_recovers_structure() {
        // y = (z1, z1 + z2) has covariance [[1,1],[1,2]].
        let mut rng = rng_from_seed(8);
        let samples: Vec<Vec<f64>> = (0..30_000)
            .map(|_| {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                vec![z1, z1 + z2]
            })
            .collect();
        let cov = covariance_matrix(&samples);
        let want = [[1.0, 1.0], [1.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                let se = covariance_entry_se(&cov, i, j, samples.len());
                assert!(
                    (cov[i][j] - want[i][j]).abs() < 4.0 * se,
                    "entry ({i},{j}): {} vs {}",
                    cov[i][j],
                    want[i][j]
                );
            }
        }
    }
}
