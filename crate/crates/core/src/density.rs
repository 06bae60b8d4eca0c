//! Probability density models on `R^d`.
//!
//! Every supported kind has bounded support and a finite sup-norm, which is
//! what the limit formulas require (`a_t = (2t)^d * theta_d * ||f||_inf`).
//! Power integrals `int f^p` are analytic for the uniform-cube and
//! piecewise-constant kinds and evaluated by adaptive quadrature for the
//! truncated Gaussian.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::region::RegionSpec;
use crate::rng::SimRng;
use crate::{Error, Result};
use rand::Rng;

/// Attempts allowed per point before the rejection sampler gives up.
pub const REJECTION_ATTEMPT_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityKind {
    /// Constant density `side^-d` on an axis-aligned cube.
    UniformCube { side: f64, center: Vec<f64> },
    /// Isotropic Gaussian with scale `sigma`, renormalized on a box.
    TruncatedGaussian {
        mean: Vec<f64>,
        sigma: f64,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Regular grid of cells on a box, cell densities proportional to weights.
    PiecewiseConstant {
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<usize>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub kind: DensityKind,
    pub dimension: usize,
}

impl DensityModel {
    pub fn uniform_cube(dimension: usize, side: f64, center: Vec<f64>) -> Result<Self> {
        let m = Self {
            kind: DensityKind::UniformCube { side, center },
            dimension,
        };
        m.validate()?;
        Ok(m)
    }

    /// Uniform density on the unit cube `[0,1]^d`.
    pub fn unit_cube(dimension: usize) -> Self {
        Self::uniform_cube(dimension, 1.0, vec![0.5; dimension]).expect("valid unit cube")
    }

    pub fn truncated_gaussian(
        dimension: usize,
        mean: Vec<f64>,
        sigma: f64,
        lo: Vec<f64>,
        hi: Vec<f64>,
    ) -> Result<Self> {
        let m = Self {
            kind: DensityKind::TruncatedGaussian { mean, sigma, lo, hi },
            dimension,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn piecewise_constant(
        dimension: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let m = Self {
            kind: DensityKind::PiecewiseConstant { lo, hi, cells, weights },
            dimension,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        match &self.kind {
            DensityKind::UniformCube { side, center } => {
                if !(*side > 0.0) || !side.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "cube side must be positive, got {side}"
                    )));
                }
                if center.len() != d {
                    return Err(Error::InvalidParameter(
                        "cube center dimension mismatch".into(),
                    ));
                }
            }
            DensityKind::TruncatedGaussian { mean, sigma, lo, hi } => {
                if mean.len() != d || lo.len() != d || hi.len() != d {
                    return Err(Error::InvalidParameter(
                        "gaussian mean/box dimension mismatch".into(),
                    ));
                }
                if !(*sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "sigma must be positive, got {sigma}"
                    )));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::InvalidParameter(
                        "gaussian truncation box requires lo < hi".into(),
                    ));
                }
            }
            DensityKind::PiecewiseConstant { lo, hi, cells, weights } => {
                if lo.len() != d || hi.len() != d || cells.len() != d {
                    return Err(Error::InvalidParameter(
                        "piecewise box/cells dimension mismatch".into(),
                    ));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::InvalidParameter(
                        "piecewise box requires lo < hi".into(),
                    ));
                }
                if cells.iter().any(|&c| c == 0) {
                    return Err(Error::InvalidParameter(
                        "piecewise grid needs at least one cell per dimension".into(),
                    ));
                }
                let n_cells: usize = cells.iter().product();
                if weights.len() != n_cells {
                    return Err(Error::InvalidParameter(format!(
                        "expected {n_cells} weights, got {}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "weights must be finite and nonnegative".into(),
                    ));
                }
                if weights.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "weights must not all vanish".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Support bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DensityKind::UniformCube { side, center } => {
                let h = side / 2.0;
                (
                    center.iter().map(|c| c - h).collect(),
                    center.iter().map(|c| c + h).collect(),
                )
            }
            DensityKind::TruncatedGaussian { lo, hi, .. }
            | DensityKind::PiecewiseConstant { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    /// Density value at a point (0 outside the support).
    pub fn density_at(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.kind {
            DensityKind::UniformCube { side, center } => {
                let h = side / 2.0;
                let inside = x
                    .iter()
                    .zip(center)
                    .all(|(v, c)| *v >= c - h && *v <= c + h);
                if inside {
                    side.powi(-(self.dimension as i32))
                } else {
                    0.0
                }
            }
            DensityKind::TruncatedGaussian { mean, sigma, lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b);
                if !inside {
                    return 0.0;
                }
                let std = Normal::standard();
                let mut f = 1.0;
                for i in 0..self.dimension {
                    let z = (x[i] - mean[i]) / sigma;
                    let norm = std.cdf((hi[i] - mean[i]) / sigma) - std.cdf((lo[i] - mean[i]) / sigma);
                    f *= std.pdf(z) / (sigma * norm);
                }
                f
            }
            DensityKind::PiecewiseConstant { .. } => match self.cell_of(x) {
                Some(c) => self.cell_density(c),
                None => 0.0,
            },
        }
    }

    /// Essential supremum of the density.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            DensityKind::UniformCube { side, .. } => side.powi(-(self.dimension as i32)),
            DensityKind::TruncatedGaussian { mean, lo, hi, .. } => {
                // Separable, so the max sits at the coordinatewise clamp of the mean.
                let peak: Vec<f64> = mean
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(m, (a, b))| m.clamp(*a, *b))
                    .collect();
                self.density_at(&peak)
            }
            DensityKind::PiecewiseConstant { weights, .. } => {
                let n_cells = weights.len();
                (0..n_cells)
                    .map(|c| self.cell_density(c))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `int f(x)^p dx` over all of `R^d`.
    pub fn power_integral(&self, p: u32) -> Result<f64> {
        self.power_integral_over(&RegionSpec::AllSpace, p)
    }

    /// `int_A f(x)^p dx` for a restriction region `A`.
    ///
    /// Analytic for the uniform-cube and piecewise-constant kinds; per-axis
    /// adaptive Simpson quadrature for the truncated Gaussian.
    pub fn power_integral_over(&self, region: &RegionSpec, p: u32) -> Result<f64> {
        if p < 1 {
            return Err(Error::InvalidParameter("power p must be >= 1".into()));
        }
        let d = self.dimension;
        match &self.kind {
            DensityKind::UniformCube { side, .. } => {
                let (lo, hi) = self.bounding_box();
                let vol = overlap_volume(&lo, &hi, region, d);
                Ok(side.powi(-(d as i32) * p as i32) * vol)
            }
            DensityKind::PiecewiseConstant { lo, hi, cells, weights } => {
                let mut total = 0.0;
                let mut idx = vec![0usize; d];
                for c in 0..weights.len() {
                    self.cell_multi_index(c, &mut idx);
                    let mut clo = vec![0.0; d];
                    let mut chi = vec![0.0; d];
                    for i in 0..d {
                        let w = (hi[i] - lo[i]) / cells[i] as f64;
                        clo[i] = lo[i] + idx[i] as f64 * w;
                        chi[i] = clo[i] + w;
                    }
                    let vol = overlap_volume(&clo, &chi, region, d);
                    if vol > 0.0 {
                        total += self.cell_density(c).powi(p as i32) * vol;
                    }
                }
                Ok(total)
            }
            DensityKind::TruncatedGaussian { mean, sigma, lo, hi } => {
                let std = Normal::standard();
                let mut total = 1.0;
                for i in 0..d {
                    let (a, b) = match region {
                        RegionSpec::AllSpace => (lo[i], hi[i]),
                        RegionSpec::Box { lo: rlo, hi: rhi } => {
                            (lo[i].max(rlo[i]), hi[i].min(rhi[i]))
                        }
                    };
                    if !(a < b) {
                        return Ok(0.0);
                    }
                    let norm = std.cdf((hi[i] - mean[i]) / sigma) - std.cdf((lo[i] - mean[i]) / sigma);
                    let mu = mean[i];
                    let s = sigma;
                    let f1 = move |x: f64| {
                        let z = (x - mu) / s;
                        ((-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s * norm))
                            .powi(p as i32)
                    };
                    total *= adaptive_simpson(&f1, a, b, 1e-12, 50);
                }
                Ok(total)
            }
        }
    }

    /// Draw one point from the density.
    pub fn sample_point(&self, rng: &mut SimRng, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        match &self.kind {
            DensityKind::UniformCube { side, center } => {
                let h = side / 2.0;
                for c in center {
                    out.push(c - h + side * rng.random::<f64>());
                }
                Ok(())
            }
            DensityKind::PiecewiseConstant { lo, hi, cells, weights } => {
                let total: f64 = weights.iter().sum();
                let mut target = rng.random::<f64>() * total;
                let mut cell = weights.len() - 1;
                for (c, w) in weights.iter().enumerate() {
                    if target < *w {
                        cell = c;
                        break;
                    }
                    target -= w;
                }
                let mut idx = vec![0usize; self.dimension];
                self.cell_multi_index(cell, &mut idx);
                for i in 0..self.dimension {
                    let w = (hi[i] - lo[i]) / cells[i] as f64;
                    let a = lo[i] + idx[i] as f64 * w;
                    out.push(a + w * rng.random::<f64>());
                }
                Ok(())
            }
            DensityKind::TruncatedGaussian { lo, hi, .. } => {
                // Rejection against (bounding box) x sup-norm.
                let sup = self.sup_norm();
                let mut proposal = vec![0.0; self.dimension];
                for _ in 0..REJECTION_ATTEMPT_CAP {
                    for i in 0..self.dimension {
                        proposal[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                    }
                    let accept = rng.random::<f64>() * sup;
                    if accept <= self.density_at(&proposal) {
                        out.extend_from_slice(&proposal);
                        return Ok(());
                    }
                }
                Err(Error::RejectionCapExceeded {
                    attempts: REJECTION_ATTEMPT_CAP,
                })
            }
        }
    }

    fn cell_density(&self, cell: usize) -> f64 {
        match &self.kind {
            DensityKind::PiecewiseConstant { lo, hi, cells, weights } => {
                let total: f64 = weights.iter().sum();
                let cell_vol: f64 = (0..self.dimension)
                    .map(|i| (hi[i] - lo[i]) / cells[i] as f64)
                    .product();
                weights[cell] / (total * cell_vol)
            }
            _ => unreachable!("cell_density is piecewise-only"),
        }
    }

    fn cell_multi_index(&self, mut cell: usize, idx: &mut [usize]) {
        if let DensityKind::PiecewiseConstant { cells, .. } = &self.kind {
            // Row-major: the last axis varies fastest.
            for i in (0..cells.len()).rev() {
                idx[i] = cell % cells[i];
                cell /= cells[i];
            }
        }
    }

    fn cell_of(&self, x: &[f64]) -> Option<usize> {
        if let DensityKind::PiecewiseConstant { lo, hi, cells, .. } = &self.kind {
            let mut flat = 0usize;
            for i in 0..self.dimension {
                if x[i] < lo[i] || x[i] > hi[i] {
                    return None;
                }
                let w = (hi[i] - lo[i]) / cells[i] as f64;
                let mut c = ((x[i] - lo[i]) / w) as usize;
                if c >= cells[i] {
                    c = cells[i] - 1;
                }
                flat = flat * cells[i] + c;
            }
            Some(flat)
        } else {
            None
        }
    }
}

/// Volume of `[lo, hi] ∩ region`.
fn overlap_volume(lo: &[f64], hi: &[f64], region: &RegionSpec, d: usize) -> f64 {
    match region {
        RegionSpec::AllSpace => (0..d).map(|i| hi[i] - lo[i]).product(),
        RegionSpec::Box { lo: rlo, hi: rhi } => {
            let mut vol = 1.0;
            for i in 0..d {
                let len = hi[i].min(rhi[i]) - lo[i].max(rlo[i]);
                if len <= 0.0 {
                    return 0.0;
                }
                vol *= len;
            }
            vol
        }
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)
            + simpson_step(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_relative_eq;

    fn gaussian_1d() -> DensityModel {
        DensityModel::truncated_gaussian(1, vec![0.3], 0.4, vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn unit_cube_power_integral_is_one() {
        let m = DensityModel::unit_cube(1);
        assert_relative_eq!(m.power_integral(3).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn wide_cube_power_integral() {
        // f = 1/2 on [0,2]: int f^2 = (1/4) * 2 = 1/2.
        let m = DensityModel::uniform_cube(1, 2.0, vec![1.0]).unwrap();
        assert_relative_eq!(m.power_integral(2).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn power_integral_of_one_is_one_for_all_kinds() {
        let models = vec![
            DensityModel::unit_cube(2),
            DensityModel::uniform_cube(3, 1.7, vec![0.0, 0.0, 0.0]).unwrap(),
            gaussian_1d(),
            DensityModel::truncated_gaussian(2, vec![0.5, 0.5], 0.3, vec![0.0, 0.0], vec![1.0, 1.0])
                .unwrap(),
            DensityModel::piecewise_constant(
                1,
                vec![0.0],
                vec![1.0],
                vec![4],
                vec![1.0, 2.0, 3.0, 4.0],
            )
            .unwrap(),
        ];
        for m in models {
            assert!(
                (m.power_integral(1).unwrap() - 1.0).abs() < 1e-9,
                "model {m:?} does not integrate to 1"
            );
        }
    }

    #[test]
    fn gaussian_power_integral_matches_grid_oracle() {
        // Brute-force dense midpoint grid as the independent route.
        let m = gaussian_1d();
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let mut grid = 0.0;
        for i in 0..steps {
            let x = (i as f64 + 0.5) * h;
            grid += m.density_at(&[x]).powi(2) * h;
        }
        let quad = m.power_integral(2).unwrap();
        assert!(
            (quad - grid).abs() < 1e-5,
            "quadrature {quad} vs grid {grid}"
        );
    }

    #[test]
    fn piecewise_power_integral_is_analytic() {
        // Two cells on [0,1] with weights (1,3): densities 0.5 and 1.5 on halves.
        let m = DensityModel::piecewise_constant(1, vec![0.0], vec![1.0], vec![2], vec![1.0, 3.0])
            .unwrap();
        let expect = 0.5 * (0.5f64.powi(2) + 1.5f64.powi(2));
        assert_relative_eq!(m.power_integral(2).unwrap(), expect, epsilon = 1e-12);
        assert_relative_eq!(m.sup_norm(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn region_restricted_power_integral() {
        let m = DensityModel::unit_cube(1);
        let region = RegionSpec::bounded_box(vec![0.0], vec![0.5]).unwrap();
        assert_relative_eq!(m.power_integral_over(&region, 4).unwrap(), 0.5, epsilon = 1e-12);
        let disjoint = RegionSpec::bounded_box(vec![2.0], vec![3.0]).unwrap();
        assert_eq!(m.power_integral_over(&disjoint, 1).unwrap(), 0.0);
    }

    #[test]
    fn sup_norm_dominates_sampled_densities() {
        let models = vec![gaussian_1d(), DensityModel::unit_cube(2)];
        for m in models {
            let sup = m.sup_norm();
            let mut rng = rng_from_seed(11);
            let mut pt = Vec::new();
            for _ in 0..500 {
                m.sample_point(&mut rng, &mut pt).unwrap();
                assert!(m.density_at(&pt) <= sup * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn truncated_gaussian_mean_matches_analytic_oracle() {
        // E[X] = mu + sigma * (phi(alpha) - phi(beta)) / (Phi(beta) - Phi(alpha)).
        let m = gaussian_1d();
        let (mu, sigma, lo, hi) = (0.3, 0.4, 0.0, 1.0);
        let std = Normal::standard();
        let alpha = (lo - mu) / sigma;
        let beta = (hi - mu) / sigma;
        let analytic =
            mu + sigma * (std.pdf(alpha) - std.pdf(beta)) / (std.cdf(beta) - std.cdf(alpha));

        let mut rng = rng_from_seed(99);
        let mut pt = Vec::new();
        let n = 40_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            m.sample_point(&mut rng, &mut pt).unwrap();
            sum += pt[0];
            sumsq += pt[0] * pt[0];
        }
        let mean = sum / n as f64;
        let var = (sumsq - sum * sum / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - analytic).abs() < 3.0 * se,
            "empirical {mean} vs analytic {analytic} (se {se})"
        );
    }

    #[test]
    fn validation_rejects_malformed_models() {
        assert!(DensityModel::uniform_cube(1, 0.0, vec![0.0]).is_err());
        assert!(DensityModel::uniform_cube(2, 1.0, vec![0.0]).is_err());
        assert!(
            DensityModel::truncated_gaussian(1, vec![0.0], -1.0, vec![0.0], vec![1.0]).is_err()
        );
        assert!(DensityModel::piecewise_constant(1, vec![0.0], vec![1.0], vec![2], vec![1.0])
            .is_err());
        assert!(DensityModel::piecewise_constant(
            1,
            vec![0.0],
            vec![1.0],
            vec![2],
            vec![0.0, 0.0]
        )
        .is_err());
    }
}
