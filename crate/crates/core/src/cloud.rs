//! Poisson point clouds.

use std::io::Write;

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::rng::{rng_from_seed, SimRng};
use crate::scaling::ScalingContext;
use crate::{Error, Result};

/// A realization of the Poisson process together with its scaling context.
///
/// Points are stored flat, `dim` coordinates per point. Regenerating with the
/// same `(model, ctx, seed)` triple reproduces the cloud bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub ctx: ScalingContext,
    pub seed: u64,
}

impl PointCloud {
    pub fn from_points(points: Vec<Vec<f64>>, ctx: ScalingContext, seed: u64) -> Result<Self> {
        let dim = ctx.dim;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords, ctx, seed })
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// CSV with header `x0,..,x{d-1}`, one point per row, LF endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let row: Vec<String> = self.point(i).iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Sample a Poisson point process with intensity `ctx.n * f`.
///
/// The count is `Poisson(n)` and, given the count, points are i.i.d. draws
/// from the density model.
pub fn sample_poisson(model: &DensityModel, ctx: ScalingContext, seed: u64) -> Result<PointCloud> {
    if model.dimension != ctx.dim {
        return Err(Error::DimensionMismatch {
            model_dim: model.dimension,
            ctx_dim: ctx.dim,
        });
    }
    model.validate()?;
    let mut rng: SimRng = rng_from_seed(seed);
    let count = if ctx.n > 0.0 {
        let pois = Poisson::new(ctx.n)
            .map_err(|e| Error::InvalidParameter(format!("poisson intensity: {e}")))?;
        pois.sample(&mut rng) as usize
    } else {
        0
    };
    let mut coords = Vec::with_capacity(count * ctx.dim);
    let mut pt = Vec::with_capacity(ctx.dim);
    for _ in 0..count {
        model.sample_point(&mut rng, &mut pt)?;
        coords.extend_from_slice(&pt);
    }
    Ok(PointCloud { dim: ctx.dim, coords, ctx, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replication_seed;

    #[test]
    fn zero_intensity_gives_empty_cloud() {
        let model = DensityModel::unit_cube(1);
        let ctx = ScalingContext::new(0.0, 1).unwrap();
        let cloud = sample_poisson(&model, ctx, 5).unwrap();
        assert!(cloud.is_empty());
    }

    #[test]
    fn identical_seed_reproduces_cloud_bit_for_bit() {
        let model = DensityModel::unit_cube(2);
        let ctx = ScalingContext::new(200.0, 2).unwrap();
        let a = sample_poisson(&model, ctx, 42).unwrap();
        let b = sample_poisson(&model, ctx, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_poisson(&model, ctx, 43).unwrap();
        assert_ne!(a.coords, c.coords);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let model = DensityModel::unit_cube(2);
        let ctx = ScalingContext::new(10.0, 1).unwrap();
        assert!(matches!(
            sample_poisson(&model, ctx, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn poisson_count_mean_and_dispersion() {
        // Mean within 3*sqrt(n/R) of n, index of dispersion within 1 +/- 5/sqrt(R).
        let model = DensityModel::unit_cube(1);
        let n = 1000.0;
        let ctx = ScalingContext::new(n, 1).unwrap();
        let reps = 200usize;
        let counts: Vec<f64> = (0..reps)
            .map(|r| {
                sample_poisson(&model, ctx, replication_seed(7, r as u64))
                    .unwrap()
                    .len() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        assert!(
            (mean - n).abs() < 3.0 * (n / reps as f64).sqrt(),
            "count mean {mean} too far from {n}"
        );
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        let dispersion = var / mean;
        let slack = 5.0 / (reps as f64).sqrt();
        assert!(
            dispersion > 1.0 - slack && dispersion < 1.0 + slack,
            "index of dispersion {dispersion} outside [{}, {}]",
            1.0 - slack,
            1.0 + slack
        );
    }

    #[test]
    fn csv_round_trip_format() {
        let ctx = ScalingContext::new(2.0, 2).unwrap();
        let cloud =
            PointCloud::from_points(vec![vec![0.0, 1.5], vec![2.0, -1.0]], ctx, 0).unwrap();
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x0,x1\n0,1.5\n2,-1\n");
    }
}
