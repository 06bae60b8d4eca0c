//! The per-configuration functionals `psi_{j,k1,k2,A}(t,s)`.
//!
//! Each functional is the region-restricted power integral
//! `int_A f^(k1+k2+2-j)` divided by `j! (k1+1-j)! (k2+1-j)!`, times the
//! indicator-configuration volume for `(j, k1, k2, t, s)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::limits::factorial;
use crate::limits::volume::{
    indicator_volume, indicator_volume_mc, IndicatorVolumeQuery, PsiEstimate,
};
use crate::region::RegionSpec;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub j: usize,
    pub k1: usize,
    pub k2: usize,
    pub t: f64,
    pub s: f64,
}

/// Evaluate `psi_{j,k1,k2,A}(t,s)`, routing the volume through exact
/// shortcuts where they exist.
pub fn psi(
    params: &PsiParams,
    model: &DensityModel,
    region: &RegionSpec,
    mc_samples: u64,
    seed: u64,
) -> Result<PsiEstimate> {
    psi_with(params, model, region, mc_samples, seed, false)
}

/// As [`psi`], with `force_mc` disabling the exact volume shortcuts.
pub fn psi_with(
    params: &PsiParams,
    model: &DensityModel,
    region: &RegionSpec,
    mc_samples: u64,
    seed: u64,
    force_mc: bool,
) -> Result<PsiEstimate> {
    let q = IndicatorVolumeQuery {
        dim: model.dimension,
        k1: params.k1,
        k2: params.k2,
        j: params.j,
        t: params.t,
        s: params.s,
    };
    q.validate()?;
    let power = (params.k1 + params.k2 + 2 - params.j) as u32;
    let prefactor = model.power_integral_over(region, power)?
        / (factorial(params.j)
            * factorial(params.k1 + 1 - params.j)
            * factorial(params.k2 + 1 - params.j));
    let volume = if force_mc {
        indicator_volume_mc(&q, mc_samples, seed)?
    } else {
        indicator_volume(&q, mc_samples, seed)?
    };
    Ok(volume.scaled(prefactor))
}

/// CSV table of evaluated functionals, LF endings.
pub fn write_psi_csv<W: Write>(rows: &[(PsiParams, PsiEstimate)], mut w: W) -> Result<()> {
    writeln!(w, "j,k1,k2,t,s,value,std_error,samples")?;
    for (p, e) in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            p.j, p.k1, p.k2, p.t, p.s, e.value, e.std_error, e.samples
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::volume::EstimateMethod;
    use approx::assert_relative_eq;

    #[test]
    fn psi_of_the_empty_configuration_is_total_mass() {
        // psi_{1,0,0,R^d}(t,s) = int f = 1.
        let model = DensityModel::unit_cube(2);
        let params = PsiParams { j: 1, k1: 0, k2: 0, t: 0.8, s: 0.2 };
        let est = psi(&params, &model, &RegionSpec::AllSpace, 10, 1).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn d1_uniform_diagonal_values() {
        // psi_{2,1,1}(t,t) = 4t / 2! = 2t and psi_{3,2,2}(t,t) = 12t^2 / 3! = 2t^2.
        let model = DensityModel::unit_cube(1);
        let t = 0.45;
        let e1 = psi(&PsiParams { j: 2, k1: 1, k2: 1, t, s: t }, &model, &RegionSpec::AllSpace, 10, 1)
            .unwrap();
        assert_relative_eq!(e1.value, 2.0 * t, epsilon = 1e-12);
        assert_eq!(e1.method, EstimateMethod::ClosedForm1d);
        let e2 = psi(&PsiParams { j: 3, k1: 2, k2: 2, t, s: t }, &model, &RegionSpec::AllSpace, 10, 1)
            .unwrap();
        assert_relative_eq!(e2.value, 2.0 * t * t, epsilon = 1e-12);
    }

    #[test]
    fn region_restriction_scales_the_prefactor() {
        let model = DensityModel::unit_cube(1);
        let region = RegionSpec::bounded_box(vec![0.25], vec![0.75]).unwrap();
        let t = 0.3;
        let full = psi(&PsiParams { j: 2, k1: 1, k2: 1, t, s: t }, &model, &RegionSpec::AllSpace, 10, 1)
            .unwrap();
        let half = psi(&PsiParams { j: 2, k1: 1, k2: 1, t, s: t }, &model, &region, 10, 1).unwrap();
        assert_relative_eq!(half.value, 0.5 * full.value, epsilon = 1e-12);
    }

    #[test]
    fn symmetry_under_block_swap() {
        // psi(j,k1,k2,t,s) = psi(j,k2,k1,s,t) within Monte Carlo error.
        let model = DensityModel::unit_cube(2);
        let a = psi_with(
            &PsiParams { j: 1, k1: 2, k2: 1, t: 0.4, s: 0.25 },
            &model,
            &RegionSpec::AllSpace,
            120_000,
            5,
            true,
        )
        .unwrap();
        let b = psi_with(
            &PsiParams { j: 1, k1: 1, k2: 2, t: 0.25, s: 0.4 },
            &model,
            &RegionSpec::AllSpace,
            120_000,
            6,
            true,
        )
        .unwrap();
        let pooled = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.value - b.value).abs() <= 3.0 * pooled,
            "{} vs {} (pooled {pooled})",
            a.value,
            b.value
        );
    }

    #[test]
    fn csv_layout() {
        let rows = vec![(
            PsiParams { j: 1, k1: 0, k2: 0, t: 0.5, s: 0.5 },
            PsiEstimate::exact(1.0),
        )];
        let mut buf = Vec::new();
        write_psi_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "j,k1,k2,t,s,value,std_error,samples\n1,0,0,0.5,0.5,1,0,0\n"
        );
    }
}
