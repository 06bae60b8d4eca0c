//! Critical-regime scaling of the connectivity radius.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Intensity scale together with the critical-regime radius scale.
///
/// The radius scale is fixed to `s_n = n^(-1/d)` so that `n * s_n^d = 1`
/// exactly, and the filtration radius at time `t` is `r(t) = s_n * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingContext {
    /// Poisson intensity scale. Real-valued: the intensity measure is `n * f`.
    pub n: f64,
    /// Ambient dimension.
    pub dim: usize,
    /// Radius scale `n^(-1/d)`.
    pub s_n: f64,
}

impl ScalingContext {
    pub fn new(n: f64, dim: usize) -> Result<Self> {
        if !(n >= 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "intensity n must be finite and nonnegative, got {n}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        // n = 0 yields an empty process; s_n is +inf there and never used.
        let s_n = n.powf(-1.0 / dim as f64);
        Ok(Self { n, dim, s_n })
    }

    /// Filtration radius at time `t`.
    pub fn radius_at(&self, t: f64) -> f64 {
        self.s_n * t
    }
}
