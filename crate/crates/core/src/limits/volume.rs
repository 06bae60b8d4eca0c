//! Indicator-configuration volumes.
//!
//! The integrand couples two simplex indicators over a shared block of
//! points: with `m = k1 + k2 + 1 - j` free points, the first indicator reads
//! the origin, the `j - 1` shared points and the `k1 + 1 - j` own points
//! against diameter `2t`; the second reads the origin, the shared points and
//! its `k2 + 1 - j` own points against `2s`. The support lies in the product
//! of balls `B(0, 2 max(t,s))^m`, so plain acceptance sampling on that
//! product with the analytic volume factor is unbiased and waste-free.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::limits::series::ball_volume;
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    MonteCarlo,
    ClosedForm1d,
    GridQuadrature,
}

/// A numerical value with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub value: f64,
    /// Zero only for closed-form routes; Monte Carlo runs report at least a
    /// `volume / samples` floor even on zero- or full-acceptance outcomes.
    pub std_error: f64,
    pub samples: u64,
    pub method: EstimateMethod,
}

impl PsiEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
            method: EstimateMethod::ClosedForm1d,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            value: c * self.value,
            std_error: c.abs() * self.std_error,
            samples: self.samples,
            method: self.method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorVolumeQuery {
    pub dim: usize,
    pub k1: usize,
    pub k2: usize,
    /// Overlap count, `1 <= j <= min(k1, k2) + 1`.
    pub j: usize,
    pub t: f64,
    pub s: f64,
}

impl IndicatorVolumeQuery {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let j_max = self.k1.min(self.k2) + 1;
        if self.j < 1 || self.j > j_max {
            return Err(Error::InvalidParameter(format!(
                "j = {} outside [1, {}] for (k1, k2) = ({}, {})",
                self.j, j_max, self.k1, self.k2
            )));
        }
        for v in [self.t, self.s] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "t and s must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Number of integration variables.
    pub fn free_points(&self) -> usize {
        self.k1 + self.k2 + 1 - self.j
    }
}

/// Estimate the configuration volume, taking exact shortcuts where they
/// exist: the degenerate `k1 = k2 = 0` query is 1, queries with a vanishing
/// radius on a nonempty block are 0, and the 1-d diagonal (`k1 = k2 = k`,
/// `j = k + 1`) has the order-statistics closed form `(k+1) (2 min(t,s))^k`.
pub fn indicator_volume(
    q: &IndicatorVolumeQuery,
    mc_samples: u64,
    seed: u64,
) -> Result<PsiEstimate> {
    q.validate()?;
    if let Some(exact) = exact_route(q) {
        return Ok(exact);
    }
    indicator_volume_mc(q, mc_samples, seed)
}

fn exact_route(q: &IndicatorVolumeQuery) -> Option<PsiEstimate> {
    if q.k1 == 0 && q.k2 == 0 {
        return Some(PsiEstimate::exact(1.0));
    }
    if (q.t == 0.0 && q.k1 > 0) || (q.s == 0.0 && q.k2 > 0) {
        return Some(PsiEstimate::exact(0.0));
    }
    if q.dim == 1 {
        return Some(PsiEstimate::exact(volume_1d(q)));
    }
    None
}

/// Exact 1-d configuration volume.
///
/// Write `c = j - 1` shared points, `u`/`v` own points, `A = 2t`, `B = 2s`.
/// Conditioning on the range `D` of `{0} + shared` (whose pushforward measure
/// is `c (c+1) D^(c-1) dD`), the own blocks decouple: a block of `u` points
/// extends a span of range `D` within diameter `A` on a set of volume
/// `V(D, A, u) = (1+u) A^u - u A^(u-1) D`, by the sliding-window identity
/// `int (A - range)_+ = (A - D) A^u` differentiated in `A`. The remaining
/// polynomial integral over `D in [0, min(A,B)]` is evaluated termwise.
///
/// The `j = k + 1` diagonal reduces to the order-statistics form
/// `(k+1) (2 min(t,s))^k`.
fn volume_1d(q: &IndicatorVolumeQuery) -> f64 {
    let c = q.j - 1;
    let u = q.k1 + 1 - q.j;
    let v = q.k2 + 1 - q.j;
    let a = 2.0 * q.t;
    let b = 2.0 * q.s;
    let (cu, cv) = (u as f64, v as f64);

    if c == 0 {
        return (1.0 + cu) * a.powi(u as i32) * (1.0 + cv) * b.powi(v as i32);
    }
    let cc = c as f64;
    let e = a.min(b);
    let mut total =
        (cc + 1.0) * e.powi(c as i32) * (1.0 + cu) * (1.0 + cv) * a.powi(u as i32) * b.powi(v as i32);
    if v >= 1 {
        total -= cc * e.powi(c as i32 + 1) * (1.0 + cu) * cv * a.powi(u as i32)
            * b.powi(v as i32 - 1);
    }
    if u >= 1 {
        total -= cc * e.powi(c as i32 + 1) * (1.0 + cv) * cu * b.powi(v as i32)
            * a.powi(u as i32 - 1);
    }
    if u >= 1 && v >= 1 {
        total += cc * (cc + 1.0) / (cc + 2.0)
            * e.powi(c as i32 + 2)
            * cu
            * cv
            * a.powi(u as i32 - 1)
            * b.powi(v as i32 - 1);
    }
    total
}

/// Forced Monte Carlo estimate (no exact shortcuts); used by the validation
/// suites that cross-check the closed forms.
pub fn indicator_volume_mc(
    q: &IndicatorVolumeQuery,
    mc_samples: u64,
    seed: u64,
) -> Result<PsiEstimate> {
    q.validate()?;
    if mc_samples == 0 {
        return Err(Error::InvalidParameter("mc_samples must be positive".into()));
    }
    let m = q.free_points();
    if m == 0 {
        return Ok(PsiEstimate::exact(1.0));
    }

    let d = q.dim;
    let r_sup = 2.0 * q.t.max(q.s);
    if r_sup == 0.0 {
        return Ok(PsiEstimate::exact(0.0));
    }
    let vol_factor = ball_volume(d, r_sup).powi(m as i32);
    let lim_t2 = (2.0 * q.t) * (2.0 * q.t);
    let lim_s2 = (2.0 * q.s) * (2.0 * q.s);
    let lim_min2 = lim_t2.min(lim_s2);

    let shared = q.j - 1;
    let own1 = q.k1 + 1 - q.j;
    let own2 = q.k2 + 1 - q.j;

    let mut rng = rng_from_seed(seed);
    let mut buf = vec![0.0f64; m * d];
    let mut hits: u64 = 0;

    'sample: for _ in 0..mc_samples {
        // Shared points live in both argument sets: all constraints at 2 min(t,s).
        for i in 0..shared {
            if !draw_checked(&mut rng, d, r_sup, &mut buf, i, 0, i, lim_min2) {
                continue 'sample;
            }
        }
        // First block: checked against origin, shared and earlier own points at 2t.
        for i in 0..own1 {
            let idx = shared + i;
            if !draw_checked(&mut rng, d, r_sup, &mut buf, idx, 0, idx, lim_t2) {
                continue 'sample;
            }
        }
        // Second block: checked against origin, shared and earlier second-block
        // points at 2s (never against the first block).
        for i in 0..own2 {
            let idx = shared + own1 + i;
            if !draw_block2(&mut rng, d, r_sup, &mut buf, idx, shared, own1, lim_s2) {
                continue 'sample;
            }
        }
        hits += 1;
    }

    let p = hits as f64 / mc_samples as f64;
    let mut se = vol_factor * (p * (1.0 - p) / mc_samples as f64).sqrt();
    if hits == 0 || hits == mc_samples {
        se = se.max(vol_factor / mc_samples as f64);
    }
    Ok(PsiEstimate {
        value: vol_factor * p,
        std_error: se,
        samples: mc_samples,
        method: EstimateMethod::MonteCarlo,
    })
}

/// Draw `buf[idx]` and test it against the origin and `buf[lo..hi]` at `lim2`.
#[inline]
fn draw_checked(
    rng: &mut SimRng,
    d: usize,
    r_sup: f64,
    buf: &mut [f64],
    idx: usize,
    lo: usize,
    hi: usize,
    lim2: f64,
) -> bool {
    sample_in_ball(rng, d, r_sup, &mut buf[idx * d..(idx + 1) * d]);
    let y = &buf[idx * d..(idx + 1) * d];
    if norm2(y) > lim2 {
        return false;
    }
    for p in lo..hi {
        if dist2_at(buf, d, p, idx) > lim2 {
            return false;
        }
    }
    true
}

#[inline]
fn draw_block2(
    rng: &mut SimRng,
    d: usize,
    r_sup: f64,
    buf: &mut [f64],
    idx: usize,
    shared: usize,
    own1: usize,
    lim2: f64,
) -> bool {
    sample_in_ball(rng, d, r_sup, &mut buf[idx * d..(idx + 1) * d]);
    let y = &buf[idx * d..(idx + 1) * d];
    if norm2(y) > lim2 {
        return false;
    }
    for p in 0..shared {
        if dist2_at(buf, d, p, idx) > lim2 {
            return false;
        }
    }
    for p in (shared + own1)..idx {
        if dist2_at(buf, d, p, idx) > lim2 {
            return false;
        }
    }
    true
}

#[inline]
fn norm2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum()
}

#[inline]
fn dist2_at(buf: &[f64], d: usize, a: usize, b: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..d {
        let diff = buf[a * d + k] - buf[b * d + k];
        s += diff * diff;
    }
    s
}

/// Uniform draw in the centered ball of the given radius.
#[inline]
pub(crate) fn sample_in_ball(rng: &mut SimRng, d: usize, radius: f64, out: &mut [f64]) {
    if d == 1 {
        out[0] = radius * (2.0 * rng.random::<f64>() - 1.0);
        return;
    }
    loop {
        let mut n2 = 0.0;
        for v in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *v = z;
            n2 += z * z;
        }
        if n2 > 0.0 {
            let scale = radius * rng.random::<f64>().powf(1.0 / d as f64) / n2.sqrt();
            for v in out.iter_mut() {
                *v *= scale;
            }
            return;
        }
    }
}
