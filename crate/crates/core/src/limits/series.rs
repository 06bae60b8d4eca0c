//! Alternating limit series with certified truncation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::density::DensityModel;
use crate::limits::factorial;
use crate::limits::psi::{psi_with, PsiParams};
use crate::limits::volume::{EstimateMethod, PsiEstimate};
use crate::region::RegionSpec;
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Volume of the unit ball in `R^d`: `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn theta_d(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// Volume of a ball of the given radius in `R^d`.
pub fn ball_volume(d: usize, radius: f64) -> f64 {
    theta_d(d) * radius.powi(d as i32)
}

/// Kept for call sites that want the name to match the constant it is.
pub fn unit_ball_volume(d: usize) -> f64 {
    theta_d(d)
}

/// The tail-control constant `a_t = (2t)^d * theta_d * ||f||_inf`.
pub fn tail_constant(t: f64, dim: usize, sup_norm: f64) -> f64 {
    (2.0 * t).powi(dim as i32) * theta_d(dim) * sup_norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    /// Requested bound on the truncation tail.
    pub epsilon: f64,
    /// Monte Carlo samples per series term.
    pub mc_samples: u64,
    pub seed: u64,
    /// Refuse series needing more than this many terms.
    pub k_cap: usize,
    /// Disable exact shortcuts so every term is Monte Carlo (validation runs).
    pub force_mc: bool,
}

impl SeriesOptions {
    pub fn new(epsilon: f64, mc_samples: u64, seed: u64) -> Self {
        Self { epsilon, mc_samples, seed, k_cap: 120, force_mc: false }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidParameter("mc_samples must be positive".into()));
        }
        Ok(())
    }
}

/// Record of a certified series truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub k_max: usize,
    /// Certified upper bound on everything left out.
    pub tail_bound: f64,
    pub a_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitValue {
    pub value: f64,
    pub std_error: f64,
}

/// Upper bound on `sum_{k > k_max} a^k / (k+1)!`, summed forward with a
/// geometric remainder so no cancellation is involved.
pub fn mean_tail_bound(a: f64, k_max: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    // term(k) = a^k / (k+1)!, term(k+1) = term(k) * a / (k+2).
    let mut term = 1.0;
    for k in 0..=k_max {
        term *= a / (k as f64 + 2.0);
    }
    let mut k = k_max + 1;
    let mut sum = 0.0;
    loop {
        sum += term;
        let ratio = a / (k as f64 + 2.0);
        if ratio < 0.5 && term < sum * 1e-18 + 1e-300 {
            return sum + term * ratio / (1.0 - ratio);
        }
        term *= ratio;
        k += 1;
        if k > k_max + 100_000 {
            return f64::INFINITY;
        }
    }
}

/// Upper bound on the covariance double-series tail past the `(K, K)` square:
/// the shell at `max(k1,k2) = m` sums to at most `4 e^a (2a)^m / (m+1)!`.
pub fn cov_tail_bound(a: f64, k_max: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let scale = 4.0 * a.exp();
    // term(m) = (2a)^m / (m+1)!.
    let two_a = 2.0 * a;
    let mut term = 1.0;
    for m in 0..=k_max {
        term *= two_a / (m as f64 + 2.0);
    }
    let mut m = k_max + 1;
    let mut sum = 0.0;
    loop {
        sum += term;
        let ratio = two_a / (m as f64 + 2.0);
        if ratio < 0.5 && term < sum * 1e-18 + 1e-300 {
            return scale * (sum + term * ratio / (1.0 - ratio));
        }
        term *= ratio;
        m += 1;
        if m > k_max + 100_000 {
            return f64::INFINITY;
        }
    }
}

fn choose_k_max(
    a: f64,
    budget: f64,
    cap: usize,
    tail: impl Fn(f64, usize) -> f64,
) -> Result<(usize, f64)> {
    for k in 0..=cap {
        let bound = tail(a, k);
        if bound <= budget {
            return Ok((k, bound));
        }
    }
    Err(Error::SeriesCapExceeded { cap, a_t: a })
}

/// The limiting mean `K(t) = sum_k (-1)^k psi_{k+1,k,k,A}(t,t)`, truncated at
/// the smallest `k_max` whose certified tail is below `epsilon`.
pub fn limit_mean(
    t: f64,
    model: &DensityModel,
    region: &RegionSpec,
    opts: &SeriesOptions,
) -> Result<(LimitValue, SeriesTruncation)> {
    opts.validate()?;
    region.validate(model.dimension)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    let a = tail_constant(t, model.dimension, model.sup_norm());
    let (k_max, tail_bound) = choose_k_max(a, opts.epsilon, opts.k_cap, mean_tail_bound)?;

    let terms: Result<Vec<PsiEstimate>> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let params = PsiParams { j: k + 1, k1: k, k2: k, t, s: t };
            psi_with(
                &params,
                model,
                region,
                opts.mc_samples,
                mix_seed(opts.seed, k as u64),
                opts.force_mc,
            )
        })
        .collect();
    let terms = terms?;

    let mut value = 0.0;
    let mut var = 0.0;
    for (k, est) in terms.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * est.value;
        var += est.std_error * est.std_error;
    }
    Ok((
        LimitValue { value, std_error: var.sqrt() },
        SeriesTruncation { k_max, tail_bound, a_t: a },
    ))
}

/// The limit covariance
/// `sum_{k1,k2} (-1)^(k1+k2) Psi_{k1,k2,A}(t,s)`,
/// truncated at a `(K, K)` square whose certified tail is below `epsilon/2`;
/// in-square terms whose individual bound falls below an equal share of the
/// remaining `epsilon/2` are skipped and charged to the reported tail, so the
/// total unaccounted mass stays below `epsilon`.
pub fn limit_covariance(
    t: f64,
    s: f64,
    model: &DensityModel,
    region: &RegionSpec,
    opts: &SeriesOptions,
) -> Result<(PsiEstimate, SeriesTruncation)> {
    opts.validate()?;
    region.validate(model.dimension)?;
    for v in [t, s] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t and s must be finite and nonnegative, got {v}"
            )));
        }
    }
    let a = tail_constant(t.max(s), model.dimension, model.sup_norm());
    let (k_max, square_tail) = choose_k_max(a, opts.epsilon / 2.0, opts.k_cap, cov_tail_bound)?;

    struct Term {
        params: PsiParams,
        sign: f64,
        bound: f64,
    }
    let mut terms = Vec::new();
    for k1 in 0..=k_max {
        for k2 in 0..=k_max {
            let sign = if (k1 + k2) % 2 == 0 { 1.0 } else { -1.0 };
            for j in 1..=(k1.min(k2) + 1) {
                let m = k1 + k2 + 1 - j;
                let bound = a.powi(m as i32)
                    / (factorial(j) * factorial(k1 + 1 - j) * factorial(k2 + 1 - j));
                terms.push(Term {
                    params: PsiParams { j, k1, k2, t, s },
                    sign,
                    bound,
                });
            }
        }
    }
    let skip_threshold = (opts.epsilon / 2.0) / terms.len() as f64;

    let evaluated: Result<Vec<(f64, f64, f64)>> = terms
        .par_iter()
        .enumerate()
        .map(|(i, term)| {
            if term.bound <= skip_threshold {
                return Ok((0.0, 0.0, term.bound));
            }
            let est = psi_with(
                &term.params,
                model,
                region,
                opts.mc_samples,
                mix_seed(opts.seed, i as u64),
                opts.force_mc,
            )?;
            Ok((term.sign * est.value, est.std_error, 0.0))
        })
        .collect();
    let evaluated = evaluated?;

    let mut value = 0.0;
    let mut var = 0.0;
    let mut skipped = 0.0;
    for (v, se, skip) in evaluated {
        value += v;
        var += se * se;
        skipped += skip;
    }
    Ok((
        PsiEstimate {
            value,
            std_error: var.sqrt(),
            samples: opts.mc_samples,
            method: EstimateMethod::MonteCarlo,
        },
        SeriesTruncation { k_max, tail_bound: square_tail + skipped, a_t: a },
    ))
}
