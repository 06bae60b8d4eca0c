//! Vietoris-Rips clique filtrations and the exact Euler characteristic
//! step process.
//!
//! Convention: the filtration parameter `t` means balls of radius `t`, so an
//! edge forms when `||x - y|| <= 2t`. The birth radius of a clique is half its
//! diameter (max pairwise distance), and in a scaled cloud the birth *time* is
//! `birth_radius / s_n`. Equal birth times aggregate into a single breakpoint,
//! so the curve is a function of `t`, not of event order.
//!
//! Enumeration is by ordered extension: every clique is grown only by
//! higher-indexed common neighbors, hence emitted exactly once. Neighbor
//! search uses grid bucketing with cell side equal to the edge threshold.

mod adjacency;

use std::collections::HashMap;
use std::io::Write;
use std::sync::atomic::{AtomicBool, AtomicI64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::region::RegionSpec;
use crate::{Error, Result};

use adjacency::build_adjacency;

/// Default clique budget guard.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 100_000_000;

/// Relative inflation of the enumeration threshold. Cliques within one part
/// in 1e9 of the radius cutoff are emitted and then classified by the exact
/// birth predicate, so threshold rounding can never drop a boundary clique.
const THRESHOLD_INFLATE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipsOptions {
    /// Suppress cliques with more than `dim_cap + 1` vertices when set.
    pub dim_cap: Option<usize>,
    /// Abort enumeration after this many cliques.
    pub budget: u64,
}

impl Default for RipsOptions {
    fn default() -> Self {
        Self { dim_cap: None, budget: DEFAULT_CLIQUE_BUDGET }
    }
}

/// A clique of the geometric graph together with its birth radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationSimplex {
    /// Strictly increasing vertex indices; `k + 1` of them for a `k`-simplex.
    pub vertices: Vec<u32>,
    /// Half the max pairwise distance; 0 for vertices.
    pub birth_radius: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CliqueMeta {
    pub clique_count: u64,
    /// True when `dim_cap` suppressed at least one extension.
    pub truncated: bool,
    pub max_dim: usize,
}

/// The Euler characteristic as a right-continuous step function of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerCurve {
    /// Strictly increasing breakpoints, all > 0, in the time parameter.
    pub breakpoints: Vec<f64>,
    /// Value on `[breakpoints[i], breakpoints[i+1])`.
    pub values: Vec<i64>,
    /// Value on `[0, breakpoints[0])`.
    pub initial_value: i64,
    pub meta: CurveMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub seed: u64,
    pub n: f64,
    pub dim: usize,
    pub t_max: f64,
    pub dim_cap: Option<usize>,
    pub truncated: bool,
    pub clique_count: u64,
}

impl EulerCurve {
    /// Right-continuous evaluation at `t >= 0`.
    pub fn value_at(&self, t: f64) -> i64 {
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// CSV rows `(segment_start, value)` starting with `(0, initial_value)`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,chi")?;
        writeln!(w, "0,{}", self.initial_value)?;
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            writeln!(w, "{b},{v}")?;
        }
        Ok(())
    }
}

struct EnumContext<'a> {
    coords: &'a [f64],
    dim: usize,
    adj: &'a [Vec<u32>],
    dim_cap: Option<usize>,
    budget_left: &'a AtomicI64,
    aborted: &'a AtomicBool,
}

#[derive(Default)]
struct EnumState {
    count: u64,
    truncated: bool,
    max_size: usize,
}

fn dist2(coords: &[f64], dim: usize, a: u32, b: u32) -> f64 {
    let pa = &coords[a as usize * dim..(a as usize + 1) * dim];
    let pb = &coords[b as usize * dim..(b as usize + 1) * dim];
    let mut s = 0.0;
    for i in 0..dim {
        let d = pa[i] - pb[i];
        s += d * d;
    }
    s
}

fn lex_less(coords: &[f64], dim: usize, a: u32, b: u32) -> bool {
    let pa = &coords[a as usize * dim..(a as usize + 1) * dim];
    let pb = &coords[b as usize * dim..(b as usize + 1) * dim];
    for i in 0..dim {
        if pa[i] < pb[i] {
            return true;
        }
        if pa[i] > pb[i] {
            return false;
        }
    }
    // Exact duplicates: keep the lower index as the representative.
    false
}

/// Depth-first ordered extension from one start vertex. The visitor receives
/// `(vertices, max_dist2, lmp_index)` for every clique containing `start` as
/// its minimum index.
fn enumerate_from<V: FnMut(&[u32], f64, u32)>(
    start: u32,
    ctx: &EnumContext<'_>,
    state: &mut EnumState,
    visit: &mut V,
) -> Result<()> {
    let mut current = vec![start];
    let cand: Vec<u32> = ctx.adj[start as usize]
        .iter()
        .copied()
        .filter(|&u| u > start)
        .collect();
    emit(ctx, state, &current, 0.0, start, visit)?;
    extend(ctx, state, &mut current, &cand, 0.0, start, visit)
}

fn emit<V: FnMut(&[u32], f64, u32)>(
    ctx: &EnumContext<'_>,
    state: &mut EnumState,
    current: &[u32],
    max_d2: f64,
    lmp: u32,
    visit: &mut V,
) -> Result<()> {
    if ctx.budget_left.fetch_sub(1, Ordering::Relaxed) <= 0 {
        ctx.aborted.store(true, Ordering::Relaxed);
        return Err(Error::CliqueBudgetExceeded { budget: 0 });
    }
    state.count += 1;
    state.max_size = state.max_size.max(current.len());
    visit(current, max_d2, lmp);
    Ok(())
}

fn extend<V: FnMut(&[u32], f64, u32)>(
    ctx: &EnumContext<'_>,
    state: &mut EnumState,
    current: &mut Vec<u32>,
    cand: &[u32],
    max_d2: f64,
    lmp: u32,
    visit: &mut V,
) -> Result<()> {
    if ctx.aborted.load(Ordering::Relaxed) {
        return Err(Error::CliqueBudgetExceeded { budget: 0 });
    }
    let at_cap = ctx
        .dim_cap
        .is_some_and(|cap| current.len() >= cap + 1);
    if at_cap {
        if !cand.is_empty() {
            state.truncated = true;
        }
        return Ok(());
    }
    for (pos, &u) in cand.iter().enumerate() {
        let mut m2 = max_d2;
        for &w in current.iter() {
            let d = dist2(ctx.coords, ctx.dim, w, u);
            if d > m2 {
                m2 = d;
            }
        }
        let new_lmp = if lex_less(ctx.coords, ctx.dim, u, lmp) { u } else { lmp };
        current.push(u);
        emit(ctx, state, current, m2, new_lmp, visit)?;
        let next_cand: Vec<u32> = intersect_sorted(&cand[pos + 1..], &ctx.adj[u as usize]);
        if !next_cand.is_empty() {
            extend(ctx, state, current, &next_cand, m2, new_lmp, visit)?;
        }
        current.pop();
    }
    Ok(())
}

/// Intersection of two ascending slices (`a` is already filtered past the pivot).
fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// All cliques of the geometric graph with edge rule `||x - y|| <= 2 * max_radius`,
/// each with its birth radius, in deterministic enumeration order.
pub fn enumerate_cliques(
    cloud: &PointCloud,
    max_radius: f64,
    opts: &RipsOptions,
) -> Result<(Vec<FiltrationSimplex>, CliqueMeta)> {
    if !(max_radius >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max_radius must be nonnegative, got {max_radius}"
        )));
    }
    let threshold = 2.0 * max_radius;
    let adj = build_adjacency(
        &cloud.coords,
        cloud.dim,
        threshold * (1.0 + THRESHOLD_INFLATE),
    );
    let budget_left = AtomicI64::new(opts.budget as i64);
    let aborted = AtomicBool::new(false);
    let ctx = EnumContext {
        coords: &cloud.coords,
        dim: cloud.dim,
        adj: &adj,
        dim_cap: opts.dim_cap,
        budget_left: &budget_left,
        aborted: &aborted,
    };
    let mut state = EnumState::default();
    let mut simplices = Vec::new();
    for start in 0..cloud.len() as u32 {
        enumerate_from(start, &ctx, &mut state, &mut |verts, max_d2, _| {
            let birth = max_d2.sqrt() / 2.0;
            if birth <= max_radius {
                simplices.push(FiltrationSimplex {
                    vertices: verts.to_vec(),
                    birth_radius: birth,
                });
            }
        })
        .map_err(|e| remap_budget(e, opts.budget))?;
    }
    let meta = CliqueMeta {
        clique_count: state.count,
        truncated: state.truncated,
        max_dim: state.max_size.saturating_sub(1),
    };
    Ok((simplices, meta))
}

fn remap_budget(e: Error, budget: u64) -> Error {
    match e {
        Error::CliqueBudgetExceeded { .. } => Error::CliqueBudgetExceeded { budget },
        other => other,
    }
}

/// Parallel sweep over start vertices, merging per-task delta maps keyed by
/// birth-radius bits. Integer deltas merge commutatively, so the result does
/// not depend on task scheduling.
fn accumulate_deltas(
    cloud: &PointCloud,
    max_radius: f64,
    region: &RegionSpec,
    opts: &RipsOptions,
) -> Result<(HashMap<u64, i64>, CliqueMeta)> {
    let threshold = 2.0 * max_radius;
    let adj = build_adjacency(
        &cloud.coords,
        cloud.dim,
        threshold * (1.0 + THRESHOLD_INFLATE),
    );
    let budget_left = AtomicI64::new(opts.budget as i64);
    let aborted = AtomicBool::new(false);
    let n = cloud.len() as u32;
    let starts: Vec<u32> = (0..n).collect();
    let chunk = (n as usize / (rayon::current_num_threads() * 8)).max(64);

    let partials: Result<Vec<(HashMap<u64, i64>, CliqueMeta)>> = starts
        .par_chunks(chunk)
        .map(|chunk_starts| {
            let ctx = EnumContext {
                coords: &cloud.coords,
                dim: cloud.dim,
                adj: &adj,
                dim_cap: opts.dim_cap,
                budget_left: &budget_left,
                aborted: &aborted,
            };
            let mut state = EnumState::default();
            let mut deltas: HashMap<u64, i64> = HashMap::new();
            for &start in chunk_starts {
                enumerate_from(start, &ctx, &mut state, &mut |verts, max_d2, lmp| {
                    if !region.is_all_space() && !region.contains(cloud.point(lmp as usize)) {
                        return;
                    }
                    let birth = max_d2.sqrt() / 2.0;
                    let sign: i64 = if verts.len() % 2 == 1 { 1 } else { -1 };
                    *deltas.entry(birth.to_bits()).or_insert(0) += sign;
                })?;
            }
            let meta = CliqueMeta {
                clique_count: state.count,
                truncated: state.truncated,
                max_dim: state.max_size.saturating_sub(1),
            };
            Ok((deltas, meta))
        })
        .collect();

    let partials = partials.map_err(|e| remap_budget(e, opts.budget))?;
    let mut deltas: HashMap<u64, i64> = HashMap::new();
    let mut meta = CliqueMeta::default();
    for (part, m) in partials {
        for (k, v) in part {
            *deltas.entry(k).or_insert(0) += v;
        }
        meta.clique_count += m.clique_count;
        meta.truncated |= m.truncated;
        meta.max_dim = meta.max_dim.max(m.max_dim);
    }
    Ok((deltas, meta))
}

/// The Euler characteristic process `chi_{n,A}(t)` on `[0, t_max]`.
///
/// Each clique whose left-most point (lexicographic minimum of vertex
/// coordinates) lies in the region contributes `(-1)^(|sigma|-1)` at its
/// birth time. `RegionSpec::AllSpace` reproduces the unrestricted process.
pub fn euler_curve(
    cloud: &PointCloud,
    t_max: f64,
    region: &RegionSpec,
    opts: &RipsOptions,
) -> Result<EulerCurve> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_max must be finite and nonnegative, got {t_max}"
        )));
    }
    region.validate(cloud.dim)?;
    let meta_base = |truncated, clique_count| CurveMeta {
        seed: cloud.seed,
        n: cloud.ctx.n,
        dim: cloud.dim,
        t_max,
        dim_cap: opts.dim_cap,
        truncated,
        clique_count,
    };
    if cloud.is_empty() {
        return Ok(EulerCurve {
            breakpoints: vec![],
            values: vec![],
            initial_value: 0,
            meta: meta_base(false, 0),
        });
    }
    let s_n = cloud.ctx.s_n;
    let max_radius = cloud.ctx.radius_at(t_max);
    let (radius_deltas, meta) = accumulate_deltas(cloud, max_radius, region, opts)?;

    // Regroup by birth time; distinct radii can collapse after division.
    let mut time_deltas: HashMap<u64, i64> = HashMap::new();
    for (bits, delta) in radius_deltas {
        let t_birth = f64::from_bits(bits) / s_n;
        *time_deltas.entry(t_birth.to_bits()).or_insert(0) += delta;
    }
    let mut events: Vec<(f64, i64)> = time_deltas
        .into_iter()
        .map(|(bits, d)| (f64::from_bits(bits), d))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut initial_value = 0i64;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut acc = 0i64;
    for (t, d) in events {
        if t == 0.0 {
            initial_value += d;
            acc += d;
        } else if t <= t_max {
            if d != 0 {
                acc += d;
                breakpoints.push(t);
                values.push(acc);
            }
        }
        // Threshold inflation can leave events just past t_max; drop them.
    }
    Ok(EulerCurve {
        breakpoints,
        values,
        initial_value,
        meta: meta_base(meta.truncated, meta.clique_count),
    })
}

/// Per-dimension simplex counts `S_k` at time `t` (scaled radius `s_n * t`).
///
/// Consistent with [`euler_curve`] through the alternating sum.
pub fn simplex_counts(
    cloud: &PointCloud,
    t: f64,
    opts: &RipsOptions,
) -> Result<(Vec<u64>, CliqueMeta)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    if cloud.is_empty() {
        return Ok((vec![0], CliqueMeta::default()));
    }
    let radius = cloud.ctx.radius_at(t);
    let s_n = cloud.ctx.s_n;
    counts_at(cloud, radius, opts, |birth| birth / s_n <= t)
}

/// `S_k` at an unscaled radius (the time parameter is bypassed entirely).
pub fn simplex_counts_at_radius(
    cloud: &PointCloud,
    radius: f64,
    opts: &RipsOptions,
) -> Result<(Vec<u64>, CliqueMeta)> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be finite and nonnegative, got {radius}"
        )));
    }
    if cloud.is_empty() {
        return Ok((vec![0], CliqueMeta::default()));
    }
    counts_at(cloud, radius, opts, |birth| birth <= radius)
}

fn counts_at(
    cloud: &PointCloud,
    radius: f64,
    opts: &RipsOptions,
    include: impl Fn(f64) -> bool + Sync,
) -> Result<(Vec<u64>, CliqueMeta)> {
    let threshold = 2.0 * radius;
    let adj = build_adjacency(
        &cloud.coords,
        cloud.dim,
        threshold * (1.0 + THRESHOLD_INFLATE),
    );
    let budget_left = AtomicI64::new(opts.budget as i64);
    let aborted = AtomicBool::new(false);
    let n = cloud.len() as u32;
    let starts: Vec<u32> = (0..n).collect();
    let chunk = (n as usize / (rayon::current_num_threads() * 8)).max(64);

    let partials: Result<Vec<(Vec<u64>, CliqueMeta)>> = starts
        .par_chunks(chunk)
        .map(|chunk_starts| {
            let ctx = EnumContext {
                coords: &cloud.coords,
                dim: cloud.dim,
                adj: &adj,
                dim_cap: opts.dim_cap,
                budget_left: &budget_left,
                aborted: &aborted,
            };
            let mut state = EnumState::default();
            let mut counts: Vec<u64> = Vec::new();
            for &start in chunk_starts {
                enumerate_from(start, &ctx, &mut state, &mut |verts, max_d2, _| {
                    let birth = max_d2.sqrt() / 2.0;
                    if include(birth) {
                        let k = verts.len() - 1;
                        if counts.len() <= k {
                            counts.resize(k + 1, 0);
                        }
                        counts[k] += 1;
                    }
                })?;
            }
            let meta = CliqueMeta {
                clique_count: state.count,
                truncated: state.truncated,
                max_dim: state.max_size.saturating_sub(1),
            };
            Ok((counts, meta))
        })
        .collect();

    let partials = partials.map_err(|e| remap_budget(e, opts.budget))?;
    let mut counts: Vec<u64> = vec![0];
    let mut meta = CliqueMeta::default();
    for (part, m) in partials {
        if counts.len() < part.len() {
            counts.resize(part.len(), 0);
        }
        for (k, c) in part.into_iter().enumerate() {
            counts[k] += c;
        }
        meta.clique_count += m.clique_count;
        meta.truncated |= m.truncated;
        meta.max_dim = meta.max_dim.max(m.max_dim);
    }
    Ok((counts, meta))
}

/// Vertex sets of all `k`-simplices present at an unscaled radius.
pub fn collect_k_simplices_at_radius(
    cloud: &PointCloud,
    k: usize,
    radius: f64,
    budget: u64,
) -> Result<Vec<Vec<u32>>> {
    let opts = RipsOptions { dim_cap: Some(k), budget };
    let (simplices, _) = enumerate_cliques(cloud, radius, &opts)?;
    Ok(simplices
        .into_iter()
        .filter(|s| s.vertices.len() == k + 1)
        .map(|s| s.vertices)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::ScalingContext;

    fn cloud_1d(points: &[f64], n: f64) -> PointCloud {
        let ctx = ScalingContext::new(n, 1).unwrap();
        PointCloud::from_points(points.iter().map(|&x| vec![x]).collect(), ctx, 0).unwrap()
    }

    #[test]
    fn collinear_points_small_radius() {
        // Points at 0, 1, 2 with max_radius 0.5: pairwise distances 1, 1, 2.
        let cloud = cloud_1d(&[0.0, 1.0, 2.0], 1.0);
        let (simplices, meta) =
            enumerate_cliques(&cloud, 0.5, &RipsOptions::default()).unwrap();
        let mut edges: Vec<(Vec<u32>, f64)> = simplices
            .iter()
            .filter(|s| s.vertices.len() == 2)
            .map(|s| (s.vertices.clone(), s.birth_radius))
            .collect();
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(simplices.iter().filter(|s| s.vertices.len() == 1).count(), 3);
        assert_eq!(edges.len(), 2);
        assert_eq!(edges[0], (vec![0, 1], 0.5));
        assert_eq!(edges[1], (vec![1, 2], 0.5));
        assert!(simplices.iter().all(|s| s.vertices.len() <= 2));
        assert!(!meta.truncated);
    }

    #[test]
    fn collinear_points_larger_radius_adds_triangle() {
        let cloud = cloud_1d(&[0.0, 1.0, 2.0], 1.0);
        let (simplices, _) = enumerate_cliques(&cloud, 1.0, &RipsOptions::default()).unwrap();
        let triangle: Vec<_> = simplices
            .iter()
            .filter(|s| s.vertices.len() == 3)
            .collect();
        assert_eq!(triangle.len(), 1);
        assert_eq!(triangle[0].vertices, vec![0, 1, 2]);
        assert_eq!(triangle[0].birth_radius, 1.0);
        let long_edge: Vec<_> = simplices
            .iter()
            .filter(|s| s.vertices == vec![0, 2])
            .collect();
        assert_eq!(long_edge[0].birth_radius, 1.0);
    }

    #[test]
    fn two_point_curve() {
        // Two points at distance 2 * s_n: curve is 2 on [0,1), 1 afterwards.
        let n = 16.0;
        let ctx = ScalingContext::new(n, 1).unwrap();
        let s_n = ctx.s_n;
        let cloud =
            PointCloud::from_points(vec![vec![0.0], vec![2.0 * s_n]], ctx, 0).unwrap();
        let curve =
            euler_curve(&cloud, 3.0, &RegionSpec::AllSpace, &RipsOptions::default()).unwrap();
        assert_eq!(curve.initial_value, 2);
        assert_eq!(curve.breakpoints, vec![1.0]);
        assert_eq!(curve.values, vec![1]);
        assert_eq!(curve.value_at(0.0), 2);
        assert_eq!(curve.value_at(0.999), 2);
        assert_eq!(curve.value_at(1.0), 1);
        assert_eq!(curve.value_at(3.0), 1);
    }

    #[test]
    fn value_at_zero_is_point_count() {
        let cloud = cloud_1d(&[0.1, 0.4, 0.5, 0.9], 4.0);
        let curve =
            euler_curve(&cloud, 0.0, &RegionSpec::AllSpace, &RipsOptions::default()).unwrap();
        assert_eq!(curve.value_at(0.0), 4);
    }

    #[test]
    fn disjoint_region_gives_zero_curve() {
        let cloud = cloud_1d(&[0.1, 0.2, 0.3], 3.0);
        let region = RegionSpec::bounded_box(vec![5.0], vec![6.0]).unwrap();
        let curve = euler_curve(&cloud, 2.0, &region, &RipsOptions::default()).unwrap();
        assert_eq!(curve.initial_value, 0);
        assert!(curve.breakpoints.is_empty());
    }

    #[test]
    fn triangle_counts_and_alternating_sum() {
        let cloud = cloud_1d(&[0.0, 0.3, 0.6], 1.0);
        let (counts, _) = simplex_counts(&cloud, 1.0, &RipsOptions::default()).unwrap();
        assert_eq!(counts, vec![3, 3, 1]);
        let chi: i64 = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum();
        assert_eq!(chi, 1);
    }

    #[test]
    fn counts_at_time_zero() {
        let cloud = cloud_1d(&[0.0, 0.25, 0.5, 0.75, 1.0], 5.0);
        let (counts, _) = simplex_counts(&cloud, 0.0, &RipsOptions::default()).unwrap();
        assert_eq!(counts, vec![5]);
    }

    #[test]
    fn dim_cap_truncates_and_flags() {
        let cloud = cloud_1d(&[0.0, 0.1, 0.2], 1.0);
        let opts = RipsOptions { dim_cap: Some(1), budget: DEFAULT_CLIQUE_BUDGET };
        let (simplices, meta) = enumerate_cliques(&cloud, 1.0, &opts).unwrap();
        assert!(meta.truncated);
        assert!(simplices.iter().all(|s| s.vertices.len() <= 2));
        let curve = euler_curve(&cloud, 1.0, &RegionSpec::AllSpace, &opts).unwrap();
        assert!(curve.meta.truncated);
    }

    #[test]
    fn clique_budget_guard_trips() {
        let cloud = cloud_1d(&[0.0, 0.01, 0.02, 0.03, 0.04, 0.05], 1.0);
        let opts = RipsOptions { dim_cap: None, budget: 10 };
        let err = enumerate_cliques(&cloud, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::CliqueBudgetExceeded { budget: 10 }));
    }

    #[test]
    fn full_clique_curve_ends_at_one() {
        // All points pairwise within the radius: chi = 1 from t = diam/(2 s_n) on.
        let cloud = cloud_1d(&[0.0, 0.1, 0.15, 0.22, 0.3], 1.0);
        let curve =
            euler_curve(&cloud, 1.0, &RegionSpec::AllSpace, &RipsOptions::default()).unwrap();
        assert_eq!(curve.value_at(1.0), 1);
        assert_eq!(curve.value_at(0.15), 1); // diam 0.3, s_n = 1, birth time 0.15
    }

    #[test]
    fn scale_invariance_of_counts() {
        // Scaling coordinates and the evaluation radius by c leaves S_k unchanged.
        let base = vec![
            vec![0.12, 0.9],
            vec![0.3, 0.41],
            vec![0.35, 0.47],
            vec![0.55, 0.22],
            vec![0.61, 0.25],
            vec![0.7, 0.7],
        ];
        let ctx = ScalingContext::new(6.0, 2).unwrap();
        let cloud = PointCloud::from_points(base.clone(), ctx, 0).unwrap();
        let c = 3.7;
        let scaled: Vec<Vec<f64>> = base
            .iter()
            .map(|p| p.iter().map(|x| x * c).collect())
            .collect();
        let cloud_scaled = PointCloud::from_points(scaled, ctx, 0).unwrap();
        for r in [0.05, 0.1, 0.2, 0.4] {
            let (a, _) =
                simplex_counts_at_radius(&cloud, r, &RipsOptions::default()).unwrap();
            let (b, _) =
                simplex_counts_at_radius(&cloud_scaled, r * c, &RipsOptions::default()).unwrap();
            assert_eq!(a, b, "counts differ at radius {r}");
        }
    }

    #[test]
    fn curve_csv_format() {
        let n = 16.0;
        let ctx = ScalingContext::new(n, 1).unwrap();
        let cloud =
            PointCloud::from_points(vec![vec![0.0], vec![2.0 * ctx.s_n]], ctx, 0).unwrap();
        let curve =
            euler_curve(&cloud, 2.0, &RegionSpec::AllSpace, &RipsOptions::default()).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,chi\n0,2\n1,1\n");
    }
}
