//! Neighbor search by grid bucketing.

use std::collections::HashMap;

/// Sorted adjacency lists of the geometric graph with edge rule
/// `||x - y|| <= threshold`.
///
/// Points are hashed into a grid with cell side `threshold`, so only the
/// 3^d surrounding cells need scanning; in the critical regime each cell
/// holds O(1) points. A nonpositive threshold connects exact duplicates only.
pub(crate) fn build_adjacency(coords: &[f64], dim: usize, threshold: f64) -> Vec<Vec<u32>> {
    let n = if dim == 0 { 0 } else { coords.len() / dim };
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    if n == 0 {
        return adj;
    }

    if threshold <= 0.0 {
        // Only coincident points; bucket by exact coordinate bits.
        let mut buckets: HashMap<Vec<u64>, Vec<u32>> = HashMap::new();
        for i in 0..n {
            let key: Vec<u64> = coords[i * dim..(i + 1) * dim]
                .iter()
                .map(|x| x.to_bits())
                .collect();
            buckets.entry(key).or_default().push(i as u32);
        }
        for group in buckets.values() {
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    adj[i as usize].push(j);
                    adj[j as usize].push(i);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        return adj;
    }

    let mut mins = vec![f64::INFINITY; dim];
    for i in 0..n {
        for (k, m) in mins.iter_mut().enumerate() {
            let v = coords[i * dim + k];
            if v < *m {
                *m = v;
            }
        }
    }

    let cell_of = |i: usize| -> Vec<i64> {
        (0..dim)
            .map(|k| ((coords[i * dim + k] - mins[k]) / threshold).floor() as i64)
            .collect()
    };

    let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
    for i in 0..n {
        buckets.entry(cell_of(i)).or_default().push(i as u32);
    }

    let t2 = threshold * threshold;
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(offsets.len() * 3);
        for o in &offsets {
            for step in [-1i64, 0, 1] {
                let mut v = o.clone();
                v.push(step);
                next.push(v);
            }
        }
        offsets = next;
    }

    let mut key = vec![0i64; dim];
    for i in 0..n {
        let home = cell_of(i);
        for off in &offsets {
            for k in 0..dim {
                key[k] = home[k] + off[k];
            }
            if let Some(cands) = buckets.get(&key) {
                for &j in cands {
                    if j as usize <= i {
                        continue;
                    }
                    let mut d2 = 0.0;
                    for k in 0..dim {
                        let d = coords[i * dim + k] - coords[j as usize * dim + k];
                        d2 += d * d;
                    }
                    if d2 <= t2 {
                        adj[i].push(j);
                        adj[j as usize].push(i as u32);
                    }
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(coords: &[f64], dim: usize, threshold: f64) -> Vec<Vec<u32>> {
        let n = coords.len() / dim;
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let mut d2 = 0.0;
                for k in 0..dim {
                    let d = coords[i * dim + k] - coords[j * dim + k];
                    d2 += d * d;
                }
                if d2 <= threshold * threshold {
                    adj[i].push(j as u32);
                    adj[j].push(i as u32);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    #[test]
    fn grid_matches_brute_force() {
        use crate::rng::rng_from_seed;
        use rand::Rng;
        let mut rng = rng_from_seed(3);
        for dim in [1usize, 2, 3] {
            let n = 60;
            let coords: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
            for threshold in [0.05, 0.2, 0.7] {
                assert_eq!(
                    build_adjacency(&coords, dim, threshold),
                    brute(&coords, dim, threshold),
                    "dim {dim} threshold {threshold}"
                );
            }
        }
    }

    #[test]
    fn zero_threshold_connects_duplicates_only() {
        let coords = vec![0.5, 0.5, 0.25, 0.5];
        let adj = build_adjacency(&coords, 1, 0.0);
        assert_eq!(adj, vec![vec![1, 3], vec![0, 3], vec![], vec![0, 1]]);
    }
}
