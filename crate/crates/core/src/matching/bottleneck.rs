//! Exact bottleneck distances under the L1 norm.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::geometry::{l1_dist, Point};
use crate::{Error, Result};

/// Largest input `brute_force_bottleneck` accepts (`8! = 40320` bijections).
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Size of a maximum matching in the bipartite graph `adj` (left vertex `i`
/// is adjacent to the right vertices `adj[i]`).
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left = adj.len();
    let mut match_left = alloc::vec![FREE; left];
    let mut match_right = alloc::vec![FREE; right];
    let mut dist = alloc::vec![0usize; left];
    let mut size = 0;
    loop {
        // Layer free left vertices, then alternate along matched edges.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    FREE => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return size;
        }
        for u in 0..left {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut dist) {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_right[v];
        let ok = w == usize::MAX
            || (dist[w] == dist[u].wrapping_add(1) && augment(w, adj, match_left, match_right, dist));
        if ok {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Minimum over injections `small -> large` of the longest L1 edge.
///
/// Binary search over the sorted distinct pairwise distances (the optimum is
/// one of them) with a Hopcroft-Karp saturation test at each threshold.
pub fn exact_partial_bottleneck(small: &[Point], large: &[Point]) -> Result<f64> {
    if small.len() > large.len() {
        return Err(Error::SizeMismatch {
            left: small.len(),
            right: large.len(),
        });
    }
    if small.is_empty() {
        return Ok(0.0);
    }
    let dist: Vec<Vec<f64>> = small
        .iter()
        .map(|&p| large.iter().map(|&q| l1_dist(p, q)).collect())
        .collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();

    let saturates = |t: f64| {
        let adj: Vec<Vec<usize>> = dist
            .iter()
            .map(|row| (0..row.len()).filter(|&j| row[j] <= t).collect())
            .collect();
        hopcroft_karp(&adj, large.len()) == small.len()
    };
    // The largest candidate always admits a full matching.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if saturates(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Bottleneck distance `d_B(P, Q)`: minimum over bijections of the longest
/// L1 edge.
pub fn exact_bottleneck(p: &[Point], q: &[Point]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    exact_partial_bottleneck(p, q)
}

/// Bottleneck distance by enumerating every bijection. Sizes up to
/// [`BRUTE_FORCE_LIMIT`] only.
pub fn brute_force_bottleneck(p: &[Point], q: &[Point]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let n = p.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let cost = |perm: &[usize]| {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| l1_dist(p[i], q[j]))
            .fold(0.0, f64::max)
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = cost(&perm);
    // Heap's algorithm, iterative form.
    let mut c = alloc::vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}
