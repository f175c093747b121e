//! Open (r-2,2)-walk enumeration.
//!
//! An open walk `uWv` for the next round of a state is a pair `{u, v}` and an
//! (r-2)-set `W` of common neighbours such that `uv` is a non-edge, the pair is
//! allowed by the hub policy, and at least one of the `2(r-2)` pair–W edges was
//! added in the latest committed round.
//!
//! Three routes produce the same set:
//! * [`open_walks_bruteforce`] scans every candidate pair (reference).
//! * [`open_walks_incremental`] grows walks from the latest edges and
//!   deduplicates by canonical form.
//! * [`for_each_open_walk`] grows walks from the latest edges and emits each
//!   walk only from the smallest latest edge it contains, so it never
//!   materializes the set. The round engine uses this one.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{canonical_edge, GraphState};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpenWalk {
    pair: (u32, u32),
    walk_set: Vec<u32>,
}

impl OpenWalk {
    pub fn pair(&self) -> (u32, u32) {
        self.pair
    }

    pub fn walk_set(&self) -> &[u32] {
        &self.walk_set
    }

    /// The sampled r-set `{u, v} ∪ W`, sorted.
    pub fn rset(&self) -> Vec<u32> {
        let mut s = self.walk_set.clone();
        s.push(self.pair.0);
        s.push(self.pair.1);
        s.sort_unstable();
        s
    }
}

/// Canonical form: `u < v`, `W` sorted.
///
/// # Panics
/// If `u == v`, if `W` meets the pair, or if `W` has repeated vertices.
pub fn canonical_walk(u: u32, v: u32, walk_set: &[u32]) -> OpenWalk {
    assert_ne!(u, v, "pair endpoints must differ");
    assert!(
        !walk_set.contains(&u) && !walk_set.contains(&v),
        "walk set overlaps the pair"
    );
    let mut w = walk_set.to_vec();
    w.sort_unstable();
    assert!(w.windows(2).all(|x| x[0] != x[1]), "walk set has repeated vertices");
    OpenWalk {
        pair: canonical_edge(u, v),
        walk_set: w,
    }
}

/// Calls `f(k_subset)` for every k-subset of `items` in lexicographic index order.
pub(crate) fn for_each_subset(items: &[u32], k: usize, mut f: impl FnMut(&[u32])) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<u32> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        // advance the rightmost index that still has room
        let Some(i) = (0..k).rev().find(|&j| idx[j] < items.len() - k + j) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..k {
            buf[j] = items[idx[j]];
        }
    }
}

fn common_neighbors(state: &GraphState, a: u32, b: u32) -> Vec<u32> {
    let (small, other) = if state.degree(a) <= state.degree(b) { (a, b) } else { (b, a) };
    let mut out: Vec<u32> = state
        .neighbors(small)
        .iter()
        .copied()
        .filter(|&w| state.has_edge(other, w))
        .collect();
    out.sort_unstable();
    out
}

/// Reference enumeration over all candidate pairs. `O(n^2 Δ^(r-2))`.
pub fn open_walks_bruteforce(state: &GraphState) -> HashSet<OpenWalk> {
    let n = state.n() as u32;
    let k = state.r() - 2;
    let mut out = HashSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if !state.pair_allowed(u, v) || state.has_edge(u, v) {
                continue;
            }
            let common = common_neighbors(state, u, v);
            for_each_subset(&common, k, |w| {
                let fresh = w.iter().any(|&x| state.is_recent(u, x) || state.is_recent(v, x));
                if fresh {
                    out.insert(canonical_walk(u, v, w));
                }
            });
        }
    }
    out
}

/// Every discovery of a walk from a latest edge, duplicates included.
///
/// `f(a, v, b, t)` receives the pair endpoint `a` of the discovering edge
/// `(a, b)`, the other endpoint `v`, `b ∈ W`, and the rest `t` of `W`.
fn discover(state: &GraphState, new_edges: &[(u32, u32)], mut f: impl FnMut(u32, u32, u32, &[u32])) {
    let extra = state.r() - 3;
    let mut common = Vec::new();
    for &(x, y) in new_edges {
        for (a, b) in [(x, y), (y, x)] {
            for &v in state.neighbors(b) {
                if v == a || state.has_edge(a, v) || !state.pair_allowed(a, v) {
                    continue;
                }
                if extra == 0 {
                    f(a, v, b, &[]);
                    continue;
                }
                common.clear();
                common.extend(
                    common_neighbors(state, a, v)
                        .into_iter()
                        .filter(|&w| w != b),
                );
                for_each_subset(&common, extra, |t| f(a, v, b, t));
            }
        }
    }
}

/// Incremental enumeration from `new_edges` (the latest edges of `state`),
/// deduplicated through canonical form.
pub fn open_walks_incremental(state: &GraphState, new_edges: &[(u32, u32)]) -> HashSet<OpenWalk> {
    let mut out = HashSet::new();
    let mut w = Vec::with_capacity(state.r() - 2);
    discover(state, new_edges, |a, v, b, t| {
        w.clear();
        w.push(b);
        w.extend_from_slice(t);
        out.insert(canonical_walk(a, v, &w));
    });
    out
}

#[inline]
fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = canonical_edge(u, v);
    (a as u64) << 32 | b as u64
}

/// Streams every open walk of the next round exactly once as
/// `f(u, v, W)` with `u < v` and `W` sorted.
///
/// A walk is reported only from the smallest latest edge it contains.
pub fn for_each_open_walk(state: &GraphState, mut f: impl FnMut(u32, u32, &[u32])) {
    let mut w: Vec<u32> = Vec::with_capacity(state.r() - 2);
    discover(state, state.latest_edges(), |a, v, b, t| {
        let own = edge_key(a, b);
        let owned = [a, v].iter().all(|&x| {
            std::iter::once(b)
                .chain(t.iter().copied())
                .all(|y| !state.is_recent(x, y) || edge_key(x, y) >= own)
        });
        if !owned {
            return;
        }
        w.clear();
        w.push(b);
        w.extend_from_slice(t);
        w.sort_unstable();
        let (u, v) = canonical_edge(a, v);
        f(u, v, &w);
    });
}

/// Number of open walks of the next round.
pub fn count_open_walks(state: &GraphState) -> u64 {
    let mut count = 0;
    for_each_open_walk(state, |_, _, _| count += 1);
    count
}

/// All open walks of the next round, sorted.
pub fn open_walks(state: &GraphState) -> Vec<OpenWalk> {
    let mut out = Vec::new();
    for_each_open_walk(state, |u, v, w| {
        out.push(OpenWalk {
            pair: (u, v),
            walk_set: w.to_vec(),
        })
    });
    out.sort_unstable();
    out
}
