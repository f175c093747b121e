//! The evolving simple graph G(i).
//!
//! Vertices `0..r-2` are the hubs, `r-2..n` the non-hubs. Edge membership is a
//! dense bit matrix; a second bit matrix marks the edges stamped in the latest
//! committed round, which is all the walk enumerator needs to know about stamps.

use crate::config::{HubPairPolicy, ProcessConfig};
use crate::error::ConfigError;

/// Square symmetric bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> bool {
        let (u, v) = (u as usize, v as usize);
        self.bits[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn set_one(&mut self, u: usize, v: usize, on: bool) {
        let w = &mut self.bits[u * self.words_per_row + v / 64];
        if on {
            *w |= 1 << (v % 64);
        } else {
            *w &= !(1 << (v % 64));
        }
    }

    /// Sets both `(u, v)` and `(v, u)`.
    #[inline]
    pub fn set(&mut self, u: u32, v: u32, on: bool) {
        self.set_one(u as usize, v as usize, on);
        self.set_one(v as usize, u as usize, on);
    }

    pub fn row(&self, u: u32) -> &[u64] {
        let start = u as usize * self.words_per_row;
        &self.bits[start..start + self.words_per_row]
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone)]
pub struct GraphState {
    n: usize,
    r: usize,
    policy: HubPairPolicy,
    adjacency: BitMatrix,
    recent: BitMatrix,
    /// Neighbors in insertion order, so stamps are non-decreasing along each list.
    neighbors: Vec<Vec<u32>>,
    stamps: Vec<Vec<u32>>,
    latest: Vec<(u32, u32)>,
    current_round: u32,
    edge_count: usize,
    nonhub_edge_count: usize,
}

impl GraphState {
    /// G(0): the complete bipartite graph between the hubs and everything else,
    /// all edges stamped 0.
    pub fn init(config: &ProcessConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let (n, r) = (config.n, config.r);
        let hubs = r - 2;
        let mut state = Self {
            n,
            r,
            policy: config.hub_pair_policy,
            adjacency: BitMatrix::new(n),
            recent: BitMatrix::new(n),
            neighbors: vec![Vec::new(); n],
            stamps: vec![Vec::new(); n],
            latest: Vec::with_capacity(hubs * (n - hubs)),
            current_round: 0,
            edge_count: 0,
            nonhub_edge_count: 0,
        };
        for h in 0..hubs as u32 {
            for u in hubs as u32..n as u32 {
                state.insert(h, u, 0);
                state.latest.push((h, u));
            }
        }
        Ok(state)
    }

    fn insert(&mut self, u: u32, v: u32, stamp: u32) {
        debug_assert!(u != v && !self.adjacency.get(u, v));
        self.adjacency.set(u, v, true);
        self.recent.set(u, v, true);
        self.neighbors[u as usize].push(v);
        self.neighbors[v as usize].push(u);
        self.stamps[u as usize].push(stamp);
        self.stamps[v as usize].push(stamp);
        self.edge_count += 1;
        if !self.is_hub(u) && !self.is_hub(v) {
            self.nonhub_edge_count += 1;
        }
    }

    /// Commits a round: every edge in `edges` is stamped `current_round + 1`.
    ///
    /// The caller guarantees the edges are distinct non-edges.
    pub fn commit_round(&mut self, edges: &[(u32, u32)]) {
        for &(u, v) in &self.latest {
            self.recent.set(u, v, false);
        }
        self.current_round += 1;
        let stamp = self.current_round;
        self.latest.clear();
        for &(u, v) in edges {
            let e = canonical_edge(u, v);
            self.insert(e.0, e.1, stamp);
            self.latest.push(e);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn hub_count(&self) -> usize {
        self.r - 2
    }

    pub fn nonhub_count(&self) -> usize {
        self.n - self.hub_count()
    }

    pub fn policy(&self) -> HubPairPolicy {
        self.policy
    }

    #[inline]
    pub fn is_hub(&self, v: u32) -> bool {
        (v as usize) < self.r - 2
    }

    /// Whether `{u, v}` may be sampled as the pair of an open walk.
    #[inline]
    pub fn pair_allowed(&self, u: u32, v: u32) -> bool {
        match self.policy {
            HubPairPolicy::Exclude => !self.is_hub(u) && !self.is_hub(v),
            HubPairPolicy::Include => true,
        }
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency.get(u, v)
    }

    /// Whether `{u, v}` was added in the latest committed round.
    #[inline]
    pub fn is_recent(&self, u: u32, v: u32) -> bool {
        self.recent.get(u, v)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors[v as usize].len()
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    /// Edges stamped in the latest committed round.
    pub fn recent(&self) -> &BitMatrix {
        &self.recent
    }

    /// Round in which `{u, v}` was added, if it is an edge.
    pub fn edge_stamp(&self, u: u32, v: u32) -> Option<u32> {
        if !self.has_edge(u, v) {
            return None;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors[a as usize]
            .iter()
            .position(|&w| w == b)
            .map(|i| self.stamps[a as usize][i])
    }

    /// Edges stamped with the current round, in canonical `(min, max)` form.
    pub fn latest_edges(&self) -> &[(u32, u32)] {
        &self.latest
    }

    pub fn current_round(&self) -> u32 {
        self.current_round
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Edges with both endpoints outside the hub set.
    pub fn nonhub_edge_count(&self) -> usize {
        self.nonhub_edge_count
    }

    /// All edges with their stamps, canonical and sorted.
    pub fn edges(&self) -> Vec<((u32, u32), u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n as u32 {
            for (&v, &s) in self.neighbors[u as usize].iter().zip(&self.stamps[u as usize]) {
                if u < v {
                    out.push(((u, v), s));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[inline]
pub fn canonical_edge(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}
