//! Exact outcome distribution of tiny instances by enumerating every
//! hyperedge assignment of the r-sets the process can reach.
//!
//! Deliberately shares no code with the engine or the enumerators: the graph is
//! a plain stamp matrix and open walks are found by testing every pair against
//! every (r-2)-subset of the remaining vertices.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::{HubPairPolicy, ProcessConfig};
use crate::error::{Error, Result};

/// Largest `C(n, r)` accepted.
pub const EXHAUSTIVE_MAX_RSETS: u64 = 35;
/// Largest number of assignment leaves explored before giving up.
pub const EXHAUSTIVE_MAX_LEAVES: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    pub expectation: f64,
    /// `final_edges_nonhub -> probability`.
    pub distribution: BTreeMap<u64, f64>,
    pub leaves: u64,
}

impl ExactDistribution {
    pub fn variance(&self) -> f64 {
        self.distribution
            .iter()
            .map(|(&k, &w)| w * (k as f64 - self.expectation).powi(2))
            .sum()
    }
}

#[derive(Clone)]
struct Tiny {
    n: usize,
    hubs: usize,
    include_hub_pairs: bool,
    /// `stamp[u][v]`: round the edge appeared in.
    stamp: Vec<Vec<Option<u32>>>,
    round: u32,
}

impl Tiny {
    fn initial(cfg: &ProcessConfig) -> Self {
        let n = cfg.n;
        let hubs = cfg.r - 2;
        let mut stamp = vec![vec![None; n]; n];
        for h in 0..hubs {
            for u in hubs..n {
                stamp[h][u] = Some(0);
                stamp[u][h] = Some(0);
            }
        }
        Self {
            n,
            hubs,
            include_hub_pairs: cfg.hub_pair_policy == HubPairPolicy::Include,
            stamp,
            round: 0,
        }
    }

    fn nonhub_edges(&self) -> u64 {
        let mut count = 0;
        for u in self.hubs..self.n {
            for v in u + 1..self.n {
                if self.stamp[u][v].is_some() {
                    count += 1;
                }
            }
        }
        count
    }

    /// Open walks of the next round as `(pair, sorted r-set)`.
    fn walks(&self, k: usize) -> Vec<((usize, usize), Vec<usize>)> {
        let next = self.round + 1;
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.include_hub_pairs && (u < self.hubs || v < self.hubs) {
                    continue;
                }
                if self.stamp[u][v].is_some() {
                    continue;
                }
                let others: Vec<usize> = (0..self.n).filter(|&x| x != u && x != v).collect();
                for mask in 0u64..(1 << others.len()) {
                    if mask.count_ones() as usize != k {
                        continue;
                    }
                    let w: Vec<usize> = (0..others.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| others[i])
                        .collect();
                    let mut complete = true;
                    let mut fresh = false;
                    for &x in &w {
                        for y in [u, v] {
                            match self.stamp[x][y] {
                                None => complete = false,
                                Some(s) if s + 1 == next => fresh = true,
                                Some(_) => {}
                            }
                        }
                    }
                    if complete && fresh {
                        let mut rset = w.clone();
                        rset.push(u);
                        rset.push(v);
                        rset.sort_unstable();
                        out.push(((u, v), rset));
                    }
                }
            }
        }
        out
    }
}

struct Search {
    p: f64,
    k: usize,
    leaves: u64,
    dist: BTreeMap<u64, f64>,
}

impl Search {
    fn explore(&mut self, g: Tiny, decided: &HashMap<Vec<usize>, bool>, weight: f64) -> Result<()> {
        let walks = g.walks(self.k);
        if walks.is_empty() {
            self.leaves += 1;
            if self.leaves > EXHAUSTIVE_MAX_LEAVES {
                return Err(Error::OverBudget(format!(
                    "more than {EXHAUSTIVE_MAX_LEAVES} outcome leaves"
                )));
            }
            *self.dist.entry(g.nonhub_edges()).or_insert(0.0) += weight;
            return Ok(());
        }
        let mut undecided: Vec<Vec<usize>> = walks
            .iter()
            .map(|(_, s)| s.clone())
            .filter(|s| !decided.contains_key(s))
            .collect();
        undecided.sort();
        undecided.dedup();
        let m = undecided.len();
        if m > 30 {
            return Err(Error::OverBudget(format!("{m} fresh r-sets in one round")));
        }
        for mask in 0u64..(1 << m) {
            let ones = mask.count_ones() as i32;
            let w = weight * self.p.powi(ones) * (1.0 - self.p).powi(m as i32 - ones);
            if w == 0.0 {
                continue;
            }
            let mut known = decided.clone();
            for (i, s) in undecided.iter().enumerate() {
                known.insert(s.clone(), mask >> i & 1 == 1);
            }
            let mut next = g.clone();
            next.round += 1;
            for ((u, v), s) in &walks {
                if known[s] && next.stamp[*u][*v].is_none() {
                    next.stamp[*u][*v] = Some(next.round);
                    next.stamp[*v][*u] = Some(next.round);
                }
            }
            self.explore(next, &known, w)?;
        }
        Ok(())
    }
}

/// Exact expectation and distribution of `final_edges_nonhub`.
///
/// Refuses instances with more than [`EXHAUSTIVE_MAX_RSETS`] r-sets.
pub fn exhaustive_small_oracle(config: &ProcessConfig) -> Result<ExactDistribution> {
    config.validate()?;
    let total = binomial(config.n as u64, config.r as u64);
    if total > EXHAUSTIVE_MAX_RSETS {
        return Err(Error::OverBudget(format!(
            "C({}, {}) = {total} r-sets exceeds the limit of {EXHAUSTIVE_MAX_RSETS}",
            config.n, config.r
        )));
    }
    let mut search = Search {
        p: config.p,
        k: config.r - 2,
        leaves: 0,
        dist: BTreeMap::new(),
    };
    search.explore(Tiny::initial(config), &HashMap::new(), 1.0)?;
    let expectation = search.dist.iter().map(|(&k, &w)| k as f64 * w).sum();
    Ok(ExactDistribution {
        expectation,
        distribution: search.dist,
        leaves: search.leaves,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertex_triadic_expectation() {
        let d = exhaustive_small_oracle(&ProcessConfig::new(4, 3, 0.5, 0)).unwrap();
        assert_eq!(d.expectation, 1.6875);
        let hand = |p: f64| 3.0 * p + 3.0 * p.powi(3) * (1.0 - p);
        for p in [0.1, 0.3, 0.7] {
            let d = exhaustive_small_oracle(&ProcessConfig::new(4, 3, p, 0)).unwrap();
            assert!((d.expectation - hand(p)).abs() < 1e-12);
        }
        let total: f64 = d.distribution.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.distribution.keys().all(|&k| k <= 3));
    }

    #[test]
    fn degenerate_probabilities_are_point_masses() {
        let d = exhaustive_small_oracle(&ProcessConfig::new(6, 3, 0.0, 0)).unwrap();
        assert_eq!(d.distribution, BTreeMap::from([(0, 1.0)]));
        let d = exhaustive_small_oracle(&ProcessConfig::new(6, 3, 1.0, 0)).unwrap();
        assert_eq!(d.distribution, BTreeMap::from([(10, 1.0)]));
        assert_eq!(d.variance(), 0.0);
    }

    #[test]
    fn refuses_large_instances() {
        assert!(matches!(
            exhaustive_small_oracle(&ProcessConfig::new(8, 3, 0.5, 0)),
            Err(Error::OverBudget(_))
        ));
    }
}
