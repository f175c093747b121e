//! Lazy realization of the random r-uniform hypergraph H_r(n, p).
//!
//! Every r-set has a fixed position in the colexicographic order of all r-subsets
//! of `0..n`. Its decision is the SplitMix64 output at that position of a stream
//! seeded from the run seed, compared against `p`. The decision is therefore a
//! pure function of `(seed, r-set)`: repeated queries agree without storing
//! anything, and distinct r-sets read distinct stream positions. An optional
//! table records every decision made, for exact distinct-query accounting.

use std::collections::HashMap;

use crate::error::ConfigError;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct HyperedgeOracle {
    p: f64,
    seed: u64,
    key: u64,
    r: usize,
    /// `binom[k][v] = C(v, k + 1)` for `v < n`.
    binom: Vec<Vec<u128>>,
    memo: Option<HashMap<Box<[u32]>, bool>>,
    query_count: u64,
}

impl HyperedgeOracle {
    pub fn new(n: usize, r: usize, p: f64, seed: u64) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ConfigError::Invalid(format!("probability p={p} is outside [0, 1]")));
        }
        if r == 0 || n < r {
            return Err(ConfigError::Invalid(format!("need 1 <= r <= n, got n={n}, r={r}")));
        }
        let mut binom = Vec::with_capacity(r);
        for k in 1..=r as u128 {
            let mut row = Vec::with_capacity(n);
            for v in 0..n as u128 {
                let c = binomial(v, k).ok_or(ConfigError::TooManyRsets { n, r })?;
                row.push(c);
            }
            binom.push(row);
        }
        // the largest index used is C(n, r) - 1
        binomial(n as u128, r as u128).ok_or(ConfigError::TooManyRsets { n, r })?;
        Ok(Self {
            p,
            seed,
            key: mix64(seed ^ 0x5851_f42d_4c95_7f2d),
            r,
            binom,
            memo: None,
            query_count: 0,
        })
    }

    /// Keeps a table of every decision so `query_count` counts distinct r-sets
    /// for any call pattern.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(HashMap::new());
        self
    }

    pub fn is_memoized(&self) -> bool {
        self.memo.is_some()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Colexicographic rank of a sorted r-set.
    #[inline]
    fn rank(&self, rset: &[u32]) -> u128 {
        rset.iter()
            .enumerate()
            .map(|(k, &v)| self.binom[k][v as usize])
            .sum()
    }

    /// The hyperedge decision for a sorted r-set. Pure; does not count.
    #[inline]
    pub fn decide(&self, rset: &[u32]) -> bool {
        assert_eq!(rset.len(), self.r, "r-set has the wrong size");
        debug_assert!(rset.windows(2).all(|w| w[0] < w[1]), "r-set must be sorted");
        if self.p <= 0.0 {
            return false;
        }
        if self.p >= 1.0 {
            return true;
        }
        let rank = self.rank(rset);
        let (lo, hi) = (rank as u64, (rank >> 64) as u64);
        let mut state = self.key.wrapping_add(GAMMA.wrapping_mul(lo.wrapping_add(1)));
        if hi != 0 {
            state ^= mix64(hi.wrapping_mul(GAMMA));
        }
        let u = (mix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        u < self.p
    }

    /// Decision for an r-set given in any order. With a memo table, a repeated
    /// r-set is answered from the table and not counted again; without one every
    /// call counts.
    pub fn hyperedge_present(&mut self, rset: &[u32]) -> bool {
        let mut sorted: Vec<u32> = rset.to_vec();
        sorted.sort_unstable();
        assert!(sorted.windows(2).all(|w| w[0] != w[1]), "r-set has repeated vertices");
        self.query_sorted(&sorted)
    }

    pub(crate) fn query_sorted(&mut self, rset: &[u32]) -> bool {
        let decision = self.decide(rset);
        match &mut self.memo {
            Some(memo) => {
                if let Some(&seen) = memo.get(rset) {
                    debug_assert_eq!(seen, decision);
                    return seen;
                }
                memo.insert(rset.into(), decision);
                self.query_count += 1;
            }
            None => self.query_count += 1,
        }
        decision
    }

    /// Adds queries the caller has proven to be first-time r-sets.
    pub(crate) fn record_fresh(&mut self, count: u64) {
        self.query_count += count;
    }

    /// Previously recorded decision, when memoized.
    pub fn lookup(&self, rset: &[u32]) -> Option<bool> {
        self.memo.as_ref().and_then(|m| m.get(rset).copied())
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_and_impossible() {
        let o = HyperedgeOracle::new(10, 3, 0.0, 9).unwrap();
        assert!(!o.decide(&[0, 4, 9]));
        let o = HyperedgeOracle::new(10, 3, 1.0, 9).unwrap();
        assert!(o.decide(&[0, 4, 9]));
    }

    #[test]
    fn memo_counts_distinct_sets() {
        let mut o = HyperedgeOracle::new(10, 3, 0.5, 3).unwrap().with_memo();
        let a = o.hyperedge_present(&[5, 1, 2]);
        let b = o.hyperedge_present(&[1, 2, 5]);
        assert_eq!(a, b);
        assert_eq!(o.query_count(), 1);
        o.hyperedge_present(&[1, 2, 6]);
        assert_eq!(o.query_count(), 2);
        assert_eq!(o.lookup(&[1, 2, 5]), Some(a));
    }

    #[test]
    #[should_panic]
    fn wrong_size_is_a_contract_violation() {
        let o = HyperedgeOracle::new(10, 3, 0.5, 3).unwrap();
        o.decide(&[1, 2]);
    }

    #[test]
    fn colex_rank_is_a_bijection_on_small_universe() {
        let o = HyperedgeOracle::new(8, 3, 0.5, 0).unwrap();
        let mut ranks = Vec::new();
        for a in 0..8u32 {
            for b in a + 1..8 {
                for c in b + 1..8 {
                    ranks.push(o.rank(&[a, b, c]));
                }
            }
        }
        ranks.sort_unstable();
        assert_eq!(ranks, (0..56).collect::<Vec<u128>>());
    }

    #[test]
    fn rejects_oversized_universe() {
        assert!(HyperedgeOracle::new(1 << 20, 40, 0.5, 0).is_err());
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(2, 3), Some(0));
    }

    #[test]
    fn seeds_give_different_realizations() {
        let a = HyperedgeOracle::new(50, 3, 0.5, 1).unwrap();
        let b = HyperedgeOracle::new(50, 3, 0.5, 2).unwrap();
        let differ = (0..48u32).filter(|&v| a.decide(&[v, v + 1, v + 2]) != b.decide(&[v, v + 1, v + 2])).count();
        assert!(differ > 5);
    }
}
