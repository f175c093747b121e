//! Tracked quantities on a state snapshot, all measured in the hub-removed
//! graph: degrees D_u, codegrees X_uv, open-walk counts F_u, Y_uv, Z_uv, plus
//! the binomial tail bounds used to turn them into pass thresholds.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::StatsLevel;
use crate::enumerator::open_walks;
use crate::error::{Error, Result};
use crate::graph::GraphState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenStructureCounts {
    /// F_u per non-hub vertex, indexed from the first non-hub.
    pub f: Vec<u64>,
    pub max_f: u64,
    pub max_y: u64,
    pub max_z: u64,
    pub walks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSnapshot {
    pub round: u32,
    /// Non-hub degrees; filled at the full level only.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub degrees: Vec<u32>,
    pub max_degree: u32,
    pub mean_degree: f64,
    pub max_codegree: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub open_walk_counts: Option<OpenStructureCounts>,
    pub nonhub_edge_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<u32>,
    pub max: u32,
    pub mean: f64,
}

/// Non-hub neighbour counts of every non-hub vertex.
pub fn degree_stats(state: &GraphState) -> DegreeStats {
    let hubs = state.hub_count();
    let degrees: Vec<u32> = (hubs as u32..state.n() as u32)
        .map(|v| state.neighbors(v).iter().filter(|&&w| !state.is_hub(w)).count() as u32)
        .collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mean = degrees.iter().map(|&d| d as f64).sum::<f64>() / degrees.len() as f64;
    DegreeStats { degrees, max, mean }
}

/// Maximum number of common non-hub neighbours over non-hub pairs, by wedge
/// counting: every path `u - w - v` through a non-hub `w` bumps the counter of
/// `{u, v}`. Counters are kept per left endpoint so memory stays `O(n)`.
pub fn codegree_max(state: &GraphState) -> u32 {
    let n = state.n();
    let hubs = state.hub_count() as u32;
    let mut counter = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut best = 0;
    for u in hubs..n as u32 {
        for &w in state.neighbors(u) {
            if state.is_hub(w) {
                continue;
            }
            for &v in state.neighbors(w) {
                if v <= u || state.is_hub(v) {
                    continue;
                }
                if counter[v as usize] == 0 {
                    touched.push(v);
                }
                counter[v as usize] += 1;
            }
        }
        for &v in &touched {
            best = best.max(counter[v as usize]);
            counter[v as usize] = 0;
        }
        touched.clear();
    }
    best
}

/// F_u, max Y_uv and max Z_uv for the open walks of round `round`, which must
/// be the state's next round.
///
/// * F_u counts walks whose pair contains `u`.
/// * Y_uv counts open walks `uWw'` extended by an existing edge `w'v`.
/// * Z_uv counts pairs of open walks `uW₁w'`, `w'W₂v` with `v ∉ W₁`, `u ∉ W₂`.
pub fn open_structure_counts(state: &GraphState, round: u32, limit: usize) -> Result<OpenStructureCounts> {
    if state.n() > limit {
        return Err(Error::FullStatsTooLarge { n: state.n(), limit });
    }
    let expected = state.current_round() + 1;
    if round != expected {
        return Err(Error::RoundOutOfOrder { expected, got: round });
    }
    let n = state.n();
    let hubs = state.hub_count();
    let walks = open_walks(state);

    // per unordered pair: number of walks and, per vertex z, walks with z in W
    let mut pair_count: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_members: HashMap<(u32, u32), HashMap<u32, u64>> = HashMap::new();
    let mut partners: Vec<Vec<u32>> = vec![Vec::new(); n];
    for w in &walks {
        let (a, b) = w.pair();
        let c = pair_count.entry((a, b)).or_insert(0);
        if *c == 0 {
            partners[a as usize].push(b);
            partners[b as usize].push(a);
        }
        *c += 1;
        let members = pair_members.entry((a, b)).or_default();
        for &z in w.walk_set() {
            *members.entry(z).or_insert(0) += 1;
        }
    }
    let count = |x: u32, y: u32| -> u64 {
        let k = if x < y { (x, y) } else { (y, x) };
        pair_count.get(&k).copied().unwrap_or(0)
    };
    // walks on pair {x,y} whose W avoids z
    let avoiding = |x: u32, y: u32, z: u32| -> u64 {
        let k = if x < y { (x, y) } else { (y, x) };
        let total = pair_count.get(&k).copied().unwrap_or(0);
        let hit = pair_members
            .get(&k)
            .and_then(|m| m.get(&z))
            .copied()
            .unwrap_or(0);
        total - hit
    };

    let mut f = vec![0u64; n - hubs];
    for u in hubs..n {
        f[u - hubs] = partners[u].iter().map(|&w| count(u as u32, w)).sum();
    }
    let max_f = f.iter().copied().max().unwrap_or(0);

    let mut max_y = 0;
    let mut max_z = 0;
    let mut acc = vec![0u64; n];
    for u in hubs as u32..n as u32 {
        // Y_u·
        for &wp in &partners[u as usize] {
            let c = count(u, wp);
            for &v in state.neighbors(wp) {
                if v != u && !state.is_hub(v) {
                    acc[v as usize] += c;
                }
            }
        }
        max_y = max_y.max(acc.iter().copied().max().unwrap_or(0));
        acc.iter_mut().for_each(|x| *x = 0);
        // Z_u·
        for &wp in &partners[u as usize] {
            for &v in &partners[wp as usize] {
                if v == u || state.is_hub(v) {
                    continue;
                }
                acc[v as usize] += avoiding(u, wp, v) * avoiding(wp, v, u);
            }
        }
        max_z = max_z.max(acc.iter().copied().max().unwrap_or(0));
        acc.iter_mut().for_each(|x| *x = 0);
    }

    Ok(OpenStructureCounts {
        f,
        max_f,
        max_y,
        max_z,
        walks: walks.len() as u64,
    })
}

/// Whether the graph induced on the non-hub vertices is connected.
pub fn connectivity_after_hub_removal(state: &GraphState) -> bool {
    let hubs = state.hub_count() as u32;
    let n = state.n() as u32;
    let mut seen = vec![false; n as usize];
    let mut queue = VecDeque::from([hubs]);
    seen[hubs as usize] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in state.neighbors(u) {
            if !state.is_hub(v) && !seen[v as usize] {
                seen[v as usize] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached == (n - hubs) as usize
}

/// Snapshot of the state after its latest committed round.
pub fn snapshot(state: &GraphState, level: StatsLevel, full_limit: usize) -> Result<StatsSnapshot> {
    let deg = degree_stats(state);
    let open_walk_counts = match level {
        StatsLevel::Full => Some(open_structure_counts(
            state,
            state.current_round() + 1,
            full_limit,
        )?),
        _ => None,
    };
    Ok(StatsSnapshot {
        round: state.current_round(),
        degrees: if level == StatsLevel::Full { deg.degrees } else { Vec::new() },
        max_degree: deg.max,
        mean_degree: deg.mean,
        max_codegree: codegree_max(state),
        open_walk_counts,
        nonhub_edge_count: state.nonhub_edge_count() as u64,
    })
}

/// Binomial tail bounds for `X ~ Bin[trials, p]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffBounds {
    /// Bound on `P[|X - trials·p| > t]`: `2 exp(-t² / (3 trials p))`.
    pub two_sided: f64,
    /// Bound on `P[X > trials·p + t]`: `exp(-t² / (2 (trials p + t/3)))`.
    pub upper: f64,
}

/// Both bounds; requires `0 < t <= trials·p`.
pub fn chernoff_bounds(trials: u64, p: f64, t: f64) -> Result<ChernoffBounds> {
    let mean = trials as f64 * p;
    if !(t > 0.0 && t <= mean) {
        return Err(Error::Domain(format!(
            "two-sided bound needs 0 < t <= n·p = {mean}, got t = {t}"
        )));
    }
    Ok(ChernoffBounds {
        two_sided: 2.0 * (-t * t / (3.0 * mean)).exp(),
        upper: chernoff_upper(trials, p, t)?,
    })
}

/// Upper-tail bound alone; requires `t > 0`.
pub fn chernoff_upper(trials: u64, p: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("upper bound needs t > 0 and p in [0,1], got t = {t}, p = {p}")));
    }
    let mean = trials as f64 * p;
    Ok((-t * t / (2.0 * (mean + t / 3.0))).exp())
}

/// The deviation `t` at which the two-sided bound equals `target`:
/// `t = sqrt(3 trials p ln(2 / target))`.
pub fn two_sided_deviation(trials: u64, p: f64, target: f64) -> f64 {
    (3.0 * trials as f64 * p * (2.0 / target).ln()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProcessConfig;

    fn g0(n: usize, r: usize) -> GraphState {
        GraphState::init(&ProcessConfig::new(n, r, 0.5, 0)).unwrap()
    }

    #[test]
    fn initial_state_has_no_nonhub_structure() {
        let g = g0(8, 4);
        let d = degree_stats(&g);
        assert_eq!(d.degrees, vec![0; 6]);
        assert_eq!(d.max, 0);
        assert_eq!(codegree_max(&g), 0);
        assert!(!connectivity_after_hub_removal(&g));
    }

    #[test]
    fn triangle_codegree() {
        let mut g = g0(6, 3);
        g.commit_round(&[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(codegree_max(&g), 1);
        assert_eq!(degree_stats(&g).max, 2);
    }

    #[test]
    fn complete_graph_statistics() {
        let mut g = g0(6, 3);
        let mut all = Vec::new();
        for u in 1..6 {
            for v in u + 1..6 {
                all.push((u, v));
            }
        }
        g.commit_round(&all);
        let d = degree_stats(&g);
        assert!(d.degrees.iter().all(|&x| x == 4));
        assert_eq!(d.mean * 5.0, 2.0 * g.nonhub_edge_count() as f64);
        assert_eq!(codegree_max(&g), 3);
        assert!(connectivity_after_hub_removal(&g));
    }

    #[test]
    fn open_counts_on_hand_example() {
        // a=1, b=2, c=3, d=4; round-1 edges ab, ac leave the single walk b-a-c
        let mut g = g0(5, 3);
        g.commit_round(&[(1, 2), (1, 3)]);
        let c = open_structure_counts(&g, 2, 100).unwrap();
        assert_eq!(c.walks, 1);
        assert_eq!(c.f, vec![0, 1, 1, 0]);
        // Y_{b,a}: walk b{a}c plus edge c-a
        assert_eq!(c.max_y, 1);
        assert_eq!(c.max_z, 0);
        assert!(open_structure_counts(&g, 3, 100).is_err());
        assert!(open_structure_counts(&g, 2, 4).is_err());
    }

    #[test]
    fn quiet_round_has_zero_counts() {
        let mut g = g0(6, 3);
        g.commit_round(&[(1, 2)]);
        g.commit_round(&[]);
        let c = open_structure_counts(&g, 3, 100).unwrap();
        assert_eq!((c.walks, c.max_f, c.max_y, c.max_z), (0, 0, 0, 0));
    }

    #[test]
    fn chernoff_values() {
        let b = chernoff_bounds(100, 0.1, 10.0).unwrap();
        assert!((b.two_sided - 2.0 * (-10.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((b.two_sided - 0.0713).abs() < 5e-5);
        let b = chernoff_bounds(10_000, 0.01, 100.0).unwrap();
        assert!((b.two_sided - 2.0 * (-100.0f64 / 3.0).exp()).abs() < 1e-25);
        let tiny = chernoff_upper(100, 0.1, 1e-9).unwrap();
        assert!((tiny - 1.0).abs() < 1e-12);
        assert!(chernoff_bounds(100, 0.1, 11.0).is_err());
        assert!(chernoff_bounds(100, 0.1, 0.0).is_err());
        assert!(chernoff_upper(100, 0.1, -1.0).is_err());
        assert!(chernoff_upper(100, 0.1, 50.0).is_ok());
    }

    #[test]
    fn deviation_inverts_the_two_sided_bound() {
        let t = two_sided_deviation(1000, 0.2, 1e-4);
        let back = 2.0 * (-t * t / (3.0 * 200.0)).exp();
        assert!((back - 1e-4).abs() < 1e-15);
    }
}
