//! Definition-literal reference computations shared by the integration tests.
//! Nothing here calls into the enumerator or stats modules.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use triadic_core::GraphState;

pub type Walk = ((u32, u32), Vec<u32>);

/// All k-subsets of `items`, in lexicographic order.
pub fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Open walks of the next round straight from the definition: every allowed
/// non-adjacent pair, every (r-2)-set of other vertices fully joined to both,
/// with at least one of those edges from the latest round.
pub fn literal_open_walks(state: &GraphState) -> BTreeSet<Walk> {
    let n = state.n() as u32;
    let k = state.r() - 2;
    let latest = state.current_round();
    let mut out = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if !state.pair_allowed(u, v) || state.has_edge(u, v) {
                continue;
            }
            let others: Vec<u32> = (0..n)
                .filter(|&x| x != u && x != v && state.has_edge(x, u) && state.has_edge(x, v))
                .collect();
            for w in combinations(&others, k) {
                let fresh = w.iter().any(|&x| {
                    state.edge_stamp(x, u) == Some(latest) || state.edge_stamp(x, v) == Some(latest)
                });
                if fresh {
                    out.insert(((u, v), w));
                }
            }
        }
    }
    out
}

/// Max over non-hub pairs of the number of common non-hub neighbours.
pub fn literal_codegree_max(state: &GraphState) -> u32 {
    let n = state.n() as u32;
    let h = state.hub_count() as u32;
    let mut best = 0;
    for u in h..n {
        for v in u + 1..n {
            let c = (h..n)
                .filter(|&w| state.has_edge(u, w) && state.has_edge(v, w))
                .count() as u32;
            best = best.max(c);
        }
    }
    best
}

/// `(F per non-hub vertex, max Y, max Z)` from the walk list.
pub fn literal_fyz(state: &GraphState, walks: &BTreeSet<Walk>) -> (Vec<u64>, u64, u64) {
    let n = state.n() as u32;
    let h = state.hub_count() as u32;
    let mut f = vec![0u64; (n - h) as usize];
    // walks oriented as (start, end, W)
    let mut oriented: Vec<(u32, u32, &Vec<u32>)> = Vec::new();
    for ((a, b), w) in walks {
        oriented.push((*a, *b, w));
        oriented.push((*b, *a, w));
        for x in [*a, *b] {
            if x >= h {
                f[(x - h) as usize] += 1;
            }
        }
    }
    let mut y: HashMap<(u32, u32), u64> = HashMap::new();
    for &(u, wp, _) in &oriented {
        if u < h {
            continue;
        }
        for v in h..n {
            if v != u && state.has_edge(wp, v) {
                *y.entry((u, v)).or_default() += 1;
            }
        }
    }
    let mut z: HashMap<(u32, u32), u64> = HashMap::new();
    for &(u, wp, w1) in &oriented {
        if u < h {
            continue;
        }
        for &(start, v, w2) in &oriented {
            if start != wp || v == u || v < h {
                continue;
            }
            if !w1.contains(&v) && !w2.contains(&u) {
                *z.entry((u, v)).or_default() += 1;
            }
        }
    }
    (
        f,
        y.values().copied().max().unwrap_or(0),
        z.values().copied().max().unwrap_or(0),
    )
}

/// Connectivity of the non-hub induced graph by union-find.
pub fn literal_connected(state: &GraphState) -> bool {
    let n = state.n();
    let h = state.hub_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for u in h..n {
        for v in u + 1..n {
            if state.has_edge(u as u32, v as u32) {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, h);
    (h..n).all(|u| find(&mut parent, u) == root)
}

/// Probabilities that keep n = 30 processes alive for several rounds.
pub fn probability_for(r: usize, seed: u64) -> f64 {
    let base = match r {
        3 => 0.06,
        4 => 0.05,
        _ => 0.04,
    };
    base * (1.0 + (seed % 5) as f64 * 0.5)
}

pub fn as_walks<'a>(walks: impl IntoIterator<Item = &'a triadic_core::OpenWalk>) -> BTreeSet<Walk> {
    walks
        .into_iter()
        .map(|w| (w.pair(), w.walk_set().to_vec()))
        .collect()
}

/// Runs `n = 30` processes round by round and checks the three enumerators
/// against the literal one before every round. Returns rounds checked.
pub fn check_enumerators(n: usize, r: usize, p: f64, seed: u64) -> Result<u32, String> {
    use triadic_core::enumerator::open_walks;
    use triadic_core::{open_walks_bruteforce, open_walks_incremental, ProcessConfig, Simulation};

    let cfg = ProcessConfig::new(n, r, p, seed).with_max_rounds(50);
    let mut sim = Simulation::new(cfg).map_err(|e| e.to_string())?;
    let mut rounds = 0;
    loop {
        let state = sim.state();
        let literal = literal_open_walks(state);
        let brute = as_walks(&open_walks_bruteforce(state));
        let incremental = as_walks(&open_walks_incremental(state, state.latest_edges()));
        let streamed_list = open_walks(state);
        let streamed = as_walks(&streamed_list);
        let round = state.current_round() + 1;
        if streamed.len() != streamed_list.len() {
            return Err(format!("seed {seed} r={r} round {round}: streaming emitted duplicates"));
        }
        for (name, got) in [("bruteforce", &brute), ("incremental", &incremental), ("streaming", &streamed)] {
            if *got != literal {
                return Err(format!(
                    "seed {seed} r={r} round {round}: {name} has {} walks, definition has {}",
                    got.len(),
                    literal.len()
                ));
            }
        }
        rounds += 1;
        if sim.step().map_err(|e| e.to_string())?.is_none() {
            return Ok(rounds);
        }
    }
}
