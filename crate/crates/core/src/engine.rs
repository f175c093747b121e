//! Round engine: enumerate the open walks of a round, sample their r-sets,
//! commit every successful pair at once.

use serde::{Deserialize, Serialize};

use crate::config::{ProcessConfig, StatsLevel};
use crate::enumerator::{count_open_walks, for_each_open_walk};
use crate::error::{Error, Result};
use crate::graph::{BitMatrix, GraphState};
use crate::oracle::HyperedgeOracle;
use crate::stats::{self, StatsSnapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u32,
    pub walks_sampled: u64,
    pub distinct_rsets_queried: u64,
    pub edges_added: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stats: Option<StatsSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessResult {
    pub config: ProcessConfig,
    pub rounds_run: u32,
    pub terminated: bool,
    pub final_edges_nonhub: u64,
    pub per_round: Vec<RoundReport>,
}

impl ProcessResult {
    pub fn cap_hit(&self) -> bool {
        !self.terminated
    }

    /// Whether the non-hub induced graph ended complete.
    pub fn complete(&self) -> bool {
        self.final_edges_nonhub == self.config.nonhub_pairs()
    }
}

/// Whether the r-set of walk `(u, v | w)` is sampled for the first time in
/// this process and this walk is its designated representative this round.
///
/// Another partition `{x, y} | rest` of the same r-set can only be open when
/// `{x, y}` lies inside `W`: every pair crossing `{u, v} × W` is an edge and
/// `uv` itself is not. For r = 3 no such pair exists; for r = 4 the complement
/// partition shares all four edges and so is open in the same round.
fn first_sample(state: &GraphState, round: u32, u: u32, v: u32, w: &[u32]) -> bool {
    if w.len() < 2 {
        return true;
    }
    let mut rest: Vec<u32> = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            let (x, y) = (w[i], w[j]);
            if !state.pair_allowed(x, y) {
                continue;
            }
            rest.clear();
            rest.extend(w.iter().copied().filter(|&z| z != x && z != y));
            if !rest.iter().all(|&z| state.has_edge(x, z) && state.has_edge(y, z)) {
                continue;
            }
            // {x,y} x {u,v} edges exist because W is a common neighbourhood
            let recent = [u, v]
                .iter()
                .chain(rest.iter())
                .any(|&z| state.is_recent(x, z) || state.is_recent(y, z));
            let opened_in = if recent {
                round
            } else {
                let last = [u, v]
                    .iter()
                    .chain(rest.iter())
                    .flat_map(|&z| [state.edge_stamp(x, z), state.edge_stamp(y, z)])
                    .map(|s| s.expect("edge checked above"))
                    .max()
                    .unwrap_or(0);
                last + 1
            };
            let closed = match state.edge_stamp(x, y) {
                Some(s) => s < opened_in,
                None => false,
            };
            if closed {
                continue;
            }
            if opened_in < round || (x, y) < (u, v) {
                return false;
            }
        }
    }
    true
}

/// How a round finds its open walks. Every strategy yields the same round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundStrategy {
    /// Pick by estimated cost.
    #[default]
    Auto,
    /// Stream walks out of the latest edges.
    Stream,
    /// r = 3 only: scan every non-adjacent pair with row bitsets.
    PairScan,
}

/// Runs one round on `state` and commits its edges.
pub fn run_round(state: &mut GraphState, oracle: &mut HyperedgeOracle, round: u32) -> Result<RoundReport> {
    run_round_using(state, oracle, round, RoundStrategy::Auto)
}

pub fn run_round_using(
    state: &mut GraphState,
    oracle: &mut HyperedgeOracle,
    round: u32,
    strategy: RoundStrategy,
) -> Result<RoundReport> {
    let expected = state.current_round() + 1;
    if round != expected {
        return Err(Error::RoundOutOfOrder { expected, got: round });
    }
    let scan = match strategy {
        RoundStrategy::Stream => false,
        RoundStrategy::PairScan => {
            if state.r() != 3 {
                return Err(Error::Domain("the pair scan handles r = 3 only".into()));
            }
            true
        }
        // the memo records every walk, which the scan skips after a success
        RoundStrategy::Auto => !oracle.is_memoized() && pair_scan_is_cheaper(state),
    };
    let (walks, fresh, mut added) = if scan {
        let (walks, added) = pair_scan(state, oracle);
        // for r = 3 every walk has its own triple, never seen before
        oracle.record_fresh(walks);
        (walks, walks, added)
    } else {
        stream(state, oracle, round)
    };
    added.sort_unstable();
    state.commit_round(&added);
    Ok(RoundReport {
        round,
        walks_sampled: walks,
        distinct_rsets_queried: fresh,
        edges_added: added.len() as u64,
        stats: None,
    })
}

fn pair_scan_is_cheaper(state: &GraphState) -> bool {
    if state.r() != 3 {
        return false;
    }
    let reach: u64 = state
        .latest_edges()
        .iter()
        .map(|&(a, b)| (state.degree(a) + state.degree(b)) as u64)
        .sum();
    let n = state.n() as u64;
    let words = n.div_ceil(64);
    // a streamed walk costs roughly as much as 20 bitset words
    n * n / 2 * words < reach * 20
}

fn stream(state: &GraphState, oracle: &mut HyperedgeOracle, round: u32) -> (u64, u64, Vec<(u32, u32)>) {
    let mut accepted = BitMatrix::new(state.n());
    let mut added: Vec<(u32, u32)> = Vec::new();
    let mut walks = 0u64;
    let mut fresh = 0u64;
    let mut rset: Vec<u32> = Vec::with_capacity(state.r());
    let memoized = oracle.is_memoized();
    let queried_before = oracle.query_count();
    for_each_open_walk(state, |u, v, w| {
        walks += 1;
        rset.clear();
        rset.extend_from_slice(w);
        rset.push(u);
        rset.push(v);
        rset.sort_unstable();
        if first_sample(state, round, u, v, w) {
            fresh += 1;
        }
        let success = if memoized {
            oracle.query_sorted(&rset)
        } else {
            // a pair already accepted this round needs no further draws
            !accepted.get(u, v) && oracle.decide(&rset)
        };
        if success && !accepted.get(u, v) {
            accepted.set(u, v, true);
            added.push((u, v));
        }
    });
    if memoized {
        debug_assert_eq!(oracle.query_count() - queried_before, fresh);
    } else {
        oracle.record_fresh(fresh);
    }
    (walks, fresh, added)
}

/// r = 3: the middles of the open walks on `{u, v}` are
/// `(N(u) & R(v)) | (R(u) & N(v))`, with `R` the latest-round neighbourhood.
fn pair_scan(state: &GraphState, oracle: &HyperedgeOracle) -> (u64, Vec<(u32, u32)>) {
    let n = state.n() as u32;
    let adj = state.adjacency();
    let rec = state.recent();
    let touched: Vec<bool> = (0..n).map(|u| rec.row(u).iter().any(|&w| w != 0)).collect();
    let mut walks = 0u64;
    let mut added = Vec::new();
    for u in 0..n {
        let (nu, ru) = (adj.row(u), rec.row(u));
        for v in u + 1..n {
            if !(touched[u as usize] || touched[v as usize]) || !state.pair_allowed(u, v) || adj.get(u, v) {
                continue;
            }
            let (nv, rv) = (adj.row(v), rec.row(v));
            let mut found = false;
            for (k, (((&a, &b), &c), &d)) in nu.iter().zip(rv).zip(ru).zip(nv).enumerate() {
                let mut m = (a & b) | (c & d);
                walks += m.count_ones() as u64;
                while m != 0 && !found {
                    let w = (k * 64) as u32 + m.trailing_zeros();
                    m &= m - 1;
                    let mut t = [u, v, w];
                    t.sort_unstable();
                    found = oracle.decide(&t);
                }
            }
            if found {
                added.push((u, v));
            }
        }
    }
    (walks, added)
}

/// A process run that can be stepped round by round.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ProcessConfig,
    state: GraphState,
    oracle: HyperedgeOracle,
    per_round: Vec<RoundReport>,
    finished: bool,
}

impl Simulation {
    pub fn new(config: ProcessConfig) -> Result<Self> {
        config.validate()?;
        if config.stats_level == StatsLevel::Full && config.n > config.full_stats_limit {
            return Err(Error::FullStatsTooLarge {
                n: config.n,
                limit: config.full_stats_limit,
            });
        }
        let state = GraphState::init(&config)?;
        let oracle = HyperedgeOracle::new(config.n, config.r, config.p, config.seed)?;
        Ok(Self {
            config,
            state,
            oracle,
            per_round: Vec::new(),
            finished: false,
        })
    }

    /// Records every hyperedge decision, making distinct-query counts table based.
    pub fn with_memo(mut self) -> Self {
        self.oracle = self.oracle.with_memo();
        self
    }

    pub fn state(&self) -> &GraphState {
        &self.state
    }

    pub fn oracle(&self) -> &HyperedgeOracle {
        &self.oracle
    }

    pub fn config(&self) -> &ProcessConfig {
        &self.config
    }

    pub fn reports(&self) -> &[RoundReport] {
        &self.per_round
    }

    /// Whether a round has produced no open walks.
    pub fn finished(&self) -> bool {
        self.finished
    }

    /// Runs the next round. Returns `None` once a round yields no open walks;
    /// that empty round is not recorded.
    pub fn step(&mut self) -> Result<Option<&RoundReport>> {
        if self.finished {
            return Ok(None);
        }
        let round = self.state.current_round() + 1;
        let mut report = run_round(&mut self.state, &mut self.oracle, round)?;
        if report.walks_sampled == 0 {
            self.finished = true;
            return Ok(None);
        }
        if self.config.stats_level != StatsLevel::Off {
            report.stats = Some(stats::snapshot(
                &self.state,
                self.config.stats_level,
                self.config.full_stats_limit,
            )?);
        }
        self.per_round.push(report);
        Ok(self.per_round.last())
    }

    pub fn run(self) -> Result<ProcessResult> {
        self.run_with_state().map(|(result, _)| result)
    }

    /// Consumes the simulation, returning the final state alongside the result.
    pub fn run_with_state(mut self) -> Result<(ProcessResult, GraphState)> {
        while (self.per_round.len() as u32) < self.config.max_rounds {
            if self.step()?.is_none() {
                break;
            }
        }
        let terminated = self.finished || count_open_walks(&self.state) == 0;
        let result = ProcessResult {
            rounds_run: self.per_round.len() as u32,
            terminated,
            final_edges_nonhub: self.state.nonhub_edge_count() as u64,
            per_round: self.per_round,
            config: self.config,
        };
        Ok((result, self.state))
    }
}

/// Runs the process from G(0) until no open walks remain or the round cap.
pub fn run_process(config: &ProcessConfig) -> Result<ProcessResult> {
    Simulation::new(config.clone())?.run()
}
