//! Empirical margins of the tracked quantities against the leading terms of
//! the per-regime concentration bounds.

use serde::{Deserialize, Serialize};

use super::{par_trials, trial_seed};
use crate::config::{ProcessConfig, StatsLevel};
use crate::engine::run_process;
use crate::error::Result;

/// p-regime that selects which family of bounds applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p >= n^(-7/8)`.
    Case1,
    /// `n^(-33/24) < p < n^(-7/8)`.
    Case2,
    /// `p <= n^(-33/24)`.
    Case3,
}

impl Regime {
    pub fn classify(n: usize, p: f64) -> Self {
        let n = n as f64;
        if p >= n.powf(-7.0 / 8.0) {
            Regime::Case1
        } else if p > n.powf(-33.0 / 24.0) {
            Regime::Case2
        } else {
            Regime::Case3
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// Strictly below the bound.
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    /// Asymptotic equivalence; reported, not checked.
    #[serde(rename = "~")]
    Like,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    /// `None` for whole-run rows.
    pub round: Option<u32>,
    pub quantity: String,
    pub claim: String,
    pub relation: Relation,
    pub bound: f64,
    pub empirical_max: f64,
    /// `bound / empirical_max`; absent when nothing was observed.
    pub margin: Option<f64>,
    /// Share of trials satisfying the relation; absent for `~` rows.
    pub fraction_within: Option<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub alpha: f64,
    pub regime: Regime,
    pub trials: usize,
    pub rounds_run: Vec<u32>,
    pub rows: Vec<MarginRow>,
}

impl ConcentrationReport {
    pub fn row(&self, round: Option<u32>, quantity: &str) -> Option<&MarginRow> {
        self.rows
            .iter()
            .find(|r| r.round == round && r.quantity == quantity)
    }
}

/// Per-trial, per-round observations. Index 0 is round 1.
#[derive(Debug, Clone, Default)]
struct Trace {
    max_degree: Vec<f64>,
    max_codegree: Vec<f64>,
    edges_added: Vec<f64>,
    max_f: Vec<f64>,
    max_y: Vec<f64>,
    max_z: Vec<f64>,
    rounds_run: u32,
}

fn trace(config: &ProcessConfig) -> Result<Trace> {
    let result = run_process(config)?;
    let mut t = Trace {
        rounds_run: result.rounds_run,
        ..Default::default()
    };
    for rep in &result.per_round {
        let s = rep.stats.as_ref().expect("stats requested");
        t.max_degree.push(s.max_degree as f64);
        t.max_codegree.push(s.max_codegree as f64);
        t.edges_added.push(rep.edges_added as f64);
        if let Some(o) = &s.open_walk_counts {
            t.max_f.push(o.max_f as f64);
            t.max_y.push(o.max_y as f64);
            t.max_z.push(o.max_z as f64);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy)]
enum Series {
    Degree,
    Codegree,
    Added,
    F,
    Y,
    Z,
}

impl Series {
    /// Value at `round` (1-based). The graph is frozen once the process stops,
    /// so degree-like series carry their last value; walk and edge counts drop to 0.
    fn at(self, t: &Trace, round: u32) -> f64 {
        let (v, carry) = match self {
            Series::Degree => (&t.max_degree, true),
            Series::Codegree => (&t.max_codegree, true),
            Series::Added => (&t.edges_added, false),
            Series::F => (&t.max_f, false),
            Series::Y => (&t.max_y, false),
            Series::Z => (&t.max_z, false),
        };
        match v.get(round as usize - 1) {
            Some(&x) => x,
            None if carry => v.last().copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    fn overall(self, t: &Trace) -> f64 {
        let last = t.rounds_run.max(1);
        (1..=last).map(|i| self.at(t, i)).fold(0.0, f64::max)
    }
}

struct RowBuilder<'a> {
    traces: &'a [Trace],
    rows: Vec<MarginRow>,
}

impl RowBuilder<'_> {
    fn push(&mut self, round: Option<u32>, quantity: &str, claim: &str, relation: Relation, bound: f64, values: Vec<f64>) {
        let empirical_max = values.iter().copied().fold(0.0, f64::max);
        let within = |x: f64| match relation {
            Relation::Below => x < bound,
            Relation::AtMost => x <= bound,
            Relation::Like => true,
        };
        let fraction_within = (relation != Relation::Like)
            .then(|| values.iter().filter(|&&x| within(x)).count() as f64 / values.len() as f64);
        self.rows.push(MarginRow {
            round,
            quantity: quantity.to_string(),
            claim: claim.to_string(),
            relation,
            bound,
            empirical_max,
            margin: (empirical_max > 0.0).then(|| bound / empirical_max),
            fraction_within,
            trials: values.len(),
        });
    }

    fn round(&mut self, round: u32, series: Series, quantity: &str, claim: &str, relation: Relation, bound: f64) {
        let values = self.traces.iter().map(|t| series.at(t, round)).collect();
        self.push(Some(round), quantity, claim, relation, bound, values);
    }

    fn overall(&mut self, series: Series, quantity: &str, claim: &str, relation: Relation, bound: f64) {
        let values = self.traces.iter().map(|t| series.overall(t)).collect();
        self.push(None, quantity, claim, relation, bound, values);
    }
}

/// Runs `trials` seeds of `config` and tabulates per-round maxima against the
/// bounds of the regime `config.p` falls in.
///
/// Cheap rows (degree, codegree, edge counts) are always produced; open-walk
/// rows need `config.stats_level == Full`.
pub fn concentration_report(config: &ProcessConfig, trials: usize, alpha: f64, jobs: usize) -> Result<ConcentrationReport> {
    let mut base = config.clone();
    if base.stats_level == StatsLevel::Off {
        base.stats_level = StatsLevel::Cheap;
    }
    base.validate()?;
    let traces = par_trials(jobs, trials.max(1), |t| {
        let mut cfg = base.clone();
        cfg.seed = trial_seed(config.seed, t);
        trace(&cfg)
    })?;
    let full = base.stats_level == StatsLevel::Full;

    let n = base.n as f64;
    let r = base.r as i32;
    let p = base.p;
    let log_n = n.ln();
    let regime = Regime::classify(base.n, p);
    let last_round = traces.iter().map(|t| t.rounds_run).max().unwrap_or(0).max(1);

    let mut b = RowBuilder {
        traces: &traces,
        rows: Vec::new(),
    };
    use Relation::*;
    match regime {
        Regime::Case1 => {
            let np = n * p;
            b.round(1, Series::Degree, "max_degree", "D_u(1) ~ np", Like, np);
            b.round(1, Series::Codegree, "max_codegree", "X_uv(1) < 3 log n", Below, 3.0 * log_n);
            let log2a = log_n.powf(2.0 * alpha);
            let log2ar = log_n.powf(2.0 * alpha * (r - 2) as f64);
            for i in 1..=last_round {
                if i > 1 {
                    b.round(i, Series::Degree, "max_degree", "D_u(i) ~ np", Like, np);
                }
                b.round(i, Series::Codegree, "max_codegree_b", "X_uv(i) <~ log^(2a) n", Below, log2a);
                if full {
                    b.round(i, Series::F, "max_f", "F_u(i) < n (eps = 1)", Below, n);
                    b.round(i, Series::Y, "max_y", "Y_uv(i) < np log^(2a(r-2)) n", Below, np * log2ar);
                    b.round(i, Series::Z, "max_z", "Z_uv(i) < n log^(2a(r-2)) n", Below, n * log2ar);
                }
            }
            b.overall(Series::Codegree, "max_codegree", "X_uv(i) < 3 log n over all rounds", Below, 3.0 * log_n);
            let rounds: Vec<f64> = traces.iter().map(|t| t.rounds_run as f64).collect();
            b.push(None, "rounds_run", "stops within log n rounds (x2 slack)", AtMost, 2.0 * log_n, rounds);
        }
        Regime::Case2 => {
            b.round(1, Series::Degree, "max_degree", "D_u(1) < 2 n^(1/8)", Below, 2.0 * n.powf(0.125));
            b.round(1, Series::Codegree, "max_codegree", "X_uv(1) < 2 log n", Below, 2.0 * log_n);
            if full {
                let two = 2f64;
                b.round(1, Series::F, "max_f", "F_u(1) < 2^(r-1) n^(1/4) log^(r-3) n", Below,
                    two.powi(r - 1) * n.powf(0.25) * log_n.powi(r - 3));
                b.round(1, Series::Y, "max_y", "Y_uv(1) < 2^(r-1) n^(1/8) log^(r-2) n", Below,
                    two.powi(r - 1) * n.powf(0.125) * log_n.powi(r - 2));
                b.round(1, Series::Z, "max_z", "Z_uv(1) < 2^(2r-3) n^(1/4) log^(2r-5) n", Below,
                    two.powi(2 * r - 3) * n.powf(0.25) * log_n.powi(2 * r - 5));
            }
            b.round(2, Series::Codegree, "max_codegree", "X_uv(2) < 4 log n", Below, 4.0 * log_n);
            b.round(2, Series::Added, "edges_added", "round 2 adds at most 2 n^(1/2) edges", AtMost, 2.0 * n.sqrt());
            b.round(3, Series::Added, "edges_added", "round 3 adds no edges", AtMost, 0.0);
        }
        Regime::Case3 => {
            b.round(1, Series::Added, "edges_added", "G(1) has at most 2 n^(5/8) edges", AtMost, 2.0 * n.powf(0.625));
            b.round(1, Series::Codegree, "max_codegree", "X_uv(1) < 4 log n", Below, 4.0 * log_n);
            b.round(2, Series::Added, "edges_added", "round 2 adds no edges", AtMost, 0.0);
        }
    }
    let rows = b.rows;

    Ok(ConcentrationReport {
        n: base.n,
        r: base.r,
        p,
        alpha,
        regime,
        trials: traces.len(),
        rounds_run: traces.iter().map(|t| t.rounds_run).collect(),
        rows,
    })
}
