//! Batch harness: Monte Carlo sweeps over grids of `(n, p, r)`, the
//! concentration report, and the exact small-instance oracle.
//!
//! Trial `t` of every grid point runs with seed `base_seed ^ t`, so results do
//! not depend on the order or parallelism with which trials execute.

mod concentration;
mod exhaustive;
mod spec;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ProcessConfig;
use crate::engine::Simulation;
use crate::error::{Error, Result};
use crate::pexpr::PExpr;
use crate::stats::connectivity_after_hub_removal;

pub use concentration::{concentration_report, ConcentrationReport, MarginRow, Regime, Relation};
pub use exhaustive::{exhaustive_small_oracle, ExactDistribution, EXHAUSTIVE_MAX_RSETS, EXHAUSTIVE_MAX_LEAVES};
pub use spec::{parse_spec, Outputs};

/// Which experiment a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    FinalSize,
    Threshold,
    Connectivity,
    Concentration,
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "final-size" => Ok(Self::FinalSize),
            "threshold" => Ok(Self::Threshold),
            "connectivity" => Ok(Self::Connectivity),
            "concentration" => Ok(Self::Concentration),
            other => Err(Error::Spec(format!(
                "unknown sweep kind `{other}` (expected final-size|threshold|connectivity|concentration)"
            ))),
        }
    }
}

/// One grid point. `c`, when present, records that `p = c·n^(-1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub r: usize,
    pub p: PExpr,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
}

impl GridPoint {
    pub fn new(n: usize, r: usize, p: PExpr) -> Self {
        Self { n, r, p, c: None }
    }

    pub fn scaled(n: usize, r: usize, c: f64) -> Self {
        Self {
            n,
            r,
            p: PExpr::sqrt_scaled(c),
            c: Some(c),
        }
    }

    /// The process configuration of this point for the given template.
    pub fn config(&self, spec: &ExperimentSpec) -> Result<ProcessConfig> {
        let p = self.p.eval(self.n, self.r)?;
        let mut cfg = ProcessConfig::new(self.n, self.r, p, spec.seed)
            .with_hub_pairs(spec.hub_pair_policy)
            .with_stats(spec.stats_level);
        cfg.full_stats_limit = spec.full_stats_limit;
        if let Some(m) = spec.max_rounds {
            cfg.max_rounds = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: usize,
    pub parallelism: usize,
    pub hub_pair_policy: crate::config::HubPairPolicy,
    pub stats_level: crate::config::StatsLevel,
    pub full_stats_limit: usize,
    /// `None` uses the per-n default cap.
    pub max_rounds: Option<u32>,
    /// Exponent in the `log^(2α) n` codegree reference of the concentration report.
    pub alpha: f64,
    pub grid: Vec<GridPoint>,
    #[serde(default)]
    pub outputs: Outputs,
}

pub const DEFAULT_ALPHA: f64 = 0.6;

impl ExperimentSpec {
    pub fn new(seed: u64, trials: usize, grid: Vec<GridPoint>) -> Self {
        Self {
            seed,
            trials,
            parallelism: 1,
            hub_pair_policy: Default::default(),
            stats_level: Default::default(),
            full_stats_limit: crate::config::DEFAULT_FULL_STATS_LIMIT,
            max_rounds: None,
            alpha: DEFAULT_ALPHA,
            grid,
            outputs: Outputs::default(),
        }
    }

    pub fn with_parallelism(mut self, jobs: usize) -> Self {
        self.parallelism = jobs.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Spec("trials must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Spec("the grid is empty".into()));
        }
        for point in &self.grid {
            point.config(self)?;
        }
        Ok(())
    }
}

/// Seed of trial `index` derived from the base seed.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base ^ index as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub final_edges_nonhub: u64,
    pub round1_edges: u64,
    pub rounds_run: u32,
    pub terminated: bool,
    pub complete: bool,
    pub connected: bool,
}

/// Aggregate over the trials of one grid point. Column order is the CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub p_expr: String,
    pub c: Option<f64>,
    pub trials: usize,
    pub mean_final_edges: f64,
    pub std_final_edges: f64,
    pub min_final_edges: u64,
    pub max_final_edges: u64,
    /// `mean_final_edges / (n² p / 2)`.
    pub ratio_half_n2p: Option<f64>,
    /// `mean_final_edges / n^(3/2)`.
    pub edges_per_n32: f64,
    pub completion_fraction: f64,
    pub connected_fraction: f64,
    pub mean_rounds: f64,
    pub cap_hit_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDetail {
    pub summary: PointSummary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub points: Vec<PointDetail>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl SweepSummary {
    pub fn summaries(&self) -> impl Iterator<Item = &PointSummary> {
        self.points.iter().map(|d| &d.summary)
    }
}

/// Runs `f(trial_index)` for every trial on a pool of `jobs` workers,
/// returning results in trial order.
pub(crate) fn par_trials<T, F>(jobs: usize, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Spec(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

/// One process run, reduced to the quantities the sweeps aggregate.
pub fn run_trial(config: &ProcessConfig) -> Result<TrialRecord> {
    let (result, state) = Simulation::new(config.clone())?.run_with_state()?;
    Ok(TrialRecord {
        seed: config.seed,
        final_edges_nonhub: result.final_edges_nonhub,
        round1_edges: result.per_round.first().map_or(0, |r| r.edges_added),
        rounds_run: result.rounds_run,
        terminated: result.terminated,
        complete: result.complete(),
        connected: connectivity_after_hub_removal(&state),
    })
}

fn summarize(point: &GridPoint, config: &ProcessConfig, trials: &[TrialRecord]) -> PointSummary {
    let k = trials.len() as f64;
    let finals: Vec<f64> = trials.iter().map(|t| t.final_edges_nonhub as f64).collect();
    let mean = finals.iter().sum::<f64>() / k;
    let var = if trials.len() > 1 {
        finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let n = config.n as f64;
    let half_n2p = 0.5 * n * n * config.p;
    let frac = |pred: fn(&TrialRecord) -> bool| trials.iter().filter(|t| pred(t)).count() as f64 / k;
    PointSummary {
        n: config.n,
        r: config.r,
        p: config.p,
        p_expr: point.p.to_string(),
        c: point.c,
        trials: trials.len(),
        mean_final_edges: mean,
        std_final_edges: var.sqrt(),
        min_final_edges: trials.iter().map(|t| t.final_edges_nonhub).min().unwrap_or(0),
        max_final_edges: trials.iter().map(|t| t.final_edges_nonhub).max().unwrap_or(0),
        ratio_half_n2p: (half_n2p > 0.0).then(|| mean / half_n2p),
        edges_per_n32: mean / n.powf(1.5),
        completion_fraction: frac(|t| t.complete),
        connected_fraction: frac(|t| t.connected),
        mean_rounds: trials.iter().map(|t| t.rounds_run as f64).sum::<f64>() / k,
        cap_hit_fraction: frac(|t| !t.terminated),
    }
}

fn run_grid(spec: &ExperimentSpec, kind: SweepKind) -> Result<SweepSummary> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.grid.len());
    for point in &spec.grid {
        let base = point.config(spec)?;
        let trials = par_trials(spec.parallelism, spec.trials, |t| {
            let mut cfg = base.clone();
            cfg.seed = trial_seed(spec.seed, t);
            run_trial(&cfg)
        })?;
        let summary = summarize(point, &base, &trials);
        log::info!(
            "n={} r={} p={:.4e}: mean final {:.1}, complete {:.2}, connected {:.2}",
            summary.n,
            summary.r,
            summary.p,
            summary.mean_final_edges,
            summary.completion_fraction,
            summary.connected_fraction
        );
        points.push(PointDetail { summary, trials });
    }
    Ok(SweepSummary {
        kind,
        points,
        warnings: Vec::new(),
    })
}

/// Final-size law: reports `mean final edges / (n² p / 2)` per grid point.
/// Points with `p n² < 50` run but carry a warning.
pub fn monte_carlo_final_size(spec: &ExperimentSpec) -> Result<SweepSummary> {
    let mut warnings = Vec::new();
    for point in &spec.grid {
        let p = point.p.eval(point.n, point.r)?;
        let mass = p * (point.n as f64).powi(2);
        if mass < 50.0 {
            let msg = format!(
                "n={} p={p:.3e}: p·n² = {mass:.1} < 50, relative concentration is weak",
                point.n
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let mut summary = run_grid(spec, SweepKind::FinalSize)?;
    summary.warnings = warnings;
    Ok(summary)
}

/// Propagation contrast at `p = c n^(-1/2)`; only defined for r = 3.
pub fn threshold_sweep(spec: &ExperimentSpec) -> Result<SweepSummary> {
    if let Some(bad) = spec.grid.iter().find(|g| g.r != 3) {
        return Err(Error::Spec(format!(
            "threshold sweep is defined for r = 3 only (the propagation threshold c = 1/2 is an r = 3 result); grid has r = {}",
            bad.r
        )));
    }
    run_grid(spec, SweepKind::Threshold)
}

/// Connectivity of the final non-hub graph per grid point.
pub fn connectivity_sweep(spec: &ExperimentSpec) -> Result<SweepSummary> {
    run_grid(spec, SweepKind::Connectivity)
}

/// Writes one CSV row per grid point.
pub fn write_summary_csv<W: std::io::Write>(summary: &SweepSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in summary.summaries() {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}
