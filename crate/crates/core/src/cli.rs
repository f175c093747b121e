//! Command-line front end.
//!
//! Every subcommand prints one JSON [`OutputRecord`] (or CSV with
//! `run --out csv`) on stdout. Diagnostics and progress go to stderr.
//!
//! Exit codes: 0 success, 1 usage/config/runtime error, 2 when `run` stopped
//! at the round cap with open walks left.
//!
//! CSV layouts:
//!
//! * `run --out csv`: `n,r,p,seed,max_rounds,rounds_run,terminated,final_edges_nonhub,complete`
//! * `run --out csv --per-round`: `round,walks_sampled,distinct_rsets_queried,edges_added,`
//!   `nonhub_edge_count,max_degree,mean_degree,max_codegree,max_f,max_y,max_z`
//!   (statistics columns are empty when not recorded)
//! * sweeps: the [`PointSummary`] fields in declaration order
//! * concentration sweeps: `n,r,p,regime,round,quantity,claim,relation,bound,empirical_max,margin,fraction_within,trials`

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{HubPairPolicy, ProcessConfig, StatsLevel};
use crate::engine::{run_process, ProcessResult};
use crate::error::{Error, Result};
use crate::experiments::{
    concentration_report, connectivity_sweep, exhaustive_small_oracle, monte_carlo_final_size,
    par_trials, parse_spec, threshold_sweep, trial_seed, write_summary_csv, ConcentrationReport,
    ExactDistribution, ExperimentSpec, SweepKind,
};
use crate::pexpr::PExpr;

pub const SCHEMA_VERSION: u32 = 1;
pub const JOBS_ENV: &str = "TRIADIC_JOBS";

#[derive(Debug, Parser)]
#[command(name = "triadic", version, about = "Random r-generalized triadic process simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the process once.
    Run(RunArgs),
    /// Run an experiment described by a TOML spec file.
    Sweep(SweepArgs),
    /// Compare the exact expectation of a tiny instance with Monte Carlo.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    /// Literal or expression in n, e.g. `0.8*n^-0.5` or `2*log(n)/n`.
    #[arg(long)]
    pub p: PExpr,
    #[arg(long)]
    pub seed: u64,
    /// Defaults to 4·ceil(ln n).
    #[arg(long)]
    pub max_rounds: Option<u32>,
    #[arg(long, default_value = "exclude")]
    pub hub_pairs: HubPairPolicy,
    /// off | cheap | full
    #[arg(long, default_value = "cheap")]
    pub stats: StatsLevel,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
    /// Include the per-round reports.
    #[arg(long)]
    pub per_round: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec_file: PathBuf,
    /// Overrides the `kind` key of the spec.
    #[arg(long)]
    pub kind: Option<SweepKind>,
    /// CSV output path; overrides `[output] csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON output path; overrides `[output] json`.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, env = JOBS_ENV)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long)]
    pub p: PExpr,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value = "exclude")]
    pub hub_pairs: HubPairPolicy,
    #[arg(long, env = JOBS_ENV)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord<C, R> {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub kind: String,
    pub config: C,
    pub result: R,
    pub wall_time_secs: f64,
}

impl<C, R> OutputRecord<C, R> {
    fn new(kind: &str, config: C, result: R, started: Instant) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            kind: kind.to_string(),
            config,
            result,
            wall_time_secs: started.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub exact: ExactDistribution,
    pub exact_variance: f64,
    pub trials: usize,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    /// `(empirical_mean - exact) / (empirical_std / sqrt(trials))`, 0 when the sample has no spread.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepPayload {
    Summary(crate::experiments::SweepSummary),
    Concentration(Vec<ConcentrationReport>),
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                if !text.contains("Usage:") {
                    let _ = writeln!(stderr, "\n{}", <Cli as clap::CommandFactory>::command().render_usage());
                }
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Run(args) => cmd_run(&args, out),
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::Compare(args) => cmd_compare(&args, out),
    }
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let p = args.p.eval(args.n, args.r)?;
    let mut config = ProcessConfig::new(args.n, args.r, p, args.seed)
        .with_hub_pairs(args.hub_pairs)
        .with_stats(args.stats);
    if let Some(m) = args.max_rounds {
        config.max_rounds = m;
    }
    config.validate()?;
    let mut result = run_process(&config)?;
    if result.cap_hit() {
        log::warn!("stopped at the round cap ({}) with open walks left", config.max_rounds);
    }
    let code = if result.terminated { 0 } else { 2 };
    if !args.per_round {
        result.per_round.clear();
    }
    match args.out {
        OutFormat::Json => {
            let record = OutputRecord::new("run", config, result, started);
            emit_json(&record, out)?;
        }
        OutFormat::Csv => write_run_csv(&result, args.per_round, out)?,
    }
    Ok(code)
}

#[derive(Serialize)]
struct RunRow {
    n: usize,
    r: usize,
    p: f64,
    seed: u64,
    max_rounds: u32,
    rounds_run: u32,
    terminated: bool,
    final_edges_nonhub: u64,
    complete: bool,
}

#[derive(Serialize)]
struct RoundRow {
    round: u32,
    walks_sampled: u64,
    distinct_rsets_queried: u64,
    edges_added: u64,
    nonhub_edge_count: Option<u64>,
    max_degree: Option<u32>,
    mean_degree: Option<f64>,
    max_codegree: Option<u32>,
    max_f: Option<u64>,
    max_y: Option<u64>,
    max_z: Option<u64>,
}

fn write_run_csv(result: &ProcessResult, per_round: bool, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if per_round {
        for rep in &result.per_round {
            let s = rep.stats.as_ref();
            let o = s.and_then(|s| s.open_walk_counts.as_ref());
            w.serialize(RoundRow {
                round: rep.round,
                walks_sampled: rep.walks_sampled,
                distinct_rsets_queried: rep.distinct_rsets_queried,
                edges_added: rep.edges_added,
                nonhub_edge_count: s.map(|s| s.nonhub_edge_count),
                max_degree: s.map(|s| s.max_degree),
                mean_degree: s.map(|s| s.mean_degree),
                max_codegree: s.map(|s| s.max_codegree),
                max_f: o.map(|o| o.max_f),
                max_y: o.map(|o| o.max_y),
                max_z: o.map(|o| o.max_z),
            })?;
        }
    } else {
        let c = &result.config;
        w.serialize(RunRow {
            n: c.n,
            r: c.r,
            p: c.p,
            seed: c.seed,
            max_rounds: c.max_rounds,
            rounds_run: result.rounds_run,
            terminated: result.terminated,
            final_edges_nonhub: result.final_edges_nonhub,
            complete: result.complete(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Relative output paths in a spec are taken relative to the spec file.
fn resolve(spec_file: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    spec_file
        .parent()
        .map_or_else(|| path.to_path_buf(), |dir| dir.join(path))
}

#[derive(Serialize)]
struct MarginCsvRow<'a> {
    n: usize,
    r: usize,
    p: f64,
    regime: crate::experiments::Regime,
    round: Option<u32>,
    quantity: &'a str,
    claim: &'a str,
    relation: crate::experiments::Relation,
    bound: f64,
    empirical_max: f64,
    margin: Option<f64>,
    fraction_within: Option<f64>,
    trials: usize,
}

fn write_margin_csv(reports: &[ConcentrationReport], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rep in reports {
        for row in &rep.rows {
            w.serialize(MarginCsvRow {
                n: rep.n,
                r: rep.r,
                p: rep.p,
                regime: rep.regime,
                round: row.round,
                quantity: &row.quantity,
                claim: &row.claim,
                relation: row.relation,
                bound: row.bound,
                empirical_max: row.empirical_max,
                margin: row.margin,
                fraction_within: row.fraction_within,
                trials: row.trials,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_concentration(spec: &ExperimentSpec) -> Result<Vec<ConcentrationReport>> {
    spec.validate()?;
    spec.grid
        .iter()
        .map(|point| {
            let config = point.config(spec)?;
            concentration_report(&config, spec.trials, spec.alpha, spec.parallelism)
        })
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let src = std::fs::read_to_string(&args.spec_file)?;
    let (mut spec, spec_kind) = parse_spec(&src)
        .map_err(|e| Error::Spec(format!("{}: {}", args.spec_file.display(), e.to_string().trim_start_matches("spec error: "))))?;
    let kind = args.kind.or(spec_kind).ok_or_else(|| {
        Error::Spec("no sweep kind: pass --kind or set `kind` in the spec".into())
    })?;
    if let Some(jobs) = args.jobs {
        spec.parallelism = jobs.max(1);
    }
    let csv_path = args
        .csv
        .clone()
        .or_else(|| spec.outputs.csv.as_deref().map(|p| resolve(&args.spec_file, p)));
    let json_path = args
        .json
        .clone()
        .or_else(|| spec.outputs.json.as_deref().map(|p| resolve(&args.spec_file, p)));

    let payload = match kind {
        SweepKind::FinalSize => SweepPayload::Summary(monte_carlo_final_size(&spec)?),
        SweepKind::Threshold => SweepPayload::Summary(threshold_sweep(&spec)?),
        SweepKind::Connectivity => SweepPayload::Summary(connectivity_sweep(&spec)?),
        SweepKind::Concentration => SweepPayload::Concentration(run_concentration(&spec)?),
    };
    if let Some(path) = &csv_path {
        let file = std::fs::File::create(path)?;
        match &payload {
            SweepPayload::Summary(s) => write_summary_csv(s, file)?,
            SweepPayload::Concentration(reports) => write_margin_csv(reports, file)?,
        }
        log::info!("wrote {}", path.display());
    }
    let label = serde_json::to_value(kind)?;
    let record = OutputRecord::new(label.as_str().unwrap_or("sweep"), spec, payload, started);
    if let Some(path) = &json_path {
        let mut file = std::fs::File::create(path)?;
        emit_json(&record, &mut file)?;
        log::info!("wrote {}", path.display());
    }
    emit_json(&record, out)?;
    Ok(0)
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let p = args.p.eval(args.n, args.r)?;
    let config = ProcessConfig::new(args.n, args.r, p, args.seed).with_hub_pairs(args.hub_pairs);
    config.validate()?;
    if args.trials < 2 {
        return Err(Error::Domain("compare needs at least 2 trials".into()));
    }
    let exact = exhaustive_small_oracle(&config)?;
    let finals = par_trials(args.jobs.unwrap_or(1), args.trials, |t| {
        let mut cfg = config.clone();
        cfg.seed = trial_seed(args.seed, t);
        Ok(run_process(&cfg)?.final_edges_nonhub as f64)
    })?;
    let k = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / k;
    let std = (finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let z = if std > 0.0 {
        (mean - exact.expectation) / (std / k.sqrt())
    } else {
        0.0
    };
    let result = Comparison {
        exact_variance: exact.variance(),
        exact,
        trials: args.trials,
        empirical_mean: mean,
        empirical_std: std,
        z,
    };
    emit_json(&OutputRecord::new("compare", config, result, started), out)?;
    Ok(0)
}
