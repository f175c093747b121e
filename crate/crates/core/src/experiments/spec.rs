//! TOML experiment spec files.
//!
//! ```toml
//! seed = 42            # required, no clock-derived default
//! trials = 10          # required
//! kind = "final-size"  # optional: final-size | threshold | connectivity | concentration
//! jobs = 4             # optional worker count
//! r = 3                # default uniformity for grid entries (3)
//! hub_pairs = "exclude"
//! stats = "off"        # off | cheap | full
//! full_stats_limit = 500
//! max_rounds = 40      # optional; default 4·ceil(ln n) per point
//! alpha = 0.6
//!
//! [[grid]]             # cartesian product of the listed values
//! n = [1000, 2000]
//! p = ["n^-0.75", 0.001]   # or: c = [0.3, 0.8] meaning p = c·n^-0.5
//! r = 3                # optional override
//!
//! [output]
//! csv = "sweep.csv"
//! json = "sweep.json"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, GridPoint, SweepKind, DEFAULT_ALPHA};
use crate::config::{HubPairPolicy, StatsLevel, DEFAULT_FULL_STATS_LIMIT};
use crate::error::{Error, Result};
use crate::pexpr::PExpr;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: OneOrMany<usize>,
    p: Option<OneOrMany<RawP>>,
    c: Option<OneOrMany<f64>>,
    r: Option<OneOrMany<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawP {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: Option<u64>,
    trials: Option<usize>,
    kind: Option<String>,
    jobs: Option<usize>,
    r: Option<usize>,
    hub_pairs: Option<String>,
    stats: Option<String>,
    full_stats_limit: Option<usize>,
    max_rounds: Option<u32>,
    alpha: Option<f64>,
    #[serde(default)]
    grid: Vec<RawGrid>,
    #[serde(default)]
    output: Outputs,
}

/// 1-based line of the first line whose trimmed text starts with `prefix`.
fn line_of(src: &str, prefix: &str) -> Option<usize> {
    src.lines()
        .position(|l| l.trim_start().starts_with(prefix))
        .map(|i| i + 1)
}

/// 1-based line of the `index`-th `[[grid]]` header.
fn grid_line(src: &str, index: usize) -> Option<usize> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("[[grid]]"))
        .nth(index)
        .map(|(i, _)| i + 1)
}

fn anchored(line: Option<usize>, msg: impl std::fmt::Display) -> Error {
    match line {
        Some(l) => Error::Spec(format!("line {l}: {msg}")),
        None => Error::Spec(msg.to_string()),
    }
}

/// Parses a spec file's text. Returns the spec and the kind it names, if any.
pub fn parse_spec(src: &str) -> Result<(ExperimentSpec, Option<SweepKind>)> {
    let raw: RawSpec = toml::from_str(src).map_err(|e| Error::Spec(e.to_string().trim_end().to_string()))?;

    let seed = raw
        .seed
        .ok_or_else(|| Error::Spec("`seed` is required so results are reproducible".into()))?;
    let trials = raw
        .trials
        .ok_or_else(|| Error::Spec("`trials` is required".into()))?;
    if trials < 1 {
        return Err(anchored(line_of(src, "trials"), "`trials` must be at least 1"));
    }
    let kind = raw
        .kind
        .as_deref()
        .map(|k| k.parse::<SweepKind>().map_err(|e| anchored(line_of(src, "kind"), e)))
        .transpose()?;
    let hub_pair_policy = match raw.hub_pairs.as_deref() {
        Some(s) => s
            .parse::<HubPairPolicy>()
            .map_err(|e| anchored(line_of(src, "hub_pairs"), e))?,
        None => HubPairPolicy::default(),
    };
    let stats_level = match raw.stats.as_deref() {
        Some(s) => s
            .parse::<StatsLevel>()
            .map_err(|e| anchored(line_of(src, "stats"), e))?,
        None => StatsLevel::default(),
    };
    let alpha = raw.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(alpha > 0.5) {
        return Err(anchored(line_of(src, "alpha"), format!("`alpha` must exceed 1/2, got {alpha}")));
    }
    if raw.grid.is_empty() {
        return Err(Error::Spec("the grid is empty: add at least one [[grid]] table".into()));
    }
    let default_r = raw.r.unwrap_or(3);

    let mut grid = Vec::new();
    for (i, g) in raw.grid.iter().enumerate() {
        let at = grid_line(src, i);
        let ns = g.n.to_vec();
        let rs = g.r.as_ref().map_or(vec![default_r], |r| r.to_vec());
        let ps: Vec<(PExpr, Option<f64>)> = match (&g.p, &g.c) {
            (Some(_), Some(_)) => return Err(anchored(at, "give either `p` or `c`, not both")),
            (None, None) => return Err(anchored(at, "grid entry needs `p` or `c`")),
            (Some(p), None) => p
                .to_vec()
                .into_iter()
                .map(|raw_p| match raw_p {
                    RawP::Number(x) => Ok((PExpr::Literal(x), None)),
                    RawP::Text(s) => s.parse::<PExpr>().map(|e| (e, None)).map_err(|e| anchored(at, e)),
                })
                .collect::<Result<_>>()?,
            (None, Some(c)) => c.to_vec().into_iter().map(|c| (PExpr::sqrt_scaled(c), Some(c))).collect(),
        };
        if ns.is_empty() || rs.is_empty() || ps.is_empty() {
            return Err(anchored(at, "grid entry has an empty value list"));
        }
        for &n in &ns {
            for &r in &rs {
                for (p, c) in &ps {
                    grid.push(GridPoint {
                        n,
                        r,
                        p: p.clone(),
                        c: *c,
                    });
                }
            }
        }
    }

    let spec = ExperimentSpec {
        seed,
        trials,
        parallelism: raw.jobs.unwrap_or(1).max(1),
        hub_pair_policy,
        stats_level,
        full_stats_limit: raw.full_stats_limit.unwrap_or(DEFAULT_FULL_STATS_LIMIT),
        max_rounds: raw.max_rounds,
        alpha,
        grid,
        outputs: raw.output,
    };
    // point-level validation, anchored at the grid table that produced it
    let mut offset = 0;
    for (i, g) in raw.grid.iter().enumerate() {
        let count = g.n.to_vec().len()
            * g.r.as_ref().map_or(1, |r| r.to_vec().len())
            * match (&g.p, &g.c) {
                (Some(p), _) => p.to_vec().len(),
                (_, Some(c)) => c.to_vec().len(),
                _ => 0,
            };
        for point in &spec.grid[offset..offset + count] {
            point.config(&spec).map_err(|e| anchored(grid_line(src, i), e))?;
        }
        offset += count;
    }
    Ok((spec, kind))
}
