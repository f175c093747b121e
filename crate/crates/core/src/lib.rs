//! Simulator and experiment harness for the random r-generalized triadic
//! process on a lazily realized random r-uniform hypergraph.

pub mod cli;
pub mod config;
pub mod engine;
pub mod enumerator;
pub mod error;
pub mod graph;
pub mod experiments;
pub mod oracle;
pub mod pexpr;
pub mod stats;

pub use config::{HubPairPolicy, ProcessConfig, StatsLevel};
pub use engine::{run_process, run_round, run_round_using, ProcessResult, RoundReport, RoundStrategy, Simulation};
pub use enumerator::{canonical_walk, open_walks_bruteforce, open_walks_incremental, OpenWalk};
pub use error::{ConfigError, Error, Result};
pub use graph::GraphState;
pub use oracle::HyperedgeOracle;
pub use stats::StatsSnapshot;
