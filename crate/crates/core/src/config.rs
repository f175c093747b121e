//! Process parameterization.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Which vertex pairs may be sampled as the pair of an open walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HubPairPolicy {
    /// Only pairs of non-hub vertices are ever sampled.
    #[default]
    Exclude,
    /// Pairs touching the hub side are sampled as well.
    Include,
}

impl std::str::FromStr for HubPairPolicy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exclude" => Ok(Self::Exclude),
            "include" => Ok(Self::Include),
            other => Err(ConfigError::Invalid(format!(
                "unknown hub pair policy `{other}` (expected exclude|include)"
            ))),
        }
    }
}

/// How much per-round statistics the engine records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsLevel {
    /// No snapshots.
    #[default]
    Off,
    /// Degrees, codegree maximum and edge count.
    Cheap,
    /// Cheap statistics plus open-walk structure counts (size gated).
    Full,
}

impl std::str::FromStr for StatsLevel {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(Self::Off),
            "cheap" => Ok(Self::Cheap),
            "full" => Ok(Self::Full),
            other => Err(ConfigError::Invalid(format!(
                "unknown stats level `{other}` (expected off|cheap|full)"
            ))),
        }
    }
}

/// Largest vertex count for which `StatsLevel::Full` is honoured by default.
pub const DEFAULT_FULL_STATS_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub seed: u64,
    pub max_rounds: u32,
    pub hub_pair_policy: HubPairPolicy,
    pub stats_level: StatsLevel,
    pub full_stats_limit: usize,
}

/// `4 * ceil(ln n)`, at least 1.
pub fn default_max_rounds(n: usize) -> u32 {
    let l = (n.max(1) as f64).ln().ceil() as u32;
    (4 * l).max(1)
}

impl ProcessConfig {
    /// Config with default round cap, hub policy and no statistics.
    pub fn new(n: usize, r: usize, p: f64, seed: u64) -> Self {
        Self {
            n,
            r,
            p,
            seed,
            max_rounds: default_max_rounds(n),
            hub_pair_policy: HubPairPolicy::default(),
            stats_level: StatsLevel::default(),
            full_stats_limit: DEFAULT_FULL_STATS_LIMIT,
        }
    }

    pub fn with_max_rounds(mut self, max_rounds: u32) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_hub_pairs(mut self, policy: HubPairPolicy) -> Self {
        self.hub_pair_policy = policy;
        self
    }

    pub fn with_stats(mut self, level: StatsLevel) -> Self {
        self.stats_level = level;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.r < 3 {
            return Err(ConfigError::Invalid(format!(
                "uniformity r must be at least 3, got {}",
                self.r
            )));
        }
        if self.n < self.r {
            return Err(ConfigError::Invalid(format!(
                "vertex count n={} is smaller than r={}",
                self.n, self.r
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(ConfigError::Invalid(format!("n={} does not fit in u32", self.n)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ConfigError::Invalid(format!(
                "probability p={} is outside [0, 1]",
                self.p
            )));
        }
        if self.max_rounds < 1 {
            return Err(ConfigError::Invalid("max_rounds must be at least 1".into()));
        }
        Ok(())
    }

    pub fn hub_count(&self) -> usize {
        self.r - 2
    }

    pub fn nonhub_count(&self) -> usize {
        self.n - self.r + 2
    }

    /// Number of non-hub pairs, i.e. the edge count of the complete non-hub graph.
    pub fn nonhub_pairs(&self) -> u64 {
        let m = self.nonhub_count() as u64;
        m * (m - 1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        assert!(ProcessConfig::new(2, 3, 0.5, 0).validate().is_err());
        assert!(ProcessConfig::new(10, 3, 1.5, 0).validate().is_err());
        assert!(ProcessConfig::new(10, 3, -0.1, 0).validate().is_err());
        assert!(ProcessConfig::new(10, 2, 0.1, 0).validate().is_err());
        assert!(ProcessConfig::new(10, 3, 0.1, 0).with_max_rounds(0).validate().is_err());
        assert!(ProcessConfig::new(3, 3, 0.0, 0).validate().is_ok());
    }

    #[test]
    fn default_round_cap() {
        assert_eq!(default_max_rounds(10_000), 40);
        assert_eq!(default_max_rounds(1), 1);
        assert_eq!(ProcessConfig::new(6, 3, 1.0, 0).max_rounds, 8);
    }

    #[test]
    fn parses_enums() {
        assert_eq!("include".parse::<HubPairPolicy>().unwrap(), HubPairPolicy::Include);
        assert_eq!("full".parse::<StatsLevel>().unwrap(), StatsLevel::Full);
        assert!("maybe".parse::<StatsLevel>().is_err());
    }
}
