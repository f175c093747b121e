use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("C({n}, {r}) r-sets do not fit a 128-bit index")]
    TooManyRsets { n: usize, r: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("round {got} requested but the state expects round {expected}")]
    RoundOutOfOrder { expected: u32, got: u32 },
    #[error("full statistics refused: n={n} exceeds the limit of {limit}")]
    FullStatsTooLarge { n: usize, limit: usize },
    #[error("{0}")]
    Domain(String),
    #[error("exhaustive oracle budget exceeded: {0}")]
    OverBudget(String),
    #[error("experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
