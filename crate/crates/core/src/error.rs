use thiserror::Error;

/// Errors raised by state construction, measures, decompositions and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// A numerical contract was broken by more than its tolerance.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("rank {rank} is outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("canonical decomposition failed: {0}")]
    Decomposition(String),

    #[error("matrix is not an isometry (max deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error("ensemble size {size} is smaller than the state rank {rank}")]
    EnsembleTooSmall { size: usize, rank: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
