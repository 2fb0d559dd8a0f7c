use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found} (row {row})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        row: usize,
    },

    #[error("persistence engines disagree: {0}")]
    EngineMismatch(String),

    #[error("combinatorial guard exceeded: C({m}, {b}) = {count} subsets (limit {limit})")]
    TooManySubsets {
        m: usize,
        b: usize,
        count: u128,
        limit: u128,
    },

    #[error("malformed data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
