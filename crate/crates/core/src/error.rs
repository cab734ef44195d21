use thiserror::Error;

use crate::curves::CurveId;

pub type Result<T> = std::result::Result<T, Error>;

/// Which grid axis a cell coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("granularity {0} outside 1..=31")]
    Granularity(u32),

    #[error("cell coordinate {axis}={value} outside [0, {limit})")]
    CellOutOfRange { axis: Axis, value: u64, limit: u64 },

    #[error("curve index {value} outside [0, 4^{n})")]
    IndexOutOfRange { value: u64, n: u32 },

    #[error("latitude out of range: {0}")]
    Latitude(f64),

    #[error("longitude out of range: {0}")]
    Longitude(f64),

    #[error("invalid character {ch:?} at position {pos}")]
    InvalidCharacter { ch: char, pos: usize },

    #[error("wrong hash length: expected {expected} characters for n={n}, got {actual}")]
    HashLength { expected: usize, actual: usize, n: u32 },

    #[error("hash encodes index {value}, which is not below 4^{n}")]
    HashRange { value: u64, n: u32 },

    #[error("cached mode requires H tables covering n={n} (curve {curve})")]
    MissingTables { curve: CurveId, n: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("query class too large: {queries} queries exceeds the limit of {limit}; use a smaller n or window")]
    Capacity { queries: u128, limit: u128 },

    #[error("timer too coarse: batch took {batch_ns} ns, needs at least {required_ns} ns (100x timer granularity); increase the batch size")]
    TimerResolution { batch_ns: u128, required_ns: u128 },

    #[error("benchmark correctness sweep failed: {0}")]
    Correctness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
