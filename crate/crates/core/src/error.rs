use std::path::PathBuf;

use crate::patterns::PatternSet;

/// Errors raised across the capacity lab.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} neurons, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("need at least {needed} patterns, got {actual}")]
    InsufficientPatterns { needed: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("truncated input: expected {expected} bytes, found {actual}")]
    Length { expected: usize, actual: usize },

    #[error(
        "target HD {target} infeasible after {trials} draws: accepted {accepted} patterns, realized mean HD {realized_hd:?}"
    )]
    InfeasibleTarget {
        target: f64,
        trials: usize,
        accepted: usize,
        realized_hd: Option<f64>,
        best_effort: Box<PatternSet>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
