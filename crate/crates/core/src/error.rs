use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("design does not conform to schema `{schema}`: {reason}")]
    InvalidDesign { schema: String, reason: String },

    #[error("invalid gene schema: {0}")]
    InvalidSchema(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate bounds in dimension {dim}: lo = {lo}, hi = {hi}")]
    DegenerateBounds { dim: usize, lo: f64, hi: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("feature width mismatch: expected {expected}, got {got}")]
    FeatureWidth { expected: usize, got: usize },

    #[error("meta-learner is in {actual} mode, {requested} was requested")]
    WrongMode {
        actual: &'static str,
        requested: &'static str,
    },

    #[error("pruning at threshold {theta_p} removed every repository entry")]
    EmptyPrunedRepository { theta_p: f64 },

    #[error("design engine failed: {0}")]
    Engine(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
