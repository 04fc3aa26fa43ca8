use std::path::PathBuf;

use thiserror::Error;

use crate::sim::Compartment;

pub type Result<T, E = WormError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum WormError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basic model requires coop_frac = 1, immune_frac = 0 and on_prob = 1")]
    NotBasicModel,

    #[error("step {step} is unstable: beta*N*step = {product} exceeds 0.1")]
    UnstableStep { step: f64, product: f64 },

    #[error("integration diverged at t = {t}: {compartment} = {value}")]
    Diverged { t: f64, compartment: &'static str, value: f64 },

    #[error("seed pool exhausted: {available} cooperative non-immune nodes for {requested} seeds")]
    SeedPoolExhausted { available: usize, requested: usize },

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("encounter at t = {time} is out of order (previous event at t = {previous})")]
    OutOfOrder { time: f64, previous: f64 },

    #[error("illegal transition of node {node} at t = {time}: {from:?} -> {to:?}")]
    IllegalTransition { node: usize, time: f64, from: Compartment, to: Compartment },

    #[error("metric ordering violated: {0}")]
    MetricOrdering(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{path}: {count} of {total} data lines malformed (first at line {first_line}: {first_reason})")]
    TooManyMalformed { path: String, count: usize, total: usize, first_line: u64, first_reason: String },

    #[error("seed selection: {0}")]
    SeedSelection(String),

    #[error("missing column `{0}` in report")]
    MissingColumn(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl WormError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        WormError::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WormError::Io { path: path.into(), source }
    }
}
