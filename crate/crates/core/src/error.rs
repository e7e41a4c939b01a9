use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length error: {0}")]
    Length(String),

    #[error("integration diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("degenerate network: all {symbols} symbols are the same permutation")]
    DegenerateNetwork { symbols: usize },

    #[error("graph is disconnected into {} components: {components:?}", components.len())]
    Disconnected { components: Vec<Vec<usize>> },

    #[error("invalid edge weight {weight} on edge ({u}, {v})")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("vertex {0} has no incident edges, transition row is zero")]
    ZeroRow(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown system `{name}`; registry contains: {}", available.join(", "))]
    NotFound { name: String, available: Vec<String> },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("{n} vertices exceeds the configured cap of {cap}")]
    Size { n: usize, cap: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("label error: {0}")]
    Label(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("diagram pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
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
