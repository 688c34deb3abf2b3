use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no memberships")]
    NoMemberships,

    #[error("bipartite violation: identifier {0:?} used both as a board and as a director")]
    BipartiteViolation(String),

    #[error("empty identifier in membership list")]
    EmptyIdentifier,

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),

    #[error("invalid edge {u}-{v}: {reason}")]
    InvalidEdge { u: String, v: String, reason: &'static str },

    #[error("duplicate node identifier {0:?}")]
    DuplicateNode(String),

    #[error("network needs at least {needed} nodes, found {found}")]
    TooFewNodes { needed: usize, found: usize },

    #[error("network has no edges")]
    EmptyEdgeSet,

    #[error("insufficient degree classes: need {needed}, found {found}")]
    InsufficientDegreeClasses { needed: usize, found: usize },

    #[error("closeness undefined on disconnected graph; use lcc scope")]
    ClosenessDisconnected,

    #[error("graph is disconnected ({components} components); extract the largest connected component first")]
    Disconnected { components: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("transmission probability beta*w_max = {0} exceeds 1")]
    ProbabilityBound(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pruning removed every edge")]
    EmptiedGraph,

    #[error("empty file {0}")]
    EmptyFile(PathBuf),

    #[error("{path}: row {row}: {message}")]
    MalformedRow { path: PathBuf, row: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the environment (files, config) rather than the analysis.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Csv { .. } | Error::EmptyFile(_) | Error::MalformedRow { .. } | Error::Json(_)
        )
    }
}
