use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("weight out of range: {0} is not in [0, 1]")]
    WeightOutOfRange(f64),

    #[error("weight list has {got} entries but the topology has {expected} links")]
    WeightCountMismatch { expected: usize, got: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("node {node} out of range for a network of {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("source and target are the same node ({0})")]
    SameEndpoints(usize),

    #[error("brute-force enumeration limited to {cap} nodes, network has {node_count}")]
    CapExceeded { cap: usize, node_count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Whether the error reflects an invalid graph (as opposed to bad arguments or I/O).
    pub fn is_graph_validation(&self) -> bool {
        if let Error::AtLine { source, .. } = self {
            return source.is_graph_validation();
        }
        matches!(
            self,
            Error::Disconnected
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(..)
                | Error::WeightOutOfRange(_)
                | Error::NodeOutOfRange { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
