use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("graph has no edges; {0} is undefined")]
    NoEdges(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("partition does not cover node {0}")]
    MissingNode(usize),
    #[error("no distinct endpoint pair can be drawn: {0}")]
    DegenerateWeights(String),
    #[error("inconsistent parameters: {0}")]
    InconsistentParams(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
