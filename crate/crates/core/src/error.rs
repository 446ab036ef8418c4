use thiserror::Error;

/// Errors raised by graph construction, operator application and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node id out of range in pair ({from}, {to}): graph has {node_count} nodes")]
    NodeOutOfRange {
        from: usize,
        to: usize,
        node_count: usize,
    },

    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge ({from}, {to})")]
    DuplicateEdge { from: usize, to: usize },

    #[error("invalid generator size: {0}")]
    InvalidSize(String),

    #[error("node set must not be empty")]
    EmptyNodeSet,

    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("more than {cap} minimal paths between the requested nodes")]
    TooManyPaths { cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation requires an undirected graph")]
    RequiresUndirected,

    #[error("operator is not self-adjoint (adjointness defect {0:e})")]
    NotSelfAdjoint(f64),

    #[error("graph has {nodes} nodes, limit for this operation is {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("graph family is not nested at level {0}")]
    NotNested(usize),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
