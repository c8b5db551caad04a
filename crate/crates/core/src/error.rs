use std::io;

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("2-cell {cell}: boundary walk is not closed ({detail})")]
    OpenPath { cell: usize, detail: String },

    #[error("2-cell {cell}: boundary walk revisits {what}")]
    SelfIntersecting { cell: usize, what: String },

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },

    #[error("edge {edge} duplicates edge {original} (nodes {a}, {b})")]
    DuplicateEdge { edge: usize, original: usize, a: usize, b: usize },

    #[error("2-cell {cell}: boundary has length {len}, minimum is {min}")]
    ShortBoundary { cell: usize, len: usize, min: usize },

    #[error("boundary of boundary is nonzero at ({row}, {col})")]
    BoundaryNotExact { row: usize, col: usize },

    #[error("rotation system incomplete: {0}")]
    IncompleteRotation(String),

    #[error("face traversal is not planar: {0}")]
    NonPlanarTraversal(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),

    #[error("integer overflow during exact rank computation")]
    RankOverflow,

    #[error("operator {kind} is incompatible with this complex: {reason}")]
    IncompatibleKind { kind: String, reason: String },

    #[error("random walk from node {start} failed to reach a sink after {restarts} restarts")]
    WalkFailed { start: usize, restarts: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
