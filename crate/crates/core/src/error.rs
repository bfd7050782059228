//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} is not supported for a {kind} group")]
    UnsupportedDimension { dim: usize, kind: String },

    #[error("displacement index out of range for this group")]
    IndexOutOfRange,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    #[error("character projector is not rank one: {0}")]
    DegenerateProjector(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("incomplete set: found {found} of {expected} expected states")]
    IncompleteSet { found: usize, expected: usize },

    #[error("no feasible point found within the restart budget")]
    NoFeasiblePoint,

    #[error("unknown anchor state `{0}`")]
    UnknownAnchorState(String),

    #[error("basis {0} fits no classification category")]
    UnclassifiableBasis(usize),

    #[error("subspace construction failed: {0}")]
    SubspaceConstructionFailure(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
