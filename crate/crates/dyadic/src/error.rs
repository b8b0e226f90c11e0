use thiserror::Error;

/// Errors surfaced by tree navigation, symbol calculus and the IO layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid path character {found:?}: paths are strings over '0'/'1'")]
    BadPathChar { found: char },

    #[error("path of length {len} exceeds the depth bound {depth}")]
    PathTooDeep { len: usize, depth: usize },

    #[error("depth {depth} outside supported range 1..={max}")]
    BadDepth { depth: usize, max: usize },

    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },

    #[error("duplicate entry for path {path:?}")]
    DuplicatePath { path: String },

    #[error("node {path:?} at leaf level {level} has no Haar function (need level <= depth-1)")]
    LeafHasNoHaar { path: String, level: usize },

    #[error("leaf {index} carries nonpositive value {value}; a multiplier weight must be strictly positive")]
    NonpositiveLeaf { index: usize, value: f64 },

    #[error("negative weight {value} at path {path:?}")]
    NegativeWeight { path: String, value: f64 },

    #[error("weight has no mass on a child square of {path:?}; weighted Haar basis undefined there")]
    DegenerateWeight { path: String },

    #[error("operator dimension {dim} exceeds the dense ceiling {ceiling}")]
    DenseCeiling { dim: usize, ceiling: usize },

    #[error("leaf count {len} does not match 2^depth = {expected}")]
    LeafCountMismatch { len: usize, expected: usize },

    #[error("non-finite numeric value in input")]
    NonFinite,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
