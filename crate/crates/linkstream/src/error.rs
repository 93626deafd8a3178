use thiserror::Error;

/// Errors produced by link-stream construction, analysis and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid relation space: {0}")]
    InvalidSpace(String),

    #[error("invalid event set: {0}")]
    InvalidEvents(String),

    #[error("weight matrix shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },

    #[error("non-finite weight at sample {sample}, relation {relation}")]
    NonFiniteWeight { sample: usize, relation: usize },

    #[error("operands live on different domains: {0}")]
    DomainMismatch(String),

    #[error("stream is not symmetric across direction pairs: {0}")]
    AsymmetricStream(String),

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("unknown relation ({0:?}, {1:?})")]
    UnknownRelation(String, String),

    #[error("invalid cluster: {0}")]
    InvalidCluster(String),

    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),

    #[error("vector length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("time shift of {steps} samples exceeds the grid of {max} samples")]
    ShiftOutOfRange { steps: i64, max: usize },

    #[error("impulse response of length {len} exceeds the grid of {max} samples")]
    FilterTooLong { len: usize, max: usize },

    #[error("gain table does not match the basis: {0}")]
    GainMismatch(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
