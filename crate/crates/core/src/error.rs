use thiserror::Error;

/// Errors raised by the detection library.
///
/// Row and column positions are 1-based, matching every other public index.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MidError {
    #[error("input matrix is empty")]
    EmptyInput,
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("series too short: {len} time points (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("invalid interval [{s}, {e}] for a series of length {len}")]
    InvalidInterval { s: usize, e: usize, len: usize },
    #[error("split point {b} is not a valid candidate for [{s}, {e}]")]
    InvalidSplit { s: usize, e: usize, b: usize },
    #[error("interval of length {len} is too short for this scenario (need {min})")]
    IntervalTooShort { len: usize, min: usize },
    #[error("contrast input has {found} values, interval needs {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("negative entry {value} at position {index} passed to a norm")]
    NegativeEntry { index: usize, value: f64 },
    #[error("unsupported alpha {0}; expected 0.05 or 0.10")]
    UnknownAlpha(f64),
    #[error("empty range: start {s} must be below end {e}")]
    EmptyRange { s: usize, e: usize },
    #[error("expansion step must be at least 1")]
    ZeroLambda,
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("candidate {0} is out of range or not strictly increasing")]
    BadCandidate(usize),
    #[error("component {0} has zero median absolute deviation")]
    DegenerateComponent(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative count at row {row}, column {col}")]
    NegativeCount { row: usize, col: usize },
    #[error("non-integer count at row {row}, column {col}")]
    NonIntegerCount { row: usize, col: usize },
    #[error("true change-point set is empty")]
    EmptyTruth,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid signal specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, MidError>;
