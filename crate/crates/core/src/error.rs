//! Crate-wide error type.

use crate::falsification::Verdict;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        /// 1-based data row (0 = header).
        row: usize,
        /// 1-based column.
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series too short: need more than {lag} observations, got {len}")]
    SeriesTooShort { lag: usize, len: usize },

    #[error("series length mismatch: y has {y_len} entries, u has {u_len}")]
    SeriesLengthMismatch { y_len: usize, u_len: usize },

    #[error("hypotheses falsified by the data (worst pair {:?})", .0.witness_pair())]
    Falsified(Verdict),

    #[error("domain has zero volume: all box dimensions are degenerate")]
    DegenerateDomain,

    #[error("refusing L1/L2 norm over {dims} nondegenerate dimensions (limit 6)")]
    TooManyDimensions { dims: usize },

    #[error("evaluation grid of {points} points exceeds the {limit} point limit")]
    GridTooLarge { points: usize, limit: usize },

    #[error("spike location coincides with data node {index}")]
    SpikeAtNode { index: usize },

    #[error("constraint system is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
