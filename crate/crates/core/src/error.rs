use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error")]
    Csv(#[from] csv::Error),

    #[error("empty input: no data rows")]
    EmptyInput,

    #[error("parse error at row {row}, column {column}: {value:?} is not a finite number")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("ragged input: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("unknown label column {0:?}")]
    UnknownLabelColumn(String),

    #[error("invalid label at row {row}: {value:?} (labels must be integers >= 1)")]
    InvalidLabel { row: usize, value: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cluster cap reached: c = {c} is not below exp(lambda/theta) = {cap}")]
    ClusterCapReached { c: usize, cap: f64 },

    #[error("degenerate lambda: farthest-first distance is {0}")]
    DegenerateLambda(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid color sequence at position {position}: color {color} with {clusters} existing colors")]
    InvalidColorSequence {
        position: usize,
        color: usize,
        clusters: usize,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
