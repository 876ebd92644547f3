//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by estimation, selection, simulation, and ingestion.
#[derive(Debug, Error)]
pub enum CoatError {
    /// A composition entry was zero or negative.
    #[error("non-positive entry {value} at sample {row}, taxon {col}: compositions must be strictly positive")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    /// A composition row does not sum to one.
    #[error("sample {row} sums to {sum}, expected 1 within tolerance")]
    RowSumInvalid { row: usize, sum: f64 },

    /// A matrix expected to be symmetric is not.
    #[error("matrix not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {delta}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },

    /// Mismatched or unsupported dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameter or configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed cell in an input table.
    #[error("parse error at line {line}, column {col}: {reason}")]
    Parse {
        line: usize,
        col: usize,
        reason: String,
    },

    /// Structurally invalid input data.
    #[error("data error: {0}")]
    Data(String),

    /// The Jacobi eigenvalue iteration failed to converge.
    #[error("symmetric eigenvalue iteration did not converge")]
    EigenNoConverge,

    /// Filesystem failure while reading input.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoatError>;
