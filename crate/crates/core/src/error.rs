//! Error types shared across the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// The homotopy path did not terminate within the iteration budget.
    #[error("homotopy path exceeded {max_iterations} iterations (lambda reached {lambda:.3e})")]
    MaxIterationsExceeded { max_iterations: usize, lambda: f64 },

    /// The path produced a run of zero-length steps longer than any legitimate
    /// tie cluster, or an entering column was numerically dependent on the
    /// active set.
    #[error("degenerate homotopy step at lambda = {lambda:.3e}")]
    DegenerateStep { lambda: f64 },

    /// The terminal solution failed its own optimality certificate.
    #[error("KKT certification failed: violation {violation:.3e} exceeds tolerance {tolerance:.3e}")]
    KktViolation { violation: f64, tolerance: f64 },

    /// Equality-constrained solve left a residual above tolerance.
    #[error("target not representable: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotRepresentable { residual: f64, tolerance: f64 },

    /// A neighbor query asked for more neighbors than the point set can supply.
    #[error("requested {requested} neighbors but only {available} candidates exist")]
    NotEnoughNeighbors { requested: usize, available: usize },

    /// The parameter constraint 1 <= d <= n < (smallest class size) - 1 failed.
    #[error("invalid local-PCA parameters: d = {d}, n = {n} require 1 <= d <= n < {class_size} - 1")]
    ParameterConstraint { d: usize, n: usize, class_size: usize },

    /// All n+1 nearest neighbors coincide with the center sample.
    #[error("degenerate neighborhood around sample {sample} of class {class}: all neighbors coincide")]
    DegenerateNeighborhood { class: usize, sample: usize },

    /// A sample with zero Euclidean norm cannot be normalized.
    #[error("sample {index} has zero norm and cannot be normalized")]
    ZeroNormSample { index: usize },

    /// A class has too few samples for the requested split.
    #[error("class {class} has {size} samples, fewer than the required {required}")]
    ClassTooSmall { class: usize, size: usize, required: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed CSV input, with source location for diagnostics.
    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
