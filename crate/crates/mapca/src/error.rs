//! Numeric error type shared by the linear algebra and solver modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapcaError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps; off-diagonal norm {off_diagonal:.3e} above threshold {threshold:.3e}"
    )]
    NonConvergence {
        sweeps: usize,
        off_diagonal: f64,
        threshold: f64,
    },

    #[error("matrix power exponent must be finite")]
    NonFiniteExponent,

    #[error(
        "matrix power {exponent} requires a positive definite input; eigenvalue {eigenvalue:.6e} is at or below the floor {floor:.6e}"
    )]
    SingularMetric {
        exponent: f64,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("matrix is not positive definite: smallest eigenvalue {lambda_min:.6e} at or below floor {floor:.6e}")]
    NotPositiveDefinite { lambda_min: f64, floor: f64 },

    #[error("column {index} has non-positive marginal variance {variance:.6e}")]
    DegenerateVariable { index: usize, variance: f64 },

    #[error("metric exponent must be finite")]
    NonFiniteBeta,

    #[error("{context}: dimension mismatch (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("rescaling factor at index {index} must be positive and finite, got {value}")]
    InvalidScale { index: usize, value: f64 },
}
