//! Metric-aware principal component analysis.
//!
//! Classical PCA maximizes `tr(WᵀΣW)` under the Euclidean constraint
//! `WᵀW = I`. This crate solves the metric-aware generalization
//!
//! ```text
//! maximize tr(WᵀΣW)   subject to   WᵀMW = I
//! ```
//!
//! for an arbitrary symmetric positive definite metric `M`, which is the
//! generalized eigenproblem `Σw = λMw`. Supported metrics include the
//! identity (classical PCA), the diagonal of `Σ` (the scale-invariant
//! variant), the power family `M = Σ^β`, the inverse covariance, and
//! arbitrary explicit matrices.
//!
//! Modules:
//! - [`spectra`]: symmetric eigendecomposition, matrix powers, SPD checks
//! - [`metrics`]: metric construction and the correlation matrix
//! - [`solver`]: the generalized eigensolver, condition numbers, β sweeps
//! - [`invariance`]: behaviour under per-variable rescaling of the data
//! - [`ssl`]: implicit metrics of common self-supervised learning objectives
//! - [`data`]: CSV ingestion and covariance estimation

pub mod data;
pub mod error;
pub mod invariance;
pub mod mat;
pub mod metrics;
pub mod solver;
pub mod spectra;
pub mod ssl;

pub use error::MapcaError;
pub use mat::Mat;
pub use metrics::{MetricMatrix, MetricSpec};
pub use solver::MapcaSolution;
pub use spectra::{SpectralDecomposition, SymmetricMatrix};
