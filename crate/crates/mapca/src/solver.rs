//! The metric-aware eigensolver.
//!
//! For a covariance `Σ` and positive definite metric `M`, the problem
//! `Σw = λMw` reduces through `u = M^{1/2}w` to the standard symmetric
//! eigenproblem of the effective operator `A = M^{-1/2} Σ M^{-1/2}`.
//! Loadings are recovered as `w = M^{-1/2}u`, which makes them
//! `M`-orthonormal: `WᵀMW = I`.

use crate::error::MapcaError;
use crate::mat::Mat;
use crate::metrics::{build_metric_with_floor, MetricMatrix, MetricSpec};
use crate::spectra::{
    self, decompose, degenerate_flags, SpectralDecomposition, SymmetricMatrix,
    DEFAULT_SPD_FLOOR_REL,
};

/// The whitened operator `M^{-1/2} Σ M^{-1/2}` together with its
/// decomposition. For `M = Σ^β` this operator equals `Σ^{1-β}`.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    pub a: SymmetricMatrix,
    pub decomposition: SpectralDecomposition,
}

/// Solution of the generalized eigenproblem.
///
/// `eigenvalues` are descending; column `k` of `loadings` is the component
/// vector for `eigenvalues[k]`, normalized so `WᵀMW = I`. `degenerate[k]`
/// marks components inside a near-equal eigenvalue cluster, whose
/// directions are not individually identifiable.
#[derive(Debug, Clone)]
pub struct MapcaSolution {
    pub eigenvalues: Vec<f64>,
    pub loadings: Mat,
    pub metric: MetricMatrix,
    pub condition_number: f64,
    pub variance_explained: Vec<f64>,
    pub degenerate: Vec<bool>,
}

/// Forms and decomposes the effective operator for `(sigma, metric)`.
pub fn effective_operator(
    sigma: &SymmetricMatrix,
    metric: &MetricMatrix,
) -> Result<EffectiveOperator, MapcaError> {
    if metric.dim() != sigma.dim() {
        return Err(MapcaError::DimensionMismatch {
            context: "metric",
            expected: sigma.dim(),
            actual: metric.dim(),
        });
    }
    let inv = metric.inverse_sqrt.as_mat();
    let a = SymmetricMatrix::new(inv.mul(sigma.as_mat()).mul(inv))?;
    let decomposition = decompose(&a)?;
    Ok(EffectiveOperator { a, decomposition })
}

/// Ratio of the extreme eigenvalues of a descending spectrum.
///
/// A non-positive smallest eigenvalue yields infinity rather than an error;
/// a spectrum that is flat to within the degeneracy tolerance yields
/// exactly 1.
pub fn spectrum_condition_number(eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues[0];
    let min = *eigenvalues.last().expect("dimension is at least 1");
    if min <= 0.0 {
        return f64::INFINITY;
    }
    let scale = max.abs().max(min.abs());
    if (max - min).abs() <= spectra::DEGENERACY_REL * scale {
        1.0
    } else {
        max / min
    }
}

/// Solves `Σw = λMw` for a positive semi-definite `Σ` and positive
/// definite metric.
pub fn solve_mapca(
    sigma: &SymmetricMatrix,
    metric: &MetricMatrix,
) -> Result<MapcaSolution, MapcaError> {
    let operator = effective_operator(sigma, metric)?;
    let eigenvalues = operator.decomposition.eigenvalues.clone();
    let loadings = metric
        .inverse_sqrt
        .as_mat()
        .mul(&operator.decomposition.eigenvectors);
    let degenerate = degenerate_flags(&eigenvalues);
    let condition_number = spectrum_condition_number(&eigenvalues);
    let total: f64 = eigenvalues.iter().sum();
    let variance_explained = if total > 0.0 {
        eigenvalues.iter().map(|l| l / total).collect()
    } else {
        vec![0.0; eigenvalues.len()]
    };
    Ok(MapcaSolution {
        eigenvalues,
        loadings,
        metric: metric.clone(),
        condition_number,
        variance_explained,
        degenerate,
    })
}

/// One β grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub beta: f64,
    pub kappa: f64,
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Solves with `M = Σ^β` for each grid point, preserving input order.
pub fn beta_sweep_with_floor(
    sigma: &SymmetricMatrix,
    betas: &[f64],
    floor_rel: f64,
) -> Result<Vec<SweepEntry>, MapcaError> {
    betas
        .iter()
        .map(|&beta| {
            let metric = build_metric_with_floor(sigma, &MetricSpec::BetaPower(beta), floor_rel)?;
            let warnings = metric.warnings.clone();
            let solution = solve_mapca(sigma, &metric)?;
            Ok(SweepEntry {
                beta,
                kappa: solution.condition_number,
                eigenvalues: solution.eigenvalues,
                warnings,
            })
        })
        .collect()
}

/// [`beta_sweep_with_floor`] at the default floor.
pub fn beta_sweep(sigma: &SymmetricMatrix, betas: &[f64]) -> Result<Vec<SweepEntry>, MapcaError> {
    beta_sweep_with_floor(sigma, betas, DEFAULT_SPD_FLOOR_REL)
}

/// Projects centered data rows onto the leading `k` components.
pub fn project(data: &Mat, solution: &MapcaSolution, k: usize) -> Result<Mat, MapcaError> {
    let p = solution.loadings.rows();
    if data.cols() != p {
        return Err(MapcaError::DimensionMismatch {
            context: "projection data",
            expected: p,
            actual: data.cols(),
        });
    }
    if k > p {
        return Err(MapcaError::DimensionMismatch {
            context: "projection depth",
            expected: p,
            actual: k,
        });
    }
    let mut scores = Mat::zeros(data.rows(), k);
    for i in 0..data.rows() {
        for c in 0..k {
            let mut acc = 0.0;
            for j in 0..p {
                acc += data.get(i, j) * solution.loadings.get(j, c);
            }
            scores.set(i, c, acc);
        }
    }
    Ok(scores)
}
