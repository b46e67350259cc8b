//! Construction of the positive definite metrics that drive the solver.
//!
//! Every metric is derived from (or validated against) a covariance matrix
//! `Σ` and carries its own inverse square root, which is all the solver
//! needs to reduce the generalized eigenproblem to a standard one.

use std::str::FromStr;

use crate::error::MapcaError;
use crate::mat::Mat;
use crate::spectra::{
    assert_spd_relative, matrix_power_with_floor, SymmetricMatrix, DEFAULT_SPD_FLOOR_REL,
};

/// Recipe for building a metric from a covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    /// `M = I`: classical PCA.
    Identity,
    /// `M = diag(Σ)`: the invariant variant, one weight per variable.
    Diagonal,
    /// `M = Σ^β`: interpolates between `Identity` (β = 0) and full
    /// whitening (β = 1); values outside `[0, 1]` are allowed but flagged.
    BetaPower(f64),
    /// `M = Σ⁻¹`: the β = -1 member, which amplifies spread instead of
    /// compressing it.
    InverseCovariance,
    /// A caller-supplied positive definite matrix.
    Explicit(SymmetricMatrix),
}

impl MetricSpec {
    /// Position on the power-family axis, when the metric has one.
    pub fn beta(&self) -> Option<f64> {
        match self {
            MetricSpec::Identity => Some(0.0),
            MetricSpec::BetaPower(beta) => Some(*beta),
            MetricSpec::InverseCovariance => Some(-1.0),
            MetricSpec::Diagonal | MetricSpec::Explicit(_) => None,
        }
    }

    /// Short label used in tables and reports.
    pub fn label(&self) -> String {
        match self {
            MetricSpec::Identity => "identity".to_string(),
            MetricSpec::Diagonal => "diagonal".to_string(),
            MetricSpec::BetaPower(beta) => format!("beta:{beta}"),
            MetricSpec::InverseCovariance => "invcov".to_string(),
            MetricSpec::Explicit(_) => "explicit".to_string(),
        }
    }
}

/// A built metric: the matrix itself, its inverse square root, and the
/// recipe it came from. `inverse_sqrt · m · inverse_sqrt` is the identity
/// to working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    pub m: SymmetricMatrix,
    pub inverse_sqrt: SymmetricMatrix,
    pub spec: MetricSpec,
    pub warnings: Vec<String>,
}

impl MetricMatrix {
    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// Builds the metric for `spec` from `sigma`, with the positive
/// definiteness floor taken relative to the largest eigenvalue.
pub fn build_metric_with_floor(
    sigma: &SymmetricMatrix,
    spec: &MetricSpec,
    floor_rel: f64,
) -> Result<MetricMatrix, MapcaError> {
    let p = sigma.dim();
    let mut warnings = Vec::new();
    let m = match spec {
        MetricSpec::Identity => SymmetricMatrix::identity(p),
        MetricSpec::Diagonal => {
            let mut diagonal = Vec::with_capacity(p);
            for i in 0..p {
                let variance = sigma.get(i, i);
                if variance <= 0.0 {
                    return Err(MapcaError::DegenerateVariable { index: i, variance });
                }
                diagonal.push(variance);
            }
            SymmetricMatrix::from_diagonal(&diagonal)
        }
        MetricSpec::BetaPower(beta) => {
            if !beta.is_finite() {
                return Err(MapcaError::NonFiniteBeta);
            }
            if !(0.0..=1.0).contains(beta) {
                warnings.push(format!(
                    "beta = {beta} lies outside [0, 1]; spectral compression guarantees do not apply"
                ));
            }
            matrix_power_with_floor(sigma, *beta, floor_rel)?
        }
        MetricSpec::InverseCovariance => matrix_power_with_floor(sigma, -1.0, floor_rel)?,
        MetricSpec::Explicit(matrix) => {
            if matrix.dim() != p {
                return Err(MapcaError::DimensionMismatch {
                    context: "explicit metric",
                    expected: p,
                    actual: matrix.dim(),
                });
            }
            assert_spd_relative(matrix, floor_rel)?;
            matrix.clone()
        }
    };
    let inverse_sqrt = matrix_power_with_floor(&m, -0.5, floor_rel)?;
    Ok(MetricMatrix {
        m,
        inverse_sqrt,
        spec: spec.clone(),
        warnings,
    })
}

/// [`build_metric_with_floor`] at the default floor.
pub fn build_metric(sigma: &SymmetricMatrix, spec: &MetricSpec) -> Result<MetricMatrix, MapcaError> {
    build_metric_with_floor(sigma, spec, DEFAULT_SPD_FLOOR_REL)
}

/// `R = D^{-1/2} Σ D^{-1/2}` with `D = diag(Σ)`: unit diagonal, entries
/// bounded by 1 in magnitude for any true covariance input.
pub fn correlation_matrix(sigma: &SymmetricMatrix) -> Result<SymmetricMatrix, MapcaError> {
    let p = sigma.dim();
    let mut inv_std = Vec::with_capacity(p);
    for i in 0..p {
        let variance = sigma.get(i, i);
        if variance <= 0.0 {
            return Err(MapcaError::DegenerateVariable { index: i, variance });
        }
        inv_std.push(1.0 / variance.sqrt());
    }
    let mut r = Mat::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let value = if i == j {
                1.0
            } else {
                sigma.get(i, j) * (inv_std[i] * inv_std[j])
            };
            r.set(i, j, value);
        }
    }
    SymmetricMatrix::new(r)
}

/// A metric string as accepted on the command line. `explicit:<path>`
/// defers the file load to the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedMetric {
    Spec(MetricSpec),
    ExplicitPath(String),
}

impl FromStr for ParsedMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "identity" => return Ok(ParsedMetric::Spec(MetricSpec::Identity)),
            "diagonal" => return Ok(ParsedMetric::Spec(MetricSpec::Diagonal)),
            "invcov" => return Ok(ParsedMetric::Spec(MetricSpec::InverseCovariance)),
            _ => {}
        }
        if let Some(raw) = s.strip_prefix("beta:") {
            let beta: f64 = raw
                .trim()
                .parse()
                .map_err(|_| format!("invalid beta value {raw:?}"))?;
            if !beta.is_finite() {
                return Err(format!("beta must be finite, got {raw:?}"));
            }
            return Ok(ParsedMetric::Spec(MetricSpec::BetaPower(beta)));
        }
        if let Some(path) = s.strip_prefix("explicit:") {
            if path.is_empty() {
                return Err("explicit metric needs a file path".to_string());
            }
            return Ok(ParsedMetric::ExplicitPath(path.to_string()));
        }
        Err(format!(
            "unknown metric {s:?}; expected identity, diagonal, beta:<float>, invcov, or explicit:<path>"
        ))
    }
}
