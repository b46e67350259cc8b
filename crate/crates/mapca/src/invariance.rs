//! Behaviour of solutions under per-variable rescaling of the data.
//!
//! Rescaling the variables by a positive diagonal `C` turns `Σ` into
//! `CΣC`. A metric family is scale invariant exactly when the rebuilt
//! metric satisfies `M̃ = CMC`; then eigenvalues are unchanged and loadings
//! transform as `w̃ᵢ = C⁻¹wᵢ`. The diagonal metric satisfies the condition
//! for every `C`; the power family `Σ^β` with `0 < β < 1` does not, unless
//! `C` is a multiple of the identity, in which case eigenvalues scale by
//! the uniform factor `c^{2(1-β)}` while directions are preserved.

use std::fmt;
use std::str::FromStr;

use crate::error::MapcaError;
use crate::mat::Mat;
use crate::metrics::{build_metric_with_floor, MetricSpec};
use crate::solver::{solve_mapca, MapcaSolution};
use crate::spectra::{SymmetricMatrix, DEFAULT_SPD_FLOOR_REL};

/// Tolerance for the strict-invariance verdict, relative.
pub const STRICT_TOL: f64 = 1e-8;

/// Tolerance on `1 - |cos|` for direction comparisons.
pub const DIRECTION_TOL: f64 = 1e-8;

/// Relative tolerance for the metric transformation condition `M̃ = CMC`.
pub const CONDITION_TOL_REL: f64 = 1e-9;

/// Uniformity test threshold on `max(c)/min(c) - 1`.
pub const UNIFORMITY_TOL: f64 = 1e-12;

/// Guard fraction of the leading eigenvalue used in relative deviations.
const EIGENVALUE_GUARD_REL: f64 = 1e-12;

/// A positive per-variable scaling `C = diag(c₁, …, c_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaling {
    scales: Vec<f64>,
}

impl Rescaling {
    pub fn new(scales: Vec<f64>) -> Result<Self, MapcaError> {
        for (index, &value) in scales.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(MapcaError::InvalidScale { index, value });
            }
        }
        if scales.is_empty() {
            return Err(MapcaError::EmptyMatrix);
        }
        Ok(Rescaling { scales })
    }

    pub fn uniform(dim: usize, scale: f64) -> Result<Self, MapcaError> {
        Rescaling::new(vec![scale; dim])
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Entrywise reciprocal, the loading transformation `C⁻¹`.
    pub fn inverse(&self) -> Vec<f64> {
        self.scales.iter().map(|c| 1.0 / c).collect()
    }

    /// Largest over smallest scale.
    pub fn ratio(&self) -> f64 {
        let max = self.scales.iter().fold(f64::MIN, |m, &c| m.max(c));
        let min = self.scales.iter().fold(f64::MAX, |m, &c| m.min(c));
        max / min
    }

    pub fn is_uniform(&self) -> bool {
        self.ratio() - 1.0 <= UNIFORMITY_TOL
    }
}

/// `Σ̃ᵢⱼ = cᵢ cⱼ Σᵢⱼ`, the covariance of the rescaled data.
pub fn rescale_covariance(
    sigma: &SymmetricMatrix,
    c: &Rescaling,
) -> Result<SymmetricMatrix, MapcaError> {
    let p = sigma.dim();
    if c.len() != p {
        return Err(MapcaError::DimensionMismatch {
            context: "rescaling",
            expected: p,
            actual: c.len(),
        });
    }
    let s = c.scales();
    let mut out = Mat::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            out.set(i, j, (s[i] * s[j]) * sigma.get(i, j));
        }
    }
    SymmetricMatrix::new(out)
}

/// Conjugation of a metric by the scaling diagonal, computed with the same
/// association order as [`rescale_covariance`] so that metrics which are
/// exactly equivariant compare bit for bit.
fn conjugate_by_scales(m: &SymmetricMatrix, c: &Rescaling) -> Mat {
    let p = m.dim();
    let s = c.scales();
    let mut out = Mat::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            out.set(i, j, (s[i] * s[j]) * m.get(i, j));
        }
    }
    out
}

/// Result of testing the transformation condition `M̃ = CMC`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricConditionCheck {
    pub holds: bool,
    pub residual: f64,
    pub reference: f64,
}

fn metric_condition(
    m: &SymmetricMatrix,
    m_rescaled: &SymmetricMatrix,
    c: &Rescaling,
) -> MetricConditionCheck {
    let cmc = conjugate_by_scales(m, c);
    let residual = m_rescaled.as_mat().max_abs_diff(&cmc);
    let reference = cmc.max_abs();
    MetricConditionCheck {
        holds: residual <= CONDITION_TOL_REL * reference,
        residual,
        reference,
    }
}

/// Builds the metric on both sides of the rescaling and tests `M̃ = CMC`.
pub fn check_metric_condition_with_floor(
    sigma: &SymmetricMatrix,
    spec: &MetricSpec,
    c: &Rescaling,
    floor_rel: f64,
) -> Result<MetricConditionCheck, MapcaError> {
    let rescaled = rescale_covariance(sigma, c)?;
    let base = build_metric_with_floor(sigma, spec, floor_rel)?;
    let tilde = build_metric_with_floor(&rescaled, spec, floor_rel)?;
    Ok(metric_condition(&base.m, &tilde.m, c))
}

/// [`check_metric_condition_with_floor`] at the default floor.
pub fn check_metric_condition(
    sigma: &SymmetricMatrix,
    spec: &MetricSpec,
    c: &Rescaling,
) -> Result<MetricConditionCheck, MapcaError> {
    check_metric_condition_with_floor(sigma, spec, c, DEFAULT_SPD_FLOOR_REL)
}

/// Outcome of an invariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Eigenvalues match and loadings transform as `C⁻¹wᵢ` to strict
    /// tolerance.
    StrictInvariant,
    /// Component directions are preserved but eigenvalues or loading
    /// magnitudes drift, as under uniform rescaling of the power family.
    DirectionInvariant,
    /// The solution genuinely depends on the units of the variables.
    NotInvariant,
    /// Every component sits in one eigenvalue cluster; directions carry no
    /// information so invariance is vacuous.
    Degenerate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::StrictInvariant => "StrictInvariant",
            Verdict::DirectionInvariant => "DirectionInvariant",
            Verdict::NotInvariant => "NotInvariant",
            Verdict::Degenerate => "Degenerate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "strict-invariant" | "StrictInvariant" => Ok(Verdict::StrictInvariant),
            "direction-invariant" | "DirectionInvariant" => Ok(Verdict::DirectionInvariant),
            "not-invariant" | "NotInvariant" => Ok(Verdict::NotInvariant),
            "degenerate" | "Degenerate" => Ok(Verdict::Degenerate),
            other => Err(format!(
                "unknown verdict {other:?}; expected strict-invariant, direction-invariant, not-invariant, or degenerate"
            )),
        }
    }
}

/// Full comparison of the solutions before and after rescaling.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub metric_spec: MetricSpec,
    pub rescaling: Rescaling,
    pub eigenvalues_original: Vec<f64>,
    pub eigenvalues_rescaled: Vec<f64>,
    /// max over components of the relative eigenvalue deviation.
    pub eigenvalue_dev: f64,
    /// max over identifiable components of the relative distance between
    /// `w̃ᵢ` (sign aligned) and `C⁻¹wᵢ`; NaN when no component qualifies.
    pub loading_dev: f64,
    pub condition_holds: bool,
    pub condition_residual: f64,
    /// Entrywise `w̃₁ / w₁` after sign alignment, absent when the leading
    /// component is degenerate.
    pub pc1_ratio: Option<Vec<f64>>,
    pub verdict: Verdict,
    /// Components excluded from the loading comparison for degeneracy.
    pub skipped_components: Vec<usize>,
}

fn relative_eigenvalue_dev(original: &[f64], rescaled: &[f64]) -> f64 {
    let guard = EIGENVALUE_GUARD_REL * original[0];
    original
        .iter()
        .zip(rescaled)
        .fold(0.0_f64, |worst, (&l, &lt)| {
            worst.max((lt - l).abs() / l.max(guard))
        })
}

struct LoadingComparison {
    max_dev: f64,
    min_cos: f64,
    compared_any: bool,
}

/// Compares column `i` of each loading matrix against the prediction
/// `C⁻¹wᵢ`, choosing the sign of `w̃ᵢ` that minimizes the distance.
fn compare_loadings(
    base: &MapcaSolution,
    rescaled: &MapcaSolution,
    inv_scales: &[f64],
    skip: &[bool],
) -> LoadingComparison {
    let mut max_dev = 0.0_f64;
    let mut min_cos = 1.0_f64;
    let mut compared_any = false;
    for (i, &skip_component) in skip.iter().enumerate() {
        if skip_component {
            continue;
        }
        let mut dot = 0.0;
        let mut norm_actual = 0.0;
        let mut norm_expected = 0.0;
        for (j, &inv_scale) in inv_scales.iter().enumerate() {
            let expected = base.loadings.get(j, i) * inv_scale;
            let actual = rescaled.loadings.get(j, i);
            dot += actual * expected;
            norm_actual += actual * actual;
            norm_expected += expected * expected;
        }
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        let mut diff = 0.0;
        for (j, &inv_scale) in inv_scales.iter().enumerate() {
            let expected = base.loadings.get(j, i) * inv_scale;
            let actual = sign * rescaled.loadings.get(j, i);
            diff += (actual - expected) * (actual - expected);
        }
        let dev = diff.sqrt() / norm_expected.sqrt();
        let cos = dot.abs() / (norm_actual.sqrt() * norm_expected.sqrt());
        max_dev = max_dev.max(dev);
        min_cos = min_cos.min(cos);
        compared_any = true;
    }
    LoadingComparison {
        max_dev,
        min_cos,
        compared_any,
    }
}

/// Solves on both sides of the rescaling and classifies the outcome.
pub fn verify_invariance_with_floor(
    sigma: &SymmetricMatrix,
    spec: &MetricSpec,
    c: &Rescaling,
    floor_rel: f64,
) -> Result<InvarianceReport, MapcaError> {
    let rescaled_sigma = rescale_covariance(sigma, c)?;
    let base_metric = build_metric_with_floor(sigma, spec, floor_rel)?;
    let tilde_metric = build_metric_with_floor(&rescaled_sigma, spec, floor_rel)?;
    let base = solve_mapca(sigma, &base_metric)?;
    let rescaled = solve_mapca(&rescaled_sigma, &tilde_metric)?;
    let condition = metric_condition(&base_metric.m, &tilde_metric.m, c);

    let p = sigma.dim();
    let eigenvalue_dev = relative_eigenvalue_dev(&base.eigenvalues, &rescaled.eigenvalues);

    // a component is comparable only when identifiable on both sides
    let skip: Vec<bool> = (0..p)
        .map(|i| base.degenerate[i] || rescaled.degenerate[i])
        .collect();
    let skipped_components: Vec<usize> = (0..p).filter(|&i| skip[i]).collect();
    let inv_scales = c.inverse();
    let comparison = compare_loadings(&base, &rescaled, &inv_scales, &skip);
    let loading_dev = if comparison.compared_any {
        comparison.max_dev
    } else {
        f64::NAN
    };

    let pc1_ratio = if skip[0] {
        None
    } else {
        let mut dot = 0.0;
        for (j, &inv_scale) in inv_scales.iter().enumerate() {
            dot += rescaled.loadings.get(j, 0) * base.loadings.get(j, 0) * inv_scale;
        }
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        Some(
            (0..p)
                .map(|j| sign * rescaled.loadings.get(j, 0) / base.loadings.get(j, 0))
                .collect(),
        )
    };

    let verdict = if !comparison.compared_any {
        Verdict::Degenerate
    } else if eigenvalue_dev <= STRICT_TOL && loading_dev <= STRICT_TOL {
        Verdict::StrictInvariant
    } else if comparison.min_cos >= 1.0 - DIRECTION_TOL {
        Verdict::DirectionInvariant
    } else {
        Verdict::NotInvariant
    };

    Ok(InvarianceReport {
        metric_spec: spec.clone(),
        rescaling: c.clone(),
        eigenvalues_original: base.eigenvalues,
        eigenvalues_rescaled: rescaled.eigenvalues,
        eigenvalue_dev,
        loading_dev,
        condition_holds: condition.holds,
        condition_residual: condition.residual,
        pc1_ratio,
        verdict,
        skipped_components,
    })
}

/// [`verify_invariance_with_floor`] at the default floor.
pub fn verify_invariance(
    sigma: &SymmetricMatrix,
    spec: &MetricSpec,
    c: &Rescaling,
) -> Result<InvarianceReport, MapcaError> {
    verify_invariance_with_floor(sigma, spec, c, DEFAULT_SPD_FLOOR_REL)
}

/// Behaviour of the power family under a uniform scaling `C = cI`.
#[derive(Debug, Clone)]
pub struct UniformEquivarianceReport {
    pub beta: f64,
    pub scale: f64,
    /// The predicted eigenvalue factor `c^{2(1-β)}`.
    pub predicted_factor: f64,
    /// max relative deviation from `λ̃ᵢ = c^{2(1-β)} λᵢ`.
    pub max_eigenvalue_dev: f64,
    /// max of `1 - |cos|` between `w̃ᵢ` and `wᵢ` over identifiable
    /// components.
    pub max_direction_dev: f64,
    pub holds: bool,
    pub skipped_components: Vec<usize>,
}

/// Checks the uniform-rescaling law `λ̃ᵢ = c^{2(1-β)} λᵢ` with preserved
/// directions for the metric `Σ^β`.
pub fn verify_uniform_equivariance(
    sigma: &SymmetricMatrix,
    beta: f64,
    scale: f64,
) -> Result<UniformEquivarianceReport, MapcaError> {
    let p = sigma.dim();
    let c = Rescaling::uniform(p, scale)?;
    let spec = MetricSpec::BetaPower(beta);
    let rescaled_sigma = rescale_covariance(sigma, &c)?;
    let base_metric = build_metric_with_floor(sigma, &spec, DEFAULT_SPD_FLOOR_REL)?;
    let tilde_metric = build_metric_with_floor(&rescaled_sigma, &spec, DEFAULT_SPD_FLOOR_REL)?;
    let base = solve_mapca(sigma, &base_metric)?;
    let rescaled = solve_mapca(&rescaled_sigma, &tilde_metric)?;

    let predicted_factor = scale.powf(2.0 * (1.0 - beta));
    let guard = EIGENVALUE_GUARD_REL * predicted_factor * base.eigenvalues[0];
    let max_eigenvalue_dev = base
        .eigenvalues
        .iter()
        .zip(&rescaled.eigenvalues)
        .fold(0.0_f64, |worst, (&l, &lt)| {
            let predicted = predicted_factor * l;
            worst.max((lt - predicted).abs() / predicted.max(guard))
        });

    let skip: Vec<bool> = (0..p)
        .map(|i| base.degenerate[i] || rescaled.degenerate[i])
        .collect();
    let skipped_components: Vec<usize> = (0..p).filter(|&i| skip[i]).collect();
    let mut max_direction_dev = 0.0_f64;
    for (i, &skip_component) in skip.iter().enumerate() {
        if skip_component {
            continue;
        }
        let mut dot = 0.0;
        let mut norm_base = 0.0;
        let mut norm_rescaled = 0.0;
        for j in 0..p {
            let b = base.loadings.get(j, i);
            let r = rescaled.loadings.get(j, i);
            dot += b * r;
            norm_base += b * b;
            norm_rescaled += r * r;
        }
        let cos = dot.abs() / (norm_base.sqrt() * norm_rescaled.sqrt());
        max_direction_dev = max_direction_dev.max(1.0 - cos);
    }

    let holds = max_eigenvalue_dev <= STRICT_TOL && max_direction_dev <= DIRECTION_TOL;
    Ok(UniformEquivarianceReport {
        beta,
        scale,
        predicted_factor,
        max_eigenvalue_dev,
        max_direction_dev,
        holds,
        skipped_components,
    })
}

/// One row of the standard metric comparison.
#[derive(Debug, Clone)]
pub struct HierarchyEntry {
    pub spec: MetricSpec,
    pub report: InvarianceReport,
}

/// Runs the invariance check across the reference metrics: identity,
/// diagonal, `Σ^{1/2}`, and `Σ` (full whitening).
pub fn hierarchy_report_with_floor(
    sigma: &SymmetricMatrix,
    c: &Rescaling,
    floor_rel: f64,
) -> Result<Vec<HierarchyEntry>, MapcaError> {
    [
        MetricSpec::Identity,
        MetricSpec::Diagonal,
        MetricSpec::BetaPower(0.5),
        MetricSpec::BetaPower(1.0),
    ]
    .into_iter()
    .map(|spec| {
        let report = verify_invariance_with_floor(sigma, &spec, c, floor_rel)?;
        Ok(HierarchyEntry { spec, report })
    })
    .collect()
}

/// [`hierarchy_report_with_floor`] at the default floor.
pub fn hierarchy_report(
    sigma: &SymmetricMatrix,
    c: &Rescaling,
) -> Result<Vec<HierarchyEntry>, MapcaError> {
    hierarchy_report_with_floor(sigma, c, DEFAULT_SPD_FLOOR_REL)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        SymmetricMatrix::new(Mat::from_rows(&rows)).expect("valid test matrix")
    }

    #[test]
    fn rescaling_validation() {
        assert!(Rescaling::new(vec![1.0, 2.0]).is_ok());
        assert!(matches!(
            Rescaling::new(vec![1.0, 0.0]),
            Err(MapcaError::InvalidScale { index: 1, .. })
        ));
        assert!(matches!(
            Rescaling::new(vec![-2.0]),
            Err(MapcaError::InvalidScale { index: 0, .. })
        ));
        assert!(Rescaling::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Rescaling::new(vec![]).is_err());
    }

    #[test]
    fn uniformity_detection() {
        assert!(Rescaling::new(vec![2.0, 2.0, 2.0]).unwrap().is_uniform());
        assert!(!Rescaling::new(vec![2.0, 1.0]).unwrap().is_uniform());
        assert!(Rescaling::uniform(3, 0.5).unwrap().is_uniform());
    }

    #[test]
    fn rescale_covariance_closed_form() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let rescaled = rescale_covariance(&sigma, &c).unwrap();
        assert_eq!(rescaled.get(0, 0), 16.0);
        assert_eq!(rescaled.get(0, 1), 4.0);
        assert_eq!(rescaled.get(1, 1), 4.0);
        // identity scaling is a no-op
        let same = rescale_covariance(&sigma, &Rescaling::uniform(2, 1.0).unwrap()).unwrap();
        assert_eq!(same.as_mat(), sigma.as_mat());
    }

    #[test]
    fn rescale_covariance_checks_length() {
        let sigma = SymmetricMatrix::identity(2);
        let c = Rescaling::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            rescale_covariance(&sigma, &c),
            Err(MapcaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_condition_is_exact() {
        let sigma = sym(&[&[3.0, 0.8, -0.4], &[0.8, 2.0, 0.3], &[-0.4, 0.3, 1.5]]);
        let c = Rescaling::new(vec![0.3, 2.5, 1.1]).unwrap();
        let check = check_metric_condition(&sigma, &MetricSpec::Diagonal, &c).unwrap();
        assert!(check.holds);
        assert_eq!(check.residual, 0.0, "diagonal equivariance is exact");
    }

    #[test]
    fn whitening_condition_holds() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let check = check_metric_condition(&sigma, &MetricSpec::BetaPower(1.0), &c).unwrap();
        assert!(check.holds, "beta = 1 satisfies the condition for every C");
    }

    #[test]
    fn fractional_power_condition_fails() {
        // (CΣC)^{1/2} and C Σ^{1/2} C differ once C is non-uniform
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let check = check_metric_condition(&sigma, &MetricSpec::BetaPower(0.5), &c).unwrap();
        assert!(!check.holds);
        assert!(
            check.residual > 1e-3 * check.reference,
            "violation must be far beyond rounding, got {}",
            check.residual
        );
    }

    #[test]
    fn identity_condition_fails_for_nonuniform_scales() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let check = check_metric_condition(&sigma, &MetricSpec::Identity, &c).unwrap();
        assert!(!check.holds, "I != CIC when C is not uniform");
    }

    #[test]
    fn diagonal_metric_is_strictly_invariant_closed_form() {
        // Σ = [[4, 2], [2, 4]], C = diag(2, 1): both sides share the
        // correlation spectrum (1.5, 0.5) and w̃₁ = C⁻¹w₁.
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let report = verify_invariance(&sigma, &MetricSpec::Diagonal, &c).unwrap();
        assert_eq!(report.verdict, Verdict::StrictInvariant);
        assert!(report.eigenvalue_dev <= EPS);
        assert!(report.loading_dev <= 1e-10);
        assert!(report.condition_holds);
        assert!((report.eigenvalues_original[0] - 1.5).abs() <= EPS);
        assert!((report.eigenvalues_rescaled[0] - 1.5).abs() <= EPS);
        let ratio = report.pc1_ratio.expect("leading component is identifiable");
        assert!((ratio[0] - 0.5).abs() <= 1e-9, "w̃₁/w₁ must equal 1/c");
        assert!((ratio[1] - 1.0).abs() <= 1e-9);
        assert!(report.skipped_components.is_empty());
    }

    #[test]
    fn standard_pca_is_not_invariant() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![3.0, 1.0]).unwrap();
        let report = verify_invariance(&sigma, &MetricSpec::Identity, &c).unwrap();
        assert_eq!(report.verdict, Verdict::NotInvariant);
        assert!(report.eigenvalue_dev > 1e-3);
        assert!(!report.condition_holds);
    }

    #[test]
    fn whitening_is_degenerate() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let report = verify_invariance(&sigma, &MetricSpec::BetaPower(1.0), &c).unwrap();
        assert_eq!(report.verdict, Verdict::Degenerate);
        assert!(report.loading_dev.is_nan());
        assert_eq!(report.skipped_components, vec![0, 1]);
        assert!(report.pc1_ratio.is_none());
        // the eigenvalues themselves still agree: all are 1
        assert!(report.eigenvalue_dev <= 1e-9);
    }

    #[test]
    fn uniform_scaling_of_power_family_preserves_directions() {
        // with C = 2I and β = 1/2, loadings shrink by c^{-β} while the
        // prediction C⁻¹w shrinks by c⁻¹, so only the direction survives
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::uniform(2, 2.0).unwrap();
        let report = verify_invariance(&sigma, &MetricSpec::BetaPower(0.5), &c).unwrap();
        assert_eq!(report.verdict, Verdict::DirectionInvariant);
        assert!(report.loading_dev > 0.1);
    }

    #[test]
    fn sign_alignment_picks_the_closer_sign() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let c = Rescaling::new(vec![2.0, 1.0]).unwrap();
        let report = verify_invariance(&sigma, &MetricSpec::Diagonal, &c).unwrap();
        // flipping any compared component would put the deviation near 2,
        // so a tiny reported deviation proves the aligner chose well
        assert!(report.loading_dev < 0.5);
    }

    #[test]
    fn uniform_equivariance_on_diagonal_sigma() {
        // Σ = diag(4, 1), β = 1/2, c = 2: eigenvalues (2, 1) become (4, 2)
        let sigma = SymmetricMatrix::from_diagonal(&[4.0, 1.0]);
        let report = verify_uniform_equivariance(&sigma, 0.5, 2.0).unwrap();
        assert_eq!(report.predicted_factor, 2.0);
        assert!(report.holds, "law must hold, dev {}", report.max_eigenvalue_dev);
        assert!(report.max_eigenvalue_dev <= 1e-9);
        assert!(report.max_direction_dev <= 1e-9);
    }

    #[test]
    fn uniform_equivariance_at_beta_zero() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let report = verify_uniform_equivariance(&sigma, 0.0, 3.0).unwrap();
        assert_eq!(report.predicted_factor, 9.0);
        assert!(report.holds);
    }

    #[test]
    fn uniform_equivariance_at_beta_one_is_trivial() {
        let sigma = sym(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let report = verify_uniform_equivariance(&sigma, 1.0, 5.0).unwrap();
        assert_eq!(report.predicted_factor, 1.0);
        assert!(report.holds, "flat spectra satisfy the law with factor 1");
        assert_eq!(report.skipped_components, vec![0, 1]);
    }

    #[test]
    fn hierarchy_pattern_for_nonuniform_scales() {
        let sigma = sym(&[&[3.0, 0.8, -0.4], &[0.8, 2.0, 0.3], &[-0.4, 0.3, 1.5]]);
        let c = Rescaling::new(vec![2.0, 1.0, 0.5]).unwrap();
        let entries = hierarchy_report(&sigma, &c).unwrap();
        let verdicts: Vec<Verdict> = entries.iter().map(|e| e.report.verdict).collect();
        assert_eq!(
            verdicts,
            vec![
                Verdict::NotInvariant,
                Verdict::StrictInvariant,
                Verdict::NotInvariant,
                Verdict::Degenerate,
            ]
        );
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [
            Verdict::StrictInvariant,
            Verdict::DirectionInvariant,
            Verdict::NotInvariant,
            Verdict::Degenerate,
        ] {
            assert_eq!(v.name().parse::<Verdict>().unwrap(), v);
        }
        assert_eq!("strict-invariant".parse::<Verdict>().unwrap(), Verdict::StrictInvariant);
        assert_eq!("degenerate".parse::<Verdict>().unwrap(), Verdict::Degenerate);
        assert!("sort-of-invariant".parse::<Verdict>().is_err());
    }
}
