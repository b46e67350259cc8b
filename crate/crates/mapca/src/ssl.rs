//! Mapping from self-supervised feature-decorrelation objectives onto
//! metric choices.
//!
//! Each method regularizes second-order feature statistics toward a target
//! whose constraint set is exactly `WᵀMW = I` for some metric `M`, so each
//! row of the table is one point in the metric family.

use crate::error::MapcaError;
use crate::metrics::{build_metric_with_floor, MetricSpec};
use crate::solver::{solve_mapca, spectrum_condition_number};
use crate::spectra::{matrix_power_with_floor, SymmetricMatrix, DEFAULT_SPD_FLOOR_REL};

/// Feature-decorrelation objectives with a second-order reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SslMethod {
    StandardPca,
    Ipca,
    VicregVariance,
    BarlowTwins,
    ZcaWhitening,
    Wmse,
}

impl SslMethod {
    pub const ALL: [SslMethod; 6] = [
        SslMethod::StandardPca,
        SslMethod::Ipca,
        SslMethod::VicregVariance,
        SslMethod::BarlowTwins,
        SslMethod::ZcaWhitening,
        SslMethod::Wmse,
    ];

    pub fn display_name(&self) -> &'static str {
        match self {
            SslMethod::StandardPca => "Standard PCA",
            SslMethod::Ipca => "IPCA",
            SslMethod::VicregVariance => "VICReg (variance term)",
            SslMethod::BarlowTwins => "Barlow Twins",
            SslMethod::ZcaWhitening => "ZCA Whitening",
            SslMethod::Wmse => "W-MSE",
        }
    }

    /// The constraint metric the objective enforces.
    pub fn implicit_metric(&self) -> MetricSpec {
        match self {
            SslMethod::StandardPca => MetricSpec::Identity,
            SslMethod::Ipca => MetricSpec::Diagonal,
            SslMethod::VicregVariance => MetricSpec::Diagonal,
            SslMethod::BarlowTwins => MetricSpec::BetaPower(1.0),
            SslMethod::ZcaWhitening => MetricSpec::BetaPower(1.0),
            SslMethod::Wmse => MetricSpec::InverseCovariance,
        }
    }

    /// Position on the `Σ^β` axis, when the metric lies on it.
    pub fn beta_position(&self) -> Option<f64> {
        self.implicit_metric().beta()
    }
}

/// One method's metric and the conditioning it induces on a given
/// covariance.
#[derive(Debug, Clone)]
pub struct CorrespondenceRow {
    pub method: SslMethod,
    pub metric: MetricSpec,
    pub beta: Option<f64>,
    pub kappa: f64,
}

/// Solves each method's implicit problem on `sigma` and records the
/// condition number of the induced spectrum.
pub fn correspondence_table_with_floor(
    sigma: &SymmetricMatrix,
    floor_rel: f64,
) -> Result<Vec<CorrespondenceRow>, MapcaError> {
    SslMethod::ALL
        .iter()
        .map(|&method| {
            let spec = method.implicit_metric();
            let metric = build_metric_with_floor(sigma, &spec, floor_rel)?;
            let solution = solve_mapca(sigma, &metric)?;
            Ok(CorrespondenceRow {
                method,
                metric: spec,
                beta: method.beta_position(),
                kappa: spectrum_condition_number(&solution.eigenvalues),
            })
        })
        .collect()
}

/// [`correspondence_table_with_floor`] at the default floor.
pub fn correspondence_table(
    sigma: &SymmetricMatrix,
) -> Result<Vec<CorrespondenceRow>, MapcaError> {
    correspondence_table_with_floor(sigma, DEFAULT_SPD_FLOOR_REL)
}

/// Deterministic pseudo-random stream for the unit-sphere spot check.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1)`.
    fn next_signed_unit(&mut self) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        2.0 * u - 1.0
    }
}

/// Spot check of the identity behind the inverse-covariance row: the
/// constraint pushes features toward `v = Σ^{1/2}u` with `u` on the unit
/// sphere, and every such `v` satisfies `vᵀΣ⁻¹v = 1`.
pub fn wmse_metric_derivation_check(sigma: &SymmetricMatrix) -> Result<bool, MapcaError> {
    let p = sigma.dim();
    let sqrt = matrix_power_with_floor(sigma, 0.5, DEFAULT_SPD_FLOOR_REL)?;
    let inv = matrix_power_with_floor(sigma, -1.0, DEFAULT_SPD_FLOOR_REL)?;
    let mut rng = SplitMix64::new(0x5EED_CAFE);
    for _ in 0..20 {
        // rejection-sample a unit vector away from the origin
        let mut u = vec![0.0_f64; p];
        loop {
            let mut norm_sq = 0.0;
            for entry in u.iter_mut() {
                *entry = rng.next_signed_unit();
                norm_sq += *entry * *entry;
            }
            if norm_sq > 1e-4 {
                let norm = norm_sq.sqrt();
                for entry in u.iter_mut() {
                    *entry /= norm;
                }
                break;
            }
        }
        let mut v = vec![0.0_f64; p];
        for (i, slot) in v.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &uj) in u.iter().enumerate() {
                acc += sqrt.get(i, j) * uj;
            }
            *slot = acc;
        }
        let mut quad = 0.0;
        for i in 0..p {
            for j in 0..p {
                quad += v[i] * inv.get(i, j) * v[j];
            }
        }
        if (quad - 1.0).abs() > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}
