//! Unit-ball geometry for a pair of variables: for each metric `M`, the
//! constraint set `{w : wᵀMw = 1}` is an ellipse whose boundary we sample
//! as `M^{-1/2}(cos θ, sin θ)`, together with the principal axes the
//! solver finds under that constraint.

use mapca::error::MapcaError;
use mapca::metrics::{build_metric_with_floor, MetricSpec};
use mapca::solver::solve_mapca;
use mapca::spectra::SymmetricMatrix;

/// One boundary sample of the constraint ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

/// Everything needed to draw one metric's panel.
#[derive(Debug, Clone)]
pub struct BallPanel {
    pub metric_label: String,
    pub metric: SymmetricMatrix,
    pub kappa: f64,
    pub eigenvalues: Vec<f64>,
    /// Principal directions, Euclidean-normalized and scaled by `√λ`.
    pub axes: Vec<[f64; 2]>,
    pub boundary: Vec<BoundaryPoint>,
}

/// Builds a panel per labeled metric on a 2x2 covariance.
pub fn unit_ball_panels(
    sigma: &SymmetricMatrix,
    specs: &[(String, MetricSpec)],
    n_points: usize,
    floor_rel: f64,
) -> Result<Vec<BallPanel>, MapcaError> {
    assert_eq!(sigma.dim(), 2, "ball panels are two-dimensional");
    specs
        .iter()
        .map(|(label, spec)| {
            let metric = build_metric_with_floor(sigma, spec, floor_rel)?;
            let solution = solve_mapca(sigma, &metric)?;
            let inv = metric.inverse_sqrt.as_mat();
            let boundary = (0..n_points)
                .map(|k| {
                    let theta = std::f64::consts::TAU * k as f64 / n_points as f64;
                    let (u0, u1) = (theta.cos(), theta.sin());
                    BoundaryPoint {
                        theta,
                        x: inv.get(0, 0) * u0 + inv.get(0, 1) * u1,
                        y: inv.get(1, 0) * u0 + inv.get(1, 1) * u1,
                    }
                })
                .collect();
            let axes = (0..2)
                .map(|i| {
                    let wx = solution.loadings.get(0, i);
                    let wy = solution.loadings.get(1, i);
                    let norm = (wx * wx + wy * wy).sqrt();
                    let lambda = solution.eigenvalues[i].max(0.0);
                    let stretch = lambda.sqrt();
                    [wx / norm * stretch, wy / norm * stretch]
                })
                .collect();
            Ok(BallPanel {
                metric_label: label.clone(),
                metric: metric.m.clone(),
                kappa: solution.condition_number,
                eigenvalues: solution.eigenvalues.clone(),
                axes,
                boundary,
            })
        })
        .collect()
}
