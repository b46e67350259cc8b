//! Symmetric eigendecomposition, matrix powers, and positive-definiteness checks.
//!
//! The eigensolver is a cyclic Jacobi iteration: plane rotations annihilate
//! off-diagonal entries pair by pair until the off-diagonal Frobenius norm
//! falls below [`CONVERGENCE_REL`] times the Frobenius norm of the input.
//! Results come back sorted by descending eigenvalue with a deterministic
//! sign convention on the eigenvectors, so decomposing the same matrix twice
//! yields bitwise-identical output.

use std::cmp::Ordering;

use crate::error::MapcaError;
use crate::mat::Mat;

/// Sweep budget for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold for the off-diagonal Frobenius norm, relative to
/// the Frobenius norm of the input matrix.
pub const CONVERGENCE_REL: f64 = 1e-12;

/// Default positive-definiteness floor, relative to the largest eigenvalue.
pub const DEFAULT_SPD_FLOOR_REL: f64 = 1e-12;

/// Eigenvalue gaps at or below this fraction of the largest eigenvalue
/// magnitude mark a degenerate cluster; eigenvectors inside a cluster are
/// not individually identifiable.
pub const DEGENERACY_REL: f64 = 1e-10;

/// Square matrix stored in symmetrized form.
///
/// Construction averages `A` and `Aᵀ`, so `get(i, j) == get(j, i)` holds
/// exactly for every instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    mat: Mat,
}

impl SymmetricMatrix {
    /// Builds from an arbitrary square matrix, averaging mirrored entries.
    pub fn new(mat: Mat) -> Result<Self, MapcaError> {
        if mat.rows() != mat.cols() {
            return Err(MapcaError::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let n = mat.rows();
        if n == 0 {
            return Err(MapcaError::EmptyMatrix);
        }
        for i in 0..n {
            for j in 0..n {
                if !mat.get(i, j).is_finite() {
                    return Err(MapcaError::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        let mut sym = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                sym.set(i, j, 0.5 * (mat.get(i, j) + mat.get(j, i)));
            }
        }
        Ok(SymmetricMatrix { mat: sym })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        SymmetricMatrix { mat: Mat::identity(n) }
    }

    pub fn from_diagonal(diagonal: &[f64]) -> Self {
        assert!(!diagonal.is_empty(), "dimension must be at least 1");
        let mut mat = Mat::zeros(diagonal.len(), diagonal.len());
        for (i, &d) in diagonal.iter().enumerate() {
            mat.set(i, i, d);
        }
        SymmetricMatrix { mat }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn as_mat(&self) -> &Mat {
        &self.mat
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }
}

/// Eigenvalues sorted descending with column-orthonormal eigenvectors.
///
/// Column `k` of `eigenvectors` pairs with `eigenvalues[k]`. Each column's
/// largest-magnitude entry is positive; ties go to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V · diag(f(λ)) · Vᵀ`, symmetrized.
    pub fn reassemble_mapped(&self, f: impl Fn(f64) -> f64) -> Result<SymmetricMatrix, MapcaError> {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let v = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled.set(i, j, scaled.get(i, j) * v);
            }
        }
        SymmetricMatrix::new(scaled.mul(&self.eigenvectors.transpose()))
    }
}

fn off_diagonal_norm(m: &Mat) -> f64 {
    let n = m.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m.get(i, j);
            sum += 2.0 * v * v;
        }
    }
    sum.sqrt()
}

/// One cyclic pass over every off-diagonal pair.
///
/// Rotation angles follow the stable half-angle formulas; the `tau` form of
/// the row updates keeps rounding in the rotated entries first order.
fn jacobi_sweep(a: &mut Mat, v: &mut Mat) {
    let n = a.rows();
    for p in 0..n.saturating_sub(1) {
        for q in (p + 1)..n {
            let apq = a.get(p, q);
            if apq == 0.0 {
                continue;
            }
            let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
            let t = if theta >= 0.0 {
                1.0 / (theta + (1.0 + theta * theta).sqrt())
            } else {
                1.0 / (theta - (1.0 + theta * theta).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            let tau = s / (1.0 + c);
            let shift = t * apq;
            a.set(p, p, a.get(p, p) - shift);
            a.set(q, q, a.get(q, q) + shift);
            a.set(p, q, 0.0);
            a.set(q, p, 0.0);
            for j in 0..n {
                if j == p || j == q {
                    continue;
                }
                let ajp = a.get(j, p);
                let ajq = a.get(j, q);
                let np = ajp - s * (ajq + tau * ajp);
                let nq = ajq + s * (ajp - tau * ajq);
                a.set(j, p, np);
                a.set(p, j, np);
                a.set(j, q, nq);
                a.set(q, j, nq);
            }
            for j in 0..n {
                let vjp = v.get(j, p);
                let vjq = v.get(j, q);
                v.set(j, p, vjp - s * (vjq + tau * vjp));
                v.set(j, q, vjq + s * (vjp - tau * vjq));
            }
        }
    }
}

/// Flips each column so its largest-magnitude entry is positive.
///
/// Ties on the magnitude go to the lowest index; a flipped zero is
/// normalized back to +0.0 so the convention stays bitwise stable.
fn fix_signs(vectors: &mut Mat) {
    let n = vectors.rows();
    for k in 0..vectors.cols() {
        let mut lead = 0;
        let mut lead_abs = vectors.get(0, k).abs();
        for i in 1..n {
            let a = vectors.get(i, k).abs();
            if a > lead_abs {
                lead = i;
                lead_abs = a;
            }
        }
        if vectors.get(lead, k) < 0.0 {
            for i in 0..n {
                let flipped = -vectors.get(i, k);
                vectors.set(i, k, if flipped == 0.0 { 0.0 } else { flipped });
            }
        }
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order and eigenvectors as columns in
/// the matching order. Fails with [`MapcaError::NonConvergence`] if the
/// sweep budget is exhausted, which does not happen for finite input at
/// realistic sizes.
pub fn decompose(a: &SymmetricMatrix) -> Result<SpectralDecomposition, MapcaError> {
    let n = a.dim();
    let mut work = a.as_mat().clone();
    let mut v = Mat::identity(n);
    let threshold = CONVERGENCE_REL * work.frobenius();
    let mut off = off_diagonal_norm(&work);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(MapcaError::NonConvergence {
                sweeps,
                off_diagonal: off,
                threshold,
            });
        }
        jacobi_sweep(&mut work, &mut v);
        off = off_diagonal_norm(&work);
        sweeps += 1;
    }
    // One polishing sweep after convergence: the quadratic convergence of
    // the rotations turns a just-below-threshold residual into one at
    // rounding level. Exactly diagonal input is left untouched, so this
    // costs nothing when there is nothing to do.
    jacobi_sweep(&mut work, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        work.get(j, j)
            .partial_cmp(&work.get(i, i))
            .unwrap_or(Ordering::Equal)
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| work.get(i, i)).collect();
    let mut eigenvectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors.set(row, dst, v.get(row, src));
        }
    }
    fix_signs(&mut eigenvectors);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `a` raised to an arbitrary real power through its eigendecomposition.
///
/// Exponent 0 returns the exact identity. Negative or fractional exponents
/// require every eigenvalue to clear the positive-definiteness floor
/// `floor_rel · λ_max`; non-negative integer exponents work on any
/// symmetric matrix.
pub fn matrix_power_with_floor(
    a: &SymmetricMatrix,
    exponent: f64,
    floor_rel: f64,
) -> Result<SymmetricMatrix, MapcaError> {
    if !exponent.is_finite() {
        return Err(MapcaError::NonFiniteExponent);
    }
    if exponent == 0.0 {
        return Ok(SymmetricMatrix::identity(a.dim()));
    }
    let dec = decompose(a)?;
    let needs_spd = exponent < 0.0 || exponent.fract() != 0.0;
    if needs_spd {
        let floor = floor_rel * dec.eigenvalues[0].max(0.0);
        let min = *dec.eigenvalues.last().expect("dimension is at least 1");
        if min <= floor {
            return Err(MapcaError::SingularMetric {
                exponent,
                eigenvalue: min,
                floor,
            });
        }
    }
    let integral = exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64;
    dec.reassemble_mapped(|l| {
        if integral {
            l.powi(exponent as i32)
        } else {
            l.powf(exponent)
        }
    })
}

/// [`matrix_power_with_floor`] at the default floor.
pub fn matrix_power(a: &SymmetricMatrix, exponent: f64) -> Result<SymmetricMatrix, MapcaError> {
    matrix_power_with_floor(a, exponent, DEFAULT_SPD_FLOOR_REL)
}

/// Checks positive definiteness against an absolute eigenvalue floor and
/// returns the smallest eigenvalue on success.
pub fn assert_spd(a: &SymmetricMatrix, floor: f64) -> Result<f64, MapcaError> {
    let dec = decompose(a)?;
    let min = *dec.eigenvalues.last().expect("dimension is at least 1");
    if min > floor {
        Ok(min)
    } else {
        Err(MapcaError::NotPositiveDefinite {
            lambda_min: min,
            floor,
        })
    }
}

/// [`assert_spd`] with the floor taken relative to the largest eigenvalue.
pub fn assert_spd_relative(a: &SymmetricMatrix, floor_rel: f64) -> Result<f64, MapcaError> {
    let dec = decompose(a)?;
    let max = dec.eigenvalues[0].max(0.0);
    let min = *dec.eigenvalues.last().expect("dimension is at least 1");
    let floor = floor_rel * max;
    if min > floor {
        Ok(min)
    } else {
        Err(MapcaError::NotPositiveDefinite {
            lambda_min: min,
            floor,
        })
    }
}

/// Marks components whose neighbouring eigenvalue gap is inside the
/// degeneracy tolerance. Expects descending order.
pub fn degenerate_flags(eigenvalues: &[f64]) -> Vec<bool> {
    let n = eigenvalues.len();
    let scale = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let tol = DEGENERACY_REL * scale;
    let mut flags = vec![false; n];
    for i in 0..n.saturating_sub(1) {
        if (eigenvalues[i] - eigenvalues[i + 1]).abs() <= tol {
            flags[i] = true;
            flags[i + 1] = true;
        }
    }
    flags
}
