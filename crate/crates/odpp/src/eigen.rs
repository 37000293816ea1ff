//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Every matrix in this crate is small (a few hundred square at most), dense
//! and symmetric, so a dependency-free Jacobi sweep is both fast enough and
//! deterministic: the rotation order is fixed, which makes eigenvector output
//! reproducible bit-for-bit across runs.

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("matrix is not symmetric: |M[{i},{j}] - M[{j},{i}]| = {delta:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },
}

/// Maximum absolute asymmetry accepted before a matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
/// symmetric matrix.
///
/// Eigenvectors are the columns of `vectors`; the sign of each column is
/// fixed by making its largest-magnitude component positive (first index
/// wins ties), so the output is deterministic.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

fn check_symmetric(m: &Array2<f64>) -> Result<usize, EigenError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(EigenError::NotSquare(rows, cols));
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for i in 0..rows {
        for j in (i + 1)..rows {
            let delta = (m[[i, j]] - m[[j, i]]).abs();
            if delta > SYMMETRY_TOL * scale {
                return Err(EigenError::NotSymmetric { i, j, delta });
            }
        }
    }
    Ok(rows)
}

/// Runs cyclic Jacobi sweeps on `a` in place, accumulating rotations into
/// `v` when provided. Returns the diagonal as the (unsorted) eigenvalues.
fn jacobi_sweeps(a: &mut Array2<f64>, mut v: Option<&mut Array2<f64>>) -> Vec<f64> {
    let n = a.nrows();
    if n <= 1 {
        return (0..n).map(|i| a[[i, i]]).collect();
    }
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
    let tol = 1e-14 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[[k, p]];
                        let akq = a[[k, q]];
                        a[[k, p]] = c * akp - s * akq;
                        a[[p, k]] = a[[k, p]];
                        a[[k, q]] = s * akp + c * akq;
                        a[[q, k]] = a[[k, q]];
                    }
                }
                a[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[[q, q]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;

                if let Some(vm) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = vm[[k, p]];
                        let vkq = vm[[k, q]];
                        vm[[k, p]] = c * vkp - s * vkq;
                        vm[[k, q]] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[[i, i]]).collect()
}

/// Fixes the sign of an eigenvector slice so its largest-magnitude
/// component is positive; the first index attaining the maximum decides.
/// Magnitudes within a relative 1e-9 count as tied, so roundoff-level
/// differences cannot flip the convention.
fn canonical_sign(col: &mut [f64]) {
    let max_abs = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cutoff = max_abs * (1.0 - 1e-9);
    let lead = col.iter().position(|x| x.abs() >= cutoff).unwrap_or(0);
    if col[lead] < 0.0 {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are returned ascending; eigenvectors are orthonormal columns
/// under the deterministic sign convention. The residual `‖Mv − λv‖` stays
/// below `1e-8·max(1, |λ_max|)` for the matrix sizes used here.
pub fn symmetric_eigensystem(m: &Array2<f64>) -> Result<EigenDecomposition, EigenError> {
    let n = check_symmetric(m)?;
    let mut work = m.clone();
    let mut vecs = Array2::eye(n);
    let raw = jacobi_sweeps(&mut work, Some(&mut vecs));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]).then(i.cmp(&j)));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::zeros((n, n));
    for (out, &idx) in order.iter().enumerate() {
        values.push(raw[idx]);
        let mut col: Vec<f64> = (0..n).map(|r| vecs[[r, idx]]).collect();
        canonical_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors[[r, out]] = x;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, ascending. Runs the same rotation schedule as
/// [`symmetric_eigensystem`] without accumulating the vector matrix.
pub fn symmetric_eigenvalues(m: &Array2<f64>) -> Result<Vec<f64>, EigenError> {
    check_symmetric(m)?;
    let mut work = m.clone();
    let mut values = jacobi_sweeps(&mut work, None);
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn identity_eigenvalues() {
        let eig = symmetric_eigensystem(&Array2::eye(3)).unwrap();
        for v in &eig.values {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let m = array![[5.0, 0.0], [0.0, 2.0]];
        let eig = symmetric_eigensystem(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn path_graph_laplacian_spectrum() {
        // Characteristic polynomial of the P3 Laplacian expands to
        // λ(λ−1)(λ−3), so the spectrum is exactly {0, 1, 3}.
        let m = array![[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        let eig = symmetric_eigensystem(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn residual_and_orthonormality() {
        // Fixed symmetric matrix with distinct eigenvalues.
        let m = array![
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 3.0, 0.0, 1.5],
            [-2.0, 0.0, 1.0, -0.5],
            [0.5, 1.5, -0.5, 2.0]
        ];
        let eig = symmetric_eigensystem(&m).unwrap();
        let n = 4;
        let max_abs = eig.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for k in 0..n {
            let v = eig.vectors.column(k);
            let mv = m.dot(&v);
            for r in 0..n {
                assert!((mv[r] - eig.values[k] * v[r]).abs() <= 1e-8 * max_abs);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dot = eig.vectors.column(i).dot(&eig.vectors.column(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sign_convention_deterministic() {
        let m = array![[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        let eig = symmetric_eigensystem(&m).unwrap();
        // Fiedler vector of P3 is ∝ (1, 0, −1); the convention keeps the
        // first (largest-magnitude) component positive.
        assert!(eig.vectors[[0, 1]] > 0.0);
        assert_abs_diff_eq!(eig.vectors[[0, 1]], 1.0 / 2.0f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(eig.vectors[[1, 1]], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.vectors[[2, 1]], -1.0 / 2.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(
            symmetric_eigensystem(&m),
            Err(EigenError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn values_only_matches_full() {
        let m = array![
            [2.0, 0.5, 0.0],
            [0.5, 1.0, -0.25],
            [0.0, -0.25, 3.0]
        ];
        let full = symmetric_eigensystem(&m).unwrap();
        let vals = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in full.values.iter().zip(vals.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }
}
