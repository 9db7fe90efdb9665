use alloc::vec::Vec;

use super::Matrix;
use crate::math::{abs, sqrt};

const MAX_SWEEPS: usize = 80;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `U diag(h(lambda)) U^T`.
    pub fn map(&self, h: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let u = &self.vectors;
        let hv: Vec<f64> = self.values.iter().map(|&l| h(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += u[(i, k)] * hv[k] * u[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// A rotation is skipped once `|a_pq| <= eps * sqrt(|a_pp a_qq|)`, which gives
/// eigenvalues of positive definite input to high relative accuracy. Only the
/// upper triangle is trusted; the input is symmetrized first.
pub fn sym_eigen(m: &Matrix) -> SymEigen {
    assert!(m.is_square(), "sym_eigen needs a square matrix");
    let n = m.rows();
    let mut a = m.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();
    if n == 0 || scale == 0.0 {
        return SymEigen {
            values: a.diagonal(),
            vectors: v,
        };
    }
    let tiny = f64::MIN_POSITIVE * 1e4;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if abs(apq) <= f64::EPSILON * sqrt(abs(app * aqq)) || abs(apq) <= tiny {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    if abs(theta) > 1e150 {
                        sgn * 0.5 / abs(theta)
                    } else {
                        sgn / (abs(theta) + sqrt(theta * theta + 1.0))
                    }
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diagonal();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    SymEigen { values, vectors }
}

pub fn sym_eigenvalues(m: &Matrix) -> Vec<f64> {
    sym_eigen(m).values
}
