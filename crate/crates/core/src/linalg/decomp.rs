use alloc::vec::Vec;

use super::{sym_eigen, Matrix};
use crate::math::{abs, sqrt};
use crate::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    pub l: Matrix,
}

impl Cholesky {
    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// `L^{-1}`.
    pub fn l_inverse(&self) -> Matrix {
        let n = self.l.rows();
        let l = &self.l;
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = 1.0 / l[(j, j)];
            for i in j + 1..n {
                let mut s = 0.0;
                for k in j..i {
                    s -= l[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = s / l[(i, i)];
            }
        }
        inv
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|d| libm::log(*d)).sum::<f64>()
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Cholesky> {
    if !a.is_square() {
        return Err(Error::BadDimension {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: sym_eigen(a).min(),
            });
        }
        let d = sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Cholesky { l })
}

struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

fn lu(a: &Matrix) -> Result<Lu> {
    if !a.is_square() {
        return Err(Error::BadDimension {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if abs(lu[(i, k)]) > abs(lu[(p, k)]) {
                p = i;
            }
        }
        if abs(lu[(p, k)]) <= scale * f64::EPSILON * n as f64 {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            for j in k + 1..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
        }
    }
    Ok(Lu { lu, perm, sign })
}

impl Lu {
    fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.lu[(i, k)] * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.lu[(i, k)] * y[k];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let f = lu(a)?;
    let mut out = Matrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        for (i, v) in f.solve_vec(&b.column(j)).into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Inverse of a symmetric positive definite matrix, symmetrized.
pub fn inverse_pd(a: &Matrix) -> Result<Matrix> {
    let c = cholesky(a)?;
    Ok(c.solve(&Matrix::identity(a.rows())).symmetrize())
}

/// Determinant of a symmetric positive definite matrix.
pub fn determinant_pd(a: &Matrix) -> Result<f64> {
    Ok(libm::exp(cholesky(a)?.log_det()))
}

/// General determinant via LU; zero for numerically singular input.
pub fn determinant(a: &Matrix) -> f64 {
    match lu(a) {
        Ok(f) => f.sign * f.lu.diagonal().iter().product::<f64>(),
        Err(_) => 0.0,
    }
}

/// Principal square root of a symmetric PSD matrix. Eigenvalues below zero
/// (rounding noise) are clamped.
pub fn sqrtm_psd(a: &Matrix) -> Matrix {
    sym_eigen(a).map(|l| sqrt(l.max(0.0)))
}

/// `A^{-1/2}` for symmetric positive definite `A`.
pub fn inv_sqrtm_pd(a: &Matrix) -> Result<Matrix> {
    let e = sym_eigen(a);
    if !(e.min() > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.map(|l| 1.0 / sqrt(l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> Matrix {
        let b = Matrix::from_fn(5, 5, |i, j| libm::sin((3 * i + 7 * j) as f64 + 0.4));
        &(&b * &b.transpose()) + &Matrix::identity(5)
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = spd();
        let c = cholesky(&a).unwrap();
        assert!((&(&c.l * &c.l.transpose()) - &a).max_abs() < 1e-12);
        let li = c.l_inverse();
        assert!((&(&li * &c.l) - &Matrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(matches!(
            cholesky(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn inverse_and_det() {
        let a = spd();
        let inv = inverse(&a).unwrap();
        assert!((&(&inv * &a) - &Matrix::identity(5)).max_abs() < 1e-11);
        assert!((&inverse_pd(&a).unwrap() - &inv).max_abs() < 1e-11);
        let d1 = determinant(&a);
        let d2 = determinant_pd(&a).unwrap();
        assert!((d1 - d2).abs() < 1e-9 * d1.abs());
        let m = Matrix::from_rows(&[[0.0, 2.0], [3.0, 1.0]]);
        assert!((determinant(&m) + 6.0).abs() < 1e-14);
    }

    #[test]
    fn singular_lu() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(inverse(&a).unwrap_err(), Error::Singular);
    }

    #[test]
    fn square_roots() {
        let a = spd();
        let r = sqrtm_psd(&a);
        assert!((&(&r * &r) - &a).max_abs() < 1e-11);
        let ri = inv_sqrtm_pd(&a).unwrap();
        assert!((&(&(&ri * &a) * &ri) - &Matrix::identity(5)).max_abs() < 1e-11);
    }
}
