use super::{sym_eigenvalues, Matrix};
use crate::math::abs;
use crate::{Error, Result};

/// Complex Hermitian matrix `re + i*im` stored as two real matrices.
#[derive(Clone, PartialEq, Debug)]
pub struct HermMatrix {
    pub re: Matrix,
    pub im: Matrix,
}

impl HermMatrix {
    /// Checks `re` symmetric and `im` antisymmetric to `tol`.
    pub fn new(re: Matrix, im: Matrix, tol: f64) -> Result<Self> {
        if !re.is_square() || (re.rows(), re.cols()) != (im.rows(), im.cols()) {
            return Err(Error::BadDimension {
                rows: im.rows(),
                cols: im.cols(),
            });
        }
        let h = Self { re, im };
        let defect = h.hermitian_defect();
        if defect > tol {
            return Err(Error::NotSymmetric { defect });
        }
        Ok(h)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            re: Matrix::zeros(n, n),
            im: Matrix::zeros(n, n),
        }
    }

    pub fn from_real(re: Matrix) -> Self {
        let n = re.rows();
        Self {
            re,
            im: Matrix::zeros(n, n),
        }
    }

    /// `i * a` for a real antisymmetric `a`.
    pub fn from_imag(im: Matrix) -> Self {
        let n = im.rows();
        Self {
            re: Matrix::zeros(n, n),
            im,
        }
    }

    pub fn dim(&self) -> usize {
        self.re.rows()
    }

    pub fn is_real(&self) -> bool {
        self.im.max_abs() == 0.0
    }

    /// Largest entry of `|H - H^dagger|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut d: f64 = 0.0;
        for i in 0..n {
            d = d.max(abs(self.im[(i, i)]));
            for j in i + 1..n {
                d = d.max(abs(self.re[(i, j)] - self.re[(j, i)]));
                d = d.max(abs(self.im[(i, j)] + self.im[(j, i)]));
            }
        }
        d
    }

    /// Real symmetric embedding `[[re, -im], [im, re]]`.
    pub fn embed(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => self.re[(i, j)],
            (true, false) => -self.im[(i, j - n)],
            (false, true) => self.im[(i - n, j)],
            (false, false) => self.re[(i - n, j - n)],
        })
    }

    /// Inverse of [`embed`](Self::embed) in the adjoint sense: returns the
    /// Hermitian `W` with `tr(H W) = <embed(H), x>` for every Hermitian `H`.
    pub fn from_embedded_dual(x: &Matrix) -> Self {
        let n = x.rows() / 2;
        let re = Matrix::from_fn(n, n, |i, j| {
            0.5 * (x[(i, j)] + x[(n + i, n + j)] + x[(j, i)] + x[(n + j, n + i)])
        });
        let im = Matrix::from_fn(n, n, |i, j| {
            0.5 * ((x[(n + i, j)] - x[(i, n + j)]) - (x[(n + j, i)] - x[(j, n + i)]))
        });
        Self { re, im }
    }

    /// Hilbert-Schmidt pairing `tr(A B)`, real for Hermitian arguments.
    pub fn inner(&self, other: &HermMatrix) -> f64 {
        self.re.inner(&other.re) + self.im.inner(&other.im)
    }

    pub fn trace(&self) -> f64 {
        self.re.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub fn add(&self, other: &HermMatrix) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn sub(&self, other: &HermMatrix) -> Self {
        Self {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    /// Adds `block` into the principal submatrix on `idx`.
    pub fn add_block(&mut self, idx: &[usize], block: &HermMatrix) {
        self.re.add_block(idx, idx, &block.re);
        self.im.add_block(idx, idx, &block.im);
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        Self {
            re: self.re.principal(idx),
            im: self.im.principal(idx),
        }
    }

    /// Ascending eigenvalues (each listed once).
    pub fn eigenvalues(&self) -> alloc::vec::Vec<f64> {
        if self.is_real() {
            return sym_eigenvalues(&self.re);
        }
        let doubled = sym_eigenvalues(&self.embed());
        doubled.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }
}
