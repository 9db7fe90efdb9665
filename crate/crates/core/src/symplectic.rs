//! Symplectic linear algebra on `2n x 2n` real matrices in `xxpp` ordering.

use alloc::vec::Vec;

use crate::linalg::{dot, inv_sqrtm_pd, norm, solve, sqrtm_psd, sym_eigen, HermMatrix, Matrix};
use crate::math::{abs, sqrt};
use crate::partition::ModePartition;
use crate::{Error, Result, DEFAULT_TOL};

/// The standard symplectic form `[[0, I], [-I, 0]]` on `n` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    pub n: usize,
    pub matrix: Matrix,
}

pub fn omega(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    Ok(SymplecticForm {
        n,
        matrix: omega_matrix(n),
    })
}

pub(crate) fn omega_matrix(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

/// Rows/columns of the listed modes inside a `2n` phase space:
/// all their `x` indices, then all their `p` indices.
pub fn mode_indices(modes: &[usize], n: usize) -> Vec<usize> {
    modes
        .iter()
        .copied()
        .chain(modes.iter().map(|m| m + n))
        .collect()
}

/// `Omega` acting only on `modes`, zero elsewhere, as a `2n x 2n` matrix.
pub fn embedded_omega(n: usize, modes: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(2 * n, 2 * n);
    let idx = mode_indices(modes, n);
    m.add_block(&idx, &idx, &omega_matrix(modes.len()));
    m
}

fn check_even_square(v: &Matrix) -> Result<usize> {
    if !v.is_square() || !v.rows().is_multiple_of(2) || v.rows() == 0 {
        return Err(Error::BadDimension {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    Ok(v.rows() / 2)
}

/// Outcome of [`validate_qcm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcmReport {
    pub valid: bool,
    /// Smallest eigenvalue of the Hermitian matrix `V - i*Omega`.
    pub min_eigenvalue: f64,
    pub asymmetry: f64,
}

/// Checks the uncertainty principle `V >= i*Omega` as a Hermitian eigenproblem.
///
/// A matrix is accepted when `lambda_min(V - i*Omega) >= -tol`.
pub fn validate_qcm(v: &Matrix, tol: f64) -> Result<QcmReport> {
    let n = check_even_square(v)?;
    let asymmetry = v.asymmetry();
    if asymmetry > tol.max(1e-12) {
        return Err(Error::NotSymmetric { defect: asymmetry });
    }
    let h = HermMatrix {
        re: v.symmetrize(),
        im: omega_matrix(n).scale(-1.0),
    };
    let min_eigenvalue = h.min_eigenvalue();
    Ok(QcmReport {
        valid: min_eigenvalue >= -tol,
        min_eigenvalue,
        asymmetry,
    })
}

/// A validated quantum covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovMatrix {
    v: Matrix,
}

impl CovMatrix {
    /// Validates with [`DEFAULT_TOL`].
    pub fn new(v: Matrix) -> Result<Self> {
        Self::with_tol(v, DEFAULT_TOL)
    }

    pub fn with_tol(v: Matrix, tol: f64) -> Result<Self> {
        let r = validate_qcm(&v, tol)?;
        if !r.valid {
            return Err(Error::NotQcm {
                min_eigenvalue: r.min_eigenvalue,
            });
        }
        Ok(Self { v: v.symmetrize() })
    }

    /// Wraps a matrix the caller already knows to be a QCM.
    pub fn new_unchecked(v: Matrix) -> Self {
        Self { v }
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            v: Matrix::identity(2 * n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.v.rows() / 2
    }

    pub fn matrix(&self) -> &Matrix {
        &self.v
    }

    pub fn into_matrix(self) -> Matrix {
        self.v
    }
}

impl AsRef<Matrix> for CovMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.v
    }
}

/// `diag(I, -I)` on the chosen modes and identity elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumFlip {
    pub n: usize,
    signs: Vec<f64>,
}

impl MomentumFlip {
    pub fn full(n: usize) -> Self {
        let modes: Vec<usize> = (0..n).collect();
        Self::on_modes(n, &modes)
    }

    pub fn on_modes(n: usize, modes: &[usize]) -> Self {
        let mut signs = alloc::vec![1.0; 2 * n];
        for &m in modes {
            signs[n + m] = -1.0;
        }
        Self { n, signs }
    }

    pub fn for_party(partition: &ModePartition, party: &str) -> Result<Self> {
        let modes = partition.modes_of(party)?;
        Ok(Self::on_modes(partition.n_modes(), &modes))
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_diag(&self.signs)
    }

    /// `Sigma V Sigma`.
    pub fn conjugate(&self, v: &Matrix) -> Matrix {
        Matrix::from_fn(v.rows(), v.cols(), |i, j| {
            self.signs[i] * self.signs[j] * v[(i, j)]
        })
    }
}

/// Symplectic eigenvalues of a positive definite `V`, ascending.
///
/// Computed from the spectrum of `-M^2` with `M = V^{1/2} Omega V^{1/2}`,
/// which holds each `nu_k^2` twice.
pub fn symplectic_eigenvalues(v: &Matrix) -> Result<Vec<f64>> {
    let n = check_even_square(v)?;
    let m = sqrt_form(v)?.1;
    let sq = &m.transpose() * &m;
    let vals = sym_eigen(&sq).values;
    Ok((0..n)
        .map(|k| sqrt((0.5 * (vals[2 * k] + vals[2 * k + 1])).max(0.0)))
        .collect())
}

fn sqrt_form(v: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = v.rows() / 2;
    let e = sym_eigen(&v.symmetrize());
    if !(e.min() > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: e.min(),
        });
    }
    let r = sqrtm_psd(v);
    let m = &(&r * &omega_matrix(n)) * &r;
    Ok((r, m))
}

/// `S V S^T = D (+) D` with `S` symplectic and `D` ascending.
#[derive(Clone, Debug)]
pub struct Williamson {
    pub s: Matrix,
    pub d: Vec<f64>,
    pub congruence_residual: f64,
    pub symplectic_residual: f64,
}

/// Residual bound enforced by [`williamson`].
pub const WILLIAMSON_TOL: f64 = 1e-9;

pub fn williamson(v: &Matrix) -> Result<Williamson> {
    let n = check_even_square(v)?;
    let (_, m) = sqrt_form(v)?;
    let sq = &m.transpose() * &m;
    let eig = sym_eigen(&sq);
    let cands: Vec<Vec<f64>> = (0..2 * n).map(|j| eig.vectors.column(j)).collect();
    let mut used = alloc::vec![false; 2 * n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(n);

    for _ in 0..n {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for (j, c) in cands.iter().enumerate() {
            if used[j] {
                continue;
            }
            let mut w = c.clone();
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= p * bi;
                    }
                }
            }
            let r = norm(&w);
            if best.as_ref().is_none_or(|(_, br, _)| r > *br) {
                best = Some((j, r, w));
            }
        }
        let (j, rn, w) = best.expect("candidate available");
        used[j] = true;
        let e: Vec<f64> = w.iter().map(|x| x / rn).collect();
        let me = m.mul_vec(&e);
        let nu = norm(&me);
        if !(nu > 0.0) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: 0.0,
            });
        }
        let f: Vec<f64> = me.iter().map(|x| -x / nu).collect();
        basis.push(e.clone());
        basis.push(f.clone());
        pairs.push((nu, e, f));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let d: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    // Rows of O^T are e_1..e_n, f_1..f_n.
    let ot = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n {
            pairs[i].1[j]
        } else {
            pairs[i - n].2[j]
        }
    });
    let v_inv_sqrt = inv_sqrtm_pd(v)?;
    let scale: Vec<f64> = d.iter().chain(d.iter()).map(|x| sqrt(*x)).collect();
    let mut s = &ot * &v_inv_sqrt;
    for i in 0..2 * n {
        for j in 0..2 * n {
            s[(i, j)] *= scale[i];
        }
    }

    let dd = Matrix::from_diag(&d.iter().chain(d.iter()).copied().collect::<Vec<_>>());
    let congruence_residual = (&s.congruence(v) - &dd).max_abs();
    let om = omega_matrix(n);
    let symplectic_residual = (&s.congruence(&om) - &om).max_abs();
    if congruence_residual > WILLIAMSON_TOL || symplectic_residual > WILLIAMSON_TOL {
        return Err(Error::Williamson {
            congruence_residual,
            symplectic_residual,
        });
    }
    Ok(Williamson {
        s,
        d,
        congruence_residual,
        symplectic_residual,
    })
}

/// Largest `lambda >= 0` with `V >= i*lambda*Omega`, found by bisection on
/// the Hermitian minimum eigenvalue. Equals the smallest symplectic
/// eigenvalue for positive definite `V`.
pub fn nu_min_bisection(v: &Matrix, rel_tol: f64) -> Result<f64> {
    let n = check_even_square(v)?;
    let om = omega_matrix(n);
    let feasible = |lam: f64| {
        HermMatrix {
            re: v.symmetrize(),
            im: om.scale(-lam),
        }
        .min_eigenvalue()
            >= 0.0
    };
    let top = sym_eigen(&v.symmetrize()).max();
    if !(top > 0.0) || !feasible(0.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: sym_eigen(v).min(),
        });
    }
    let (mut lo, mut hi) = (0.0, top);
    if feasible(hi) {
        return Ok(hi);
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of [`schur_complement`].
#[derive(Clone, Debug)]
pub struct SchurComplement {
    /// `M/P` on the complementary indices, in ascending index order.
    pub matrix: Matrix,
    /// Indices of `M` the complement lives on.
    pub indices: Vec<usize>,
    pub pivot_min_singular_value: f64,
    pub pivot_condition: f64,
}

/// Relative threshold below which a pivot counts as singular.
pub const PIVOT_RTOL: f64 = 1e-13;

/// `M/P = Q - Y P^{-1} X` where `P` is the principal block on `pivot`.
///
/// A pivot whose smallest singular value is below `PIVOT_RTOL` times its
/// largest is rejected; callers that want a regularized complement add
/// `eps * I` themselves.
pub fn schur_complement(m: &Matrix, pivot: &[usize]) -> Result<SchurComplement> {
    if !m.is_square() {
        return Err(Error::BadDimension {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dim = m.rows();
    if pivot.iter().any(|&i| i >= dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: pivot.iter().copied().max().unwrap_or(0) + 1,
        });
    }
    let rest: Vec<usize> = (0..dim).filter(|i| !pivot.contains(i)).collect();
    let p = m.principal(pivot);
    let e = sym_eigen(&p.symmetrize());
    let smax = e.values.iter().fold(0.0f64, |a, &b| a.max(abs(b)));
    let smin = e.values.iter().fold(f64::INFINITY, |a, &b| a.min(abs(b)));
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(smin > PIVOT_RTOL * smax) {
        return Err(Error::SingularPivot {
            smallest_singular_value: smin,
            condition,
        });
    }
    let q = m.principal(&rest);
    let y = m.select(&rest, pivot);
    let x = m.select(pivot, &rest);
    let pinv_x = solve(&p, &x).map_err(|_| Error::SingularPivot {
        smallest_singular_value: smin,
        condition,
    })?;
    let mut out = &q - &(&y * &pinv_x);
    if m.asymmetry() == 0.0 {
        out = out.symmetrize();
    }
    Ok(SchurComplement {
        matrix: out,
        indices: rest,
        pivot_min_singular_value: smin,
        pivot_condition: condition,
    })
}

/// Schur complement of a Hermitian matrix, computed on its real embedding.
pub fn schur_complement_herm(h: &HermMatrix, pivot: &[usize]) -> Result<HermMatrix> {
    let d = h.dim();
    let emb_pivot: Vec<usize> = pivot
        .iter()
        .copied()
        .chain(pivot.iter().map(|i| i + d))
        .collect();
    let sc = schur_complement(&h.embed(), &emb_pivot)?;
    let k = d - pivot.len();
    let x = &sc.matrix;
    Ok(HermMatrix {
        re: Matrix::from_fn(k, k, |i, j| x[(i, j)]),
        im: Matrix::from_fn(k, k, |i, j| x[(k + i, j)]),
    })
}

/// `Sigma_party V Sigma_party`.
pub fn partial_transpose(v: &Matrix, partition: &ModePartition, party: &str) -> Result<Matrix> {
    let n = check_even_square(v)?;
    if partition.n_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n_modes(),
        });
    }
    Ok(MomentumFlip::for_party(partition, party)?.conjugate(v))
}

/// Direct sum of two `xxpp` matrices as one `xxpp` matrix on `n1 + n2`
/// modes (system 2's modes appended after system 1's).
pub fn direct_sum_cm(v1: &Matrix, v2: &Matrix) -> Result<Matrix> {
    let n1 = check_even_square(v1)?;
    let n2 = check_even_square(v2)?;
    let n = n1 + n2;
    let first: Vec<usize> = (0..n1).collect();
    let second: Vec<usize> = (n1..n).collect();
    let mut out = Matrix::zeros(2 * n, 2 * n);
    let i1 = mode_indices(&first, n);
    let i2 = mode_indices(&second, n);
    out.add_block(&i1, &i1, v1);
    out.add_block(&i2, &i2, v2);
    Ok(out)
}

/// Direct sum with party bookkeeping; equal party names merge.
pub fn direct_sum(
    v1: &Matrix,
    p1: &ModePartition,
    v2: &Matrix,
    p2: &ModePartition,
) -> Result<(Matrix, ModePartition)> {
    for (v, p) in [(v1, p1), (v2, p2)] {
        if v.rows() != 2 * p.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * p.n_modes(),
                found: v.rows(),
            });
        }
    }
    Ok((direct_sum_cm(v1, v2)?, p1.concat(p2)))
}

/// `k`-fold direct sum of `v` with itself.
pub fn copies(v: &Matrix, p: &ModePartition, k: usize) -> Result<(Matrix, ModePartition)> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "copy count must be positive".into(),
        ));
    }
    let mut acc = (v.clone(), p.clone());
    for _ in 1..k {
        acc = direct_sum(&acc.0, &acc.1, v, p)?;
    }
    Ok(acc)
}

/// Principal submatrix on the modes of the kept parties.
pub fn partial_trace(
    v: &Matrix,
    partition: &ModePartition,
    keep: &[&str],
) -> Result<(Matrix, ModePartition)> {
    let n = check_even_square(v)?;
    if partition.n_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n_modes(),
        });
    }
    let (p, modes) = partition.restrict(keep)?;
    Ok((v.principal(&mode_indices(&modes, n)), p))
}

/// Submatrix on an explicit list of modes.
pub fn reduce_to_modes(v: &Matrix, modes: &[usize]) -> Matrix {
    v.principal(&mode_indices(modes, v.rows() / 2))
}

/// `max |S Omega S^T - Omega|`.
pub fn symplectic_residual(s: &Matrix) -> Result<f64> {
    let n = check_even_square(s)?;
    let om = omega_matrix(n);
    Ok((&s.congruence(&om) - &om).max_abs())
}

pub fn check_symplectic(s: &Matrix, tol: f64) -> Result<()> {
    let residual = symplectic_residual(s)?;
    if residual > tol {
        return Err(Error::NotSymplectic { residual });
    }
    Ok(())
}

/// Embeds a symplectic `s` acting on `modes` into the identity on `n` modes.
pub fn embed_symplectic(s: &Matrix, modes: &[usize], n: usize) -> Matrix {
    let idx = mode_indices(modes, n);
    let mut out = Matrix::identity(2 * n);
    for &i in &idx {
        out[(i, i)] = 0.0;
    }
    out.add_block(&idx, &idx, s);
    out
}
