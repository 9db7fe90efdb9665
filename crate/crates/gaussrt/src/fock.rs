//! Truncated Fock-space oracle for coherent-state overlaps.
//!
//! A single-mode Gaussian state is rebuilt from its thermal decomposition
//!
//! ```text
//! rho = D(alpha) S(zeta) rho_th(nbar) S(zeta)^dag D(alpha)^dag
//! ```
//!
//! with `x = (a + a^dag)/sqrt 2`, `nbar = (nu - 1)/2`, `S(zeta) =
//! exp((zeta^* a^2 - zeta a^dag^2)/2)` and `D(alpha) = exp(alpha a^dag -
//! alpha^* a)`. The operator exponentials are taken on a working space twice
//! the size of the cutoff, then the state is cut to `cutoff + 1` levels.
//! Nothing here reuses the closed-form phase-space formulas of the core
//! crate.

use gaussrt_core::states::GaussianState;
use gaussrt_core::Matrix;
use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

type C64 = Complex<f64>;

pub const DEFAULT_CUTOFF: usize = 60;

#[derive(Debug, Error, PartialEq)]
pub enum FockError {
    #[error("the Fock oracle handles one mode, or two uncorrelated modes")]
    Unsupported,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("cutoff {cutoff} too small: truncation bound {bound:e} exceeds {tol:e}")]
    CutoffInsufficient { cutoff: usize, bound: f64, tol: f64 },
    #[error("covariance matrix is not positive definite")]
    NotPositive,
}

/// Overlap value with its truncation bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockValue {
    pub value: f64,
    pub truncation_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockOracle {
    /// Highest photon number kept.
    pub cutoff: usize,
    /// Largest acceptable truncation bound.
    pub tail_tol: f64,
}

impl Default for FockOracle {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            tail_tol: 1e-8,
        }
    }
}

/// Truncated single-mode density matrix.
#[derive(Clone, Debug)]
pub struct FockState {
    pub rho: DMatrix<C64>,
    /// `1 - tr(rho)` after truncation.
    pub trace_deficit: f64,
}

fn annihilation(dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `x = (a + a^dag)/sqrt 2` and `p = (a - a^dag)/(i sqrt 2)`.
fn quadratures(dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = annihilation(dim);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * C64::new(s, 0.0);
    let p = (&a - &ad) * C64::new(0.0, -s);
    (x, p)
}

/// Amplitudes `<n|beta>` for `n <= cutoff` and the weight beyond it.
fn coherent_ket(beta: C64, cutoff: usize) -> (DVector<C64>, f64) {
    let m2 = beta.norm_sqr();
    let mut c = DVector::zeros(cutoff + 1);
    let mut amp = C64::new((-0.5 * m2).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            amp = amp * beta / (n as f64).sqrt();
        }
        c[n] = amp;
    }
    // Poisson tail sum_{n > cutoff} e^{-m2} m2^n / n!.
    let mut tail = 0.0;
    let mut term = c[cutoff].norm_sqr();
    for n in cutoff + 1..cutoff + 2000 {
        term *= m2 / n as f64;
        tail += term;
        if term < 1e-300 || term < 1e-18 * tail {
            break;
        }
    }
    (c, tail)
}

/// `alpha` of the coherent state with phase-space mean `(u_x, u_p)`.
pub fn amplitude(u: &[f64]) -> C64 {
    C64::new(u[0], u[1]) * std::f64::consts::FRAC_1_SQRT_2
}

impl FockOracle {
    pub fn new(cutoff: usize) -> Self {
        Self {
            cutoff,
            ..Self::default()
        }
    }

    /// Density matrix of the single-mode state `(V, s)`.
    pub fn density(&self, v: &Matrix, s: &[f64]) -> Result<FockState, FockError> {
        if v.rows() != 2 || v.cols() != 2 || s.len() != 2 {
            return Err(FockError::Dimension {
                expected: 2,
                found: v.rows(),
            });
        }
        let (a00, a01, a11) = (v[(0, 0)], 0.5 * (v[(0, 1)] + v[(1, 0)]), v[(1, 1)]);
        let det = a00 * a11 - a01 * a01;
        if !(det > 0.0 && a00 > 0.0) {
            return Err(FockError::NotPositive);
        }
        let nu = det.sqrt();
        let half_tr = 0.5 * (a00 + a11);
        let lmax = half_tr + (0.25 * (a00 - a11).powi(2) + a01 * a01).sqrt();
        let r = 0.5 * (lmax / nu).ln();
        // Principal axis of the large eigenvalue; the squeezed axis is
        // orthogonal to it.
        let theta = 0.5 * (2.0 * a01).atan2(a00 - a11) + std::f64::consts::FRAC_PI_2;
        let zeta = C64::from_polar(r, 2.0 * theta);
        let nbar = (0.5 * (nu - 1.0)).max(0.0);

        let w = 2 * (self.cutoff + 1);
        let a = annihilation(w);
        let ad = a.adjoint();
        let sq_gen = (&a * &a * zeta.conj() - &ad * &ad * zeta) * C64::new(0.5, 0.0);
        let alpha = amplitude(s);
        let d_gen = &ad * alpha - &a * alpha.conj();
        let u = d_gen.exp() * sq_gen.exp();

        let mut rho_th = DMatrix::zeros(w, w);
        let q = nbar / (nbar + 1.0);
        let mut p = 1.0 / (nbar + 1.0);
        for k in 0..w {
            rho_th[(k, k)] = C64::new(p, 0.0);
            p *= q;
        }
        let rho_w = &u * rho_th * u.adjoint();
        let m = self.cutoff + 1;
        let rho = rho_w.view((0, 0), (m, m)).into_owned();
        let trace_deficit = 1.0 - rho.trace().re;
        Ok(FockState { rho, trace_deficit })
    }

    /// `<beta|rho|beta>` for the coherent state with mean `u`.
    pub fn single_mode_overlap(
        &self,
        v: &Matrix,
        s: &[f64],
        u: &[f64],
    ) -> Result<FockValue, FockError> {
        if u.len() != 2 {
            return Err(FockError::Dimension {
                expected: 2,
                found: u.len(),
            });
        }
        let st = self.density(v, s)?;
        let (c, ket_tail) = coherent_ket(amplitude(u), self.cutoff);
        let value = (c.adjoint() * &st.rho * &c)[(0, 0)].re;
        // With P the kept levels and Q = 1 - P:
        // |<u|rho|u> - <u|P rho P|u>| <= 2 sqrt(t) + t, t = min(tr Q rho, |Q u|^2).
        let t = st.trace_deficit.abs().min(ket_tail);
        let bound = 2.0 * t.sqrt() + t;
        if bound > self.tail_tol {
            return Err(FockError::CutoffInsufficient {
                cutoff: self.cutoff,
                bound,
                tol: self.tail_tol,
            });
        }
        Ok(FockValue {
            value,
            truncation_bound: bound,
        })
    }

    /// Overlap of a one-mode state, or of a two-mode state without
    /// correlations between the modes (as a product of one-mode overlaps).
    pub fn overlap(&self, state: &GaussianState, u: &[f64]) -> Result<FockValue, FockError> {
        let n = state.n_modes();
        if u.len() != 2 * n {
            return Err(FockError::Dimension {
                expected: 2 * n,
                found: u.len(),
            });
        }
        let v = state.cov();
        match n {
            1 => self.single_mode_overlap(v, &state.s, u),
            2 => {
                let cross = [(0, 1), (0, 3), (2, 1), (2, 3)];
                if cross.iter().any(|&(i, j)| v[(i, j)].abs() > 1e-12) {
                    return Err(FockError::Unsupported);
                }
                let mut value = 1.0f64;
                let mut bound = 0.0;
                for k in 0..2 {
                    let idx = [k, k + 2];
                    let local = v.principal(&idx);
                    let sk = [state.s[k], state.s[k + 2]];
                    let uk = [u[k], u[k + 2]];
                    let f = self.single_mode_overlap(&local, &sk, &uk)?;
                    bound += f.truncation_bound * value.max(f.value);
                    value *= f.value;
                }
                Ok(FockValue {
                    value,
                    truncation_bound: bound,
                })
            }
            _ => Err(FockError::Unsupported),
        }
    }

    /// Mean and covariance matrix recomputed from the truncated state.
    pub fn moments(&self, st: &FockState) -> ([f64; 2], Matrix) {
        let m = st.rho.nrows();
        let (x, p) = quadratures(m);
        let ev = |o: &DMatrix<C64>| (&st.rho * o).trace().re;
        let mean = [ev(&x), ev(&p)];
        let xx = ev(&(&x * &x)) - mean[0] * mean[0];
        let pp = ev(&(&p * &p)) - mean[1] * mean[1];
        let xp = 0.5 * ev(&(&x * &p + &p * &x)) - mean[0] * mean[1];
        (
            mean,
            Matrix::from_rows(&[[2.0 * xx, 2.0 * xp], [2.0 * xp, 2.0 * pp]]),
        )
    }
}

/// [`FockOracle::overlap`] at the default cutoff.
pub fn fock_overlap(state: &GaussianState, u: &[f64]) -> Result<FockValue, FockError> {
    FockOracle::default().overlap(state, u)
}
