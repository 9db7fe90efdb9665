//! Standard Gaussian states and closed-form phase-space quantities.
//!
//! Displacement vectors use the same `xxpp` ordering and vacuum
//! normalization as covariance matrices, so a coherent state with amplitude
//! `alpha` has mean `sqrt(2) * (Re alpha, Im alpha)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{determinant_pd, inverse_pd, Matrix};
use crate::math::{cos, cosh, exp, sin, sinh, sqrt};
use crate::partition::ModePartition;
use crate::symplectic::{omega_matrix, validate_qcm, CovMatrix};
use crate::{Error, Result};

/// A Gaussian state: covariance matrix, mean vector and party labels.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub v: CovMatrix,
    pub s: Vec<f64>,
    pub partition: ModePartition,
}

impl GaussianState {
    pub fn new(v: CovMatrix, s: Vec<f64>, partition: ModePartition) -> Result<Self> {
        let n = v.n_modes();
        if s.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: s.len(),
            });
        }
        if partition.n_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: partition.n_modes(),
            });
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "displacement must be finite".into(),
            ));
        }
        Ok(Self { v, s, partition })
    }

    pub fn n_modes(&self) -> usize {
        self.v.n_modes()
    }

    pub fn cov(&self) -> &Matrix {
        self.v.matrix()
    }
}

/// Recipes accepted by [`make_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    Vacuum {
        modes: usize,
    },
    /// Vacuum displaced to mean `u` (length `2n`).
    Coherent {
        u: Vec<f64>,
    },
    Thermal {
        nbar: f64,
        modes: usize,
    },
    /// Single-mode squeezed vacuum; `phi` rotates the squeezing axis.
    Squeezed {
        r: f64,
        phi: f64,
    },
    /// Two-mode squeezed vacuum on parties `A|B`.
    Tmsv {
        r: f64,
    },
}

/// Phase-space rotation by `phi` on one mode: `x -> cos x - sin p`.
pub fn rotation(phi: f64) -> Matrix {
    Matrix::from_rows(&[[cos(phi), -sin(phi)], [sin(phi), cos(phi)]])
}

pub fn tmsv_matrix(r: f64) -> Matrix {
    let (c, s) = (cosh(2.0 * r), sinh(2.0 * r));
    Matrix::from_rows(&[
        [c, s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, c, -s],
        [0.0, 0.0, -s, c],
    ])
}

pub fn squeezed_matrix(r: f64, phi: f64) -> Matrix {
    let d = Matrix::from_diag(&[exp(-2.0 * r), exp(2.0 * r)]);
    rotation(phi).congruence(&d).symmetrize()
}

/// Builds a standard state. `partition` overrides the default labels
/// (`A` for every mode, `A|B` for the two-mode squeezed vacuum).
pub fn make_state(kind: &StateKind, partition: Option<ModePartition>) -> Result<GaussianState> {
    let check_r = |r: f64| {
        if r.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("squeezing must be finite".into()))
        }
    };
    let (v, s) = match kind {
        StateKind::Vacuum { modes } => {
            if *modes == 0 {
                return Err(Error::ZeroModes);
            }
            (Matrix::identity(2 * modes), vec![0.0; 2 * modes])
        }
        StateKind::Coherent { u } => {
            if u.is_empty() || u.len() % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "coherent displacement must have even positive length, got {}",
                    u.len()
                )));
            }
            (Matrix::identity(u.len()), u.clone())
        }
        StateKind::Thermal { nbar, modes } => {
            if !(*nbar >= 0.0) || !nbar.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mean photon number {nbar} is negative"
                )));
            }
            if *modes == 0 {
                return Err(Error::ZeroModes);
            }
            (
                Matrix::identity(2 * modes).scale(2.0 * nbar + 1.0),
                vec![0.0; 2 * modes],
            )
        }
        StateKind::Squeezed { r, phi } => {
            check_r(*r)?;
            (squeezed_matrix(*r, *phi), vec![0.0; 2])
        }
        StateKind::Tmsv { r } => {
            check_r(*r)?;
            (tmsv_matrix(*r), vec![0.0; 4])
        }
    };
    let n = v.rows() / 2;
    let partition = match (partition, kind) {
        (Some(p), _) => p,
        (None, StateKind::Tmsv { .. }) => ModePartition::bipartite(1, 1)?,
        (None, _) => ModePartition::uniform(n, "A")?,
    };
    let v = CovMatrix::new(v)?;
    GaussianState::new(v, s, partition)
}

/// `exp(-xi^T Omega^T V Omega xi / 4 + i s^T Omega xi)`.
pub fn characteristic_function(state: &GaussianState, xi: &[f64]) -> Result<Complex64> {
    let n = state.n_modes();
    if xi.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: xi.len(),
        });
    }
    let om_xi = omega_matrix(n).mul_vec(xi);
    let quad = state.cov().quad_form(&om_xi);
    let phase: f64 = state.s.iter().zip(&om_xi).map(|(a, b)| a * b).sum();
    Ok(Complex64::from_polar(exp(-0.25 * quad), phase))
}

/// Probability weight `<u|rho|u>` of the coherent state with mean `u`:
/// `2^n exp(-w^T (V + I)^{-1} w) / sqrt(det(V + I))` with `w = s - u`.
pub fn coherent_overlap(state: &GaussianState, u: &[f64]) -> Result<f64> {
    let n = state.n_modes();
    if u.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: u.len(),
        });
    }
    let vp = state.cov() + &Matrix::identity(2 * n);
    let w: Vec<f64> = state.s.iter().zip(u).map(|(s, u)| s - u).collect();
    let q = inverse_pd(&vp)?.quad_form(&w);
    let det = determinant_pd(&vp)?;
    Ok(crate::math::powi(2.0, n as i32) * exp(-q) / sqrt(det))
}

/// Shifts the mean by `d`; the covariance matrix is untouched.
pub fn displace(state: &GaussianState, d: &[f64]) -> Result<GaussianState> {
    if d.len() != state.s.len() {
        return Err(Error::DimensionMismatch {
            expected: state.s.len(),
            found: d.len(),
        });
    }
    let s = state.s.iter().zip(d).map(|(a, b)| a + b).collect();
    GaussianState::new(state.v.clone(), s, state.partition.clone())
}

/// Checks a state's covariance matrix at a custom tolerance.
pub fn is_physical(state: &GaussianState, tol: f64) -> bool {
    validate_qcm(state.cov(), tol)
        .map(|r| r.valid)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{direct_sum, partial_transpose, symplectic_eigenvalues};

    #[test]
    fn constructors() {
        let vac = make_state(&StateKind::Vacuum { modes: 1 }, None).unwrap();
        assert_eq!(vac.cov(), &Matrix::identity(2));
        assert_eq!(vac.s, vec![0.0, 0.0]);
        let t0 = make_state(&StateKind::Tmsv { r: 0.0 }, None).unwrap();
        assert_eq!(t0.cov(), &Matrix::identity(4));
        assert_eq!(t0.partition.labels(), &["A", "B"]);
        let th = make_state(
            &StateKind::Thermal {
                nbar: 1.0,
                modes: 2,
            },
            None,
        )
        .unwrap();
        assert_eq!(th.cov(), &Matrix::identity(4).scale(3.0));
        let sq = make_state(&StateKind::Squeezed { r: 0.3, phi: 0.0 }, None).unwrap();
        assert!((sq.cov()[(0, 0)] - exp(-0.6)).abs() < 1e-15);
        assert!((sq.cov()[(1, 1)] - exp(0.6)).abs() < 1e-15);
        assert!(make_state(
            &StateKind::Thermal {
                nbar: -0.1,
                modes: 1
            },
            None
        )
        .is_err());
        assert!(make_state(&StateKind::Coherent { u: vec![1.0] }, None).is_err());
    }

    #[test]
    fn rotated_squeezing_keeps_spectrum() {
        let v = squeezed_matrix(0.4, 0.7);
        let e = crate::linalg::sym_eigenvalues(&v);
        assert!((e[0] - exp(-0.8)).abs() < 1e-14);
        assert!((e[1] - exp(0.8)).abs() < 1e-13);
    }

    #[test]
    fn tmsv_transpose_spectrum() {
        let t = make_state(&StateKind::Tmsv { r: 0.5 }, None).unwrap();
        let vt = partial_transpose(t.cov(), &t.partition, "B").unwrap();
        let nu = symplectic_eigenvalues(&vt).unwrap();
        assert!((nu[0] - 0.36787944117144233).abs() < 1e-12);
    }

    #[test]
    fn characteristic_values() {
        let vac = make_state(&StateKind::Vacuum { modes: 1 }, None).unwrap();
        let one = characteristic_function(&vac, &[0.0, 0.0]).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let e = characteristic_function(&vac, &[2.0, 0.0]).unwrap();
        assert!((e.re - exp(-1.0)).abs() < 1e-15 && e.im.abs() < 1e-15);
    }

    #[test]
    fn characteristic_factorizes() {
        let a = make_state(&StateKind::Tmsv { r: 0.3 }, None).unwrap();
        let b = make_state(&StateKind::Squeezed { r: 0.2, phi: 0.4 }, None).unwrap();
        let b = displace(&b, &[0.3, -0.7]).unwrap();
        let (v, p) = direct_sum(a.cov(), &a.partition, b.cov(), &b.partition).unwrap();
        // xxpp of the sum: (xA, xB, x3, pA, pB, p3).
        let s = vec![a.s[0], a.s[1], b.s[0], a.s[2], a.s[3], b.s[1]];
        let ab = GaussianState::new(CovMatrix::new(v).unwrap(), s, p).unwrap();
        let (x1, x2) = ([0.4, -0.2, 0.9, 0.1], [0.5, -1.1]);
        let x = [x1[0], x1[1], x2[0], x1[2], x1[3], x2[1]];
        let lhs = characteristic_function(&ab, &x).unwrap();
        let rhs =
            characteristic_function(&a, &x1).unwrap() * characteristic_function(&b, &x2).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn overlap_trivial_cases() {
        let vac = make_state(&StateKind::Vacuum { modes: 1 }, None).unwrap();
        assert!((coherent_overlap(&vac, &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let d = displace(&vac, &[0.8, -1.3]).unwrap();
        assert!((coherent_overlap(&d, &[0.8, -1.3]).unwrap() - 1.0).abs() < 1e-15);
        // |<alpha|beta>|^2 = exp(-|s - u|^2 / 2) in these units.
        let o = coherent_overlap(&d, &[0.0, 0.0]).unwrap();
        assert!((o - exp(-0.5 * (0.64 + 1.69))).abs() < 1e-15);
        let th = make_state(
            &StateKind::Thermal {
                nbar: 1.0,
                modes: 1,
            },
            None,
        )
        .unwrap();
        assert!((coherent_overlap(&th, &[0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn displace_round_trip() {
        let s = make_state(&StateKind::Squeezed { r: 0.1, phi: 0.0 }, None).unwrap();
        let d = displace(&s, &[1.0, 2.0]).unwrap();
        assert_eq!(displace(&d, &[-1.0, -2.0]).unwrap(), s);
        assert_eq!(displace(&s, &[0.0, 0.0]).unwrap(), s);
    }
}
