//! Dense primal-dual interior-point solver for small linear matrix
//! inequality problems.
//!
//! Problems are posed over a real decision vector `y`:
//!
//! ```text
//! minimize    c^T y
//! subject to  Z_j = F0_j + sum_i y_i F_ij  >= 0      (Hermitian blocks)
//!             a_k + b_k^T y                 >= 0      (scalar constraints)
//! ```
//!
//! with dual
//!
//! ```text
//! maximize    -sum_j tr(F0_j X_j)
//! subject to  sum_j tr(F_ij X_j) = c_i,   X_j >= 0.
//! ```
//!
//! Complex blocks are solved through their real symmetric embedding and the
//! dual matrices are mapped back so that `tr(H X_j)` is preserved.

mod bisect;
mod ipm;
mod text;

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{HermMatrix, Matrix};
use crate::{Error, Result};

pub use bisect::{feasibility_bisect, Bisection};
pub use ipm::solve;
pub use text::{from_lmi_text, to_lmi_text};

/// One affine Hermitian constraint `F0 + sum_i y_i F_i >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiBlock {
    pub constant: HermMatrix,
    /// One entry per decision variable; `None` stands for a zero matrix.
    pub coeffs: Vec<Option<HermMatrix>>,
}

impl LmiBlock {
    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn is_real(&self) -> bool {
        self.constant.is_real() && self.coeffs.iter().flatten().all(HermMatrix::is_real)
    }

    /// `F0 + sum_i y_i F_i`.
    pub fn evaluate(&self, y: &[f64]) -> HermMatrix {
        let mut z = self.constant.clone();
        for (c, &yi) in self.coeffs.iter().zip(y) {
            if let Some(c) = c {
                z = z.add(&c.scale(yi));
            }
        }
        z
    }
}

/// Scalar constraint `constant + coeffs^T y >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarConstraint {
    pub constant: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    pub scalars: Vec<ScalarConstraint>,
}

impl SdpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            n_vars: objective.len(),
            objective,
            blocks: Vec::new(),
            scalars: Vec::new(),
        }
    }

    pub fn add_block(
        &mut self,
        constant: HermMatrix,
        coeffs: Vec<Option<HermMatrix>>,
    ) -> &mut Self {
        self.blocks.push(LmiBlock { constant, coeffs });
        self
    }

    pub fn add_scalar(&mut self, constant: f64, coeffs: Vec<f64>) -> &mut Self {
        self.scalars.push(ScalarConstraint { constant, coeffs });
        self
    }

    /// `y_index >= lower`.
    pub fn add_lower_bound(&mut self, index: usize, lower: f64) -> &mut Self {
        let mut coeffs = alloc::vec![0.0; self.n_vars];
        coeffs[index] = 1.0;
        self.add_scalar(-lower, coeffs)
    }

    /// `y_index <= upper`.
    pub fn add_upper_bound(&mut self, index: usize, upper: f64) -> &mut Self {
        let mut coeffs = alloc::vec![0.0; self.n_vars];
        coeffs[index] = -1.0;
        self.add_scalar(upper, coeffs)
    }

    /// Structural checks: shapes, coefficient counts, Hermiticity to 1e-12.
    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.n_vars {
            return Err(Error::MalformedProblem(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.n_vars
            )));
        }
        if self.blocks.is_empty() && self.scalars.is_empty() {
            return Err(Error::MalformedProblem("no constraints".into()));
        }
        for (j, b) in self.blocks.iter().enumerate() {
            let d = b.dim();
            if d == 0 {
                return Err(Error::MalformedProblem(format!("block {j} is empty")));
            }
            if b.coeffs.len() != self.n_vars {
                return Err(Error::MalformedProblem(format!(
                    "block {j} has {} coefficients for {} variables",
                    b.coeffs.len(),
                    self.n_vars
                )));
            }
            for h in core::iter::once(&b.constant).chain(b.coeffs.iter().flatten()) {
                if h.dim() != d || h.im.rows() != d || h.re.cols() != d {
                    return Err(Error::MalformedProblem(format!(
                        "block {j} has inconsistent sizes"
                    )));
                }
                let defect = h.hermitian_defect();
                if defect > 1e-12 {
                    return Err(Error::MalformedProblem(format!(
                        "block {j} has a non-Hermitian matrix (defect {defect:e})"
                    )));
                }
            }
        }
        for (k, s) in self.scalars.iter().enumerate() {
            if s.coeffs.len() != self.n_vars {
                return Err(Error::MalformedProblem(format!(
                    "scalar constraint {k} has {} coefficients",
                    s.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Nesterov-Todd scaling with a Mehrotra predictor-corrector.
    NesterovTodd,
    /// Helmberg-Kojima-Monteiro direction with a Mehrotra predictor-corrector.
    Hkm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub algorithm: Algorithm,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    pub keep_history: bool,
    /// A run that stalls at an iterate within these looser tolerances is
    /// reported as [`SdpStatus::NearOptimal`].
    pub near_feas_tol: f64,
    pub near_gap_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 200,
            algorithm: Algorithm::NesterovTodd,
            step_fraction: 0.98,
            keep_history: true,
            near_feas_tol: 1e-7,
            near_gap_tol: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// No `y` makes every block PSD; see [`SdpSolution::farkas`].
    Infeasible,
    /// The objective decreases without bound along a feasible ray.
    Unbounded,
    /// Round-off stalled the method, but the returned iterate meets every
    /// tolerance at the looser [`SdpOptions::near_feas_tol`] and
    /// [`SdpOptions::near_gap_tol`].
    NearOptimal,
    NumericalFailure,
}

/// Snapshot of one interior-point iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateRecord {
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `sum_j <X_j, Z_j>`.
    pub complementarity: f64,
    /// `||Z - F0 - F(y)||_F` (absolute).
    pub primal_residual: f64,
    /// `||F*(X) - c||_2` (absolute).
    pub dual_residual: f64,
    pub relative_primal_infeasibility: f64,
    pub relative_dual_infeasibility: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub y: Vec<f64>,
    /// Dual matrix `X_j` of every LMI block, Hermitian, PSD.
    pub duals: Vec<HermMatrix>,
    /// Dual multipliers of the scalar constraints.
    pub scalar_duals: Vec<f64>,
    /// Slack `Z_j` of every LMI block at the returned `y`.
    pub slacks: Vec<HermMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `primal_objective - dual_objective`.
    pub gap: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    /// When `status == Infeasible`: normalized `X` with `F*(X) ~ 0` and
    /// `tr(F0 X) = -1`.
    pub farkas: Option<Vec<HermMatrix>>,
    pub history: Vec<IterateRecord>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    /// Optimal or near-optimal.
    pub fn is_solved(&self) -> bool {
        matches!(self.status, SdpStatus::Optimal | SdpStatus::NearOptimal)
    }

    /// Converts a status other than optimal or near-optimal into
    /// [`Error::Solver`].
    pub fn require_optimal(self) -> Result<Self> {
        if self.is_solved() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                iterations: self.iterations,
                gap: self.gap,
            })
        }
    }
}

/// `[[Re H, -Im H], [Im H, Re H]]`, rejecting non-Hermitian input.
pub fn embed_hermitian(h: &HermMatrix, tol: f64) -> Result<Matrix> {
    let defect = h.hermitian_defect();
    if defect > tol {
        return Err(Error::NotSymmetric { defect });
    }
    Ok(h.embed())
}

#[cfg(test)]
mod tests;
