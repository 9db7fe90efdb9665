//! Gaussian quantum resource quantifiers at the level of covariance matrices.
//!
//! Everything here is a pure function over immutable values and builds
//! without `std` (an allocator is required). Matrices are dense, real, and
//! sized for desk-scale problems (a few dozen rows at most).
//!
//! Phase-space vectors use the global `xxpp` ordering
//! `(x_1, ..., x_n, p_1, ..., p_n)`, and covariance matrices are normalized so
//! that the vacuum has `V = I`.
//!
//! Module map:
//!
//! * [`linalg`]: dense real matrices, Hermitian matrices stored as real pairs,
//!   Jacobi eigensolver, Cholesky/LU, matrix exponential.
//! * [`symplectic`]: the symplectic form, QCM validation, Williamson
//!   decomposition, Schur complements, partial transposes and reductions.
//! * [`states`]: standard Gaussian states and phase-space formulas.
//! * [`channels`]: Gaussian channels via Choi covariance matrices or direct
//!   covariance-matrix maps, plus falsification-based free-operation checks.
//! * [`cones`]: free cones, membership, the `kappa`/`upsilon` quantifiers and
//!   second-moment witnesses.
//! * [`sdp`]: a primal-dual interior-point solver for small LMI problems and a
//!   bisection driver for one-parameter feasibility sweeps.
//! * [`sample`]: random covariance matrices, symplectics and PSD kernels.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channels;
pub mod cones;
mod error;
pub mod linalg;
mod math;
pub mod partition;
pub mod sample;
pub mod sdp;
pub mod states;
pub mod symplectic;

pub use error::{Error, Result};
pub use linalg::{HermMatrix, Matrix};
pub use partition::ModePartition;
pub use symplectic::CovMatrix;

/// Default absolute tolerance for `V >= i*Omega` checks.
pub const DEFAULT_TOL: f64 = 1e-9;
