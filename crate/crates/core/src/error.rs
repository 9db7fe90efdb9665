use alloc::string::String;

use crate::sdp::SdpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mode count must be positive")]
    ZeroModes,
    #[error("expected a square matrix of even dimension, got {rows}x{cols}")]
    BadDimension { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (max asymmetry {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error(
        "not a quantum covariance matrix: min eigenvalue of V - i*Omega is {min_eigenvalue:e}"
    )]
    NotQcm { min_eigenvalue: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("singular Schur pivot: smallest singular value {smallest_singular_value:e}, condition number {condition:e}")]
    SingularPivot {
        smallest_singular_value: f64,
        condition: f64,
    },
    #[error("Williamson decomposition did not reach tolerance: |SVS^T - D+D| = {congruence_residual:e}, |S Omega S^T - Omega| = {symplectic_residual:e}")]
    Williamson {
        congruence_residual: f64,
        symplectic_residual: f64,
    },
    #[error("matrix is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },
    #[error("unknown party `{0}`")]
    UnknownParty(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed SDP: {0}")]
    MalformedProblem(String),
    #[error(
        "SDP solver stopped with status {status:?} after {iterations} iterations (gap {gap:e})"
    )]
    Solver {
        status: SdpStatus,
        iterations: usize,
        gap: f64,
    },
    #[error("invalid bisection bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
}
