//! Free cones of covariance matrices and the `kappa` / `upsilon` quantifiers.
//!
//! A cone is described by linear maps `f`, `g` of an auxiliary real
//! variable `Q` and constant Hermitian matrices `C`, `D`:
//!
//! ```text
//! V is free  <=>  exists Q:  V >= f(Q) + C,  g(Q) >= D
//! ```
//!
//! `Q` is a vector of coordinates; `f` and `g` are stored as the images of
//! the coordinate basis, so user-defined cones fit the same mould.
//!
//! ```text
//! kappa(V)   = min { xi >= 1 : xi V is free }
//! upsilon(V) = max { zeta : V >= f(Q') + zeta C, g(Q') >= zeta D }
//! ```
//!
//! with `kappa = max(1, 1/upsilon)`. The dual of the `upsilon` program
//! yields a witness `(W, Y)`: `<W, C> + <Y, D> = 1`, `f^T(W) = g^T(Y)`, and
//! `<W, V> < 1` certifies that `V` is not free.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::{sym_eigen, HermMatrix, Matrix};
use crate::math::ln;
use crate::partition::ModePartition;
use crate::sdp::{self, feasibility_bisect, SdpOptions, SdpProblem};
use crate::symplectic::{
    embedded_omega, mode_indices, omega_matrix, partial_transpose, schur_complement,
    symplectic_eigenvalues,
};
use crate::{Error, Result};

/// The resource theories with built-in cones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    Nonclassicality,
    /// Positivity of the partial transpose across `A|B`.
    Ppt,
    /// Separability across `A|B`, full two-block form.
    Separability,
    /// Separability across `A|B`, reduced to a single auxiliary block.
    SeparabilitySimplified,
    /// `A -> B` unsteerability.
    Steering,
}

impl Theory {
    pub const ALL: [Theory; 5] = [
        Theory::Nonclassicality,
        Theory::Ppt,
        Theory::Separability,
        Theory::SeparabilitySimplified,
        Theory::Steering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theory::Nonclassicality => "nonclassicality",
            Theory::Ppt => "ppt",
            Theory::Separability => "separability",
            Theory::SeparabilitySimplified => "separability_simplified",
            Theory::Steering => "steering",
        }
    }

    pub fn has_analytic(self) -> bool {
        matches!(
            self,
            Theory::Nonclassicality | Theory::Ppt | Theory::Steering
        )
    }

    pub fn is_bipartite(self) -> bool {
        self != Theory::Nonclassicality
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "nonclassicality" | "squeezing" | "classical" => Ok(Theory::Nonclassicality),
            "ppt" | "entanglement_ppt" => Ok(Theory::Ppt),
            "separability" | "sep" | "entanglement" => Ok(Theory::Separability),
            "separability_simplified" | "sep_simplified" => Ok(Theory::SeparabilitySimplified),
            "steering" | "unsteerability" => Ok(Theory::Steering),
            other => Err(Error::InvalidParameter(format!("unknown theory `{other}`"))),
        }
    }
}

/// Placement of one real symmetric block of the auxiliary variable.
#[derive(Clone, Debug, PartialEq)]
pub struct QBlock {
    pub party: String,
    /// Size of the block (`2 n_party`).
    pub dim: usize,
    /// First coordinate of this block in the `Q` vector.
    pub offset: usize,
}

impl QBlock {
    pub fn n_coords(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }
}

/// The data `(f, g, C, D)` of one free cone.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeConeSpec {
    /// `None` for user-defined cones.
    pub theory: Option<Theory>,
    pub partition: ModePartition,
    /// `(A, B)` party names for bipartite theories.
    pub parties: Option<(String, String)>,
    pub c: HermMatrix,
    /// Constant of the `g` inequality; dimension 0 when there is none.
    pub d: HermMatrix,
    /// `f(e_k)` for every coordinate `k` of `Q`, each `2N x 2N`.
    pub f_basis: Vec<HermMatrix>,
    /// `g(e_k)` for every coordinate `k`, each the size of `d`.
    pub g_basis: Vec<HermMatrix>,
    pub q_blocks: Vec<QBlock>,
}

/// Unit symmetric matrix with ones at `(i, j)` and `(j, i)`.
fn unit_sym(dim: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

/// Basis of real symmetric matrices on the rows `idx` of a `dim`-sized space.
fn sym_basis(dim: usize, idx: &[usize]) -> Vec<HermMatrix> {
    let mut out = Vec::new();
    for a in 0..idx.len() {
        for b in a..idx.len() {
            out.push(HermMatrix::from_real(unit_sym(dim, idx[a], idx[b])));
        }
    }
    out
}

/// The spec for a built-in theory; `A` and `B` are the two parties of the
/// partition in order of appearance (steering runs `A -> B`).
pub fn cone_spec(theory: Theory, partition: &ModePartition) -> Result<FreeConeSpec> {
    if theory.is_bipartite() {
        let (a, b) = partition.bipartition()?;
        cone_spec_between(theory, partition, &a, &b)
    } else {
        build_spec(theory, partition, None)
    }
}

/// Like [`cone_spec`] with the two parties named explicitly.
pub fn cone_spec_between(
    theory: Theory,
    partition: &ModePartition,
    a: &str,
    b: &str,
) -> Result<FreeConeSpec> {
    if !theory.is_bipartite() {
        return build_spec(theory, partition, None);
    }
    if a == b {
        return Err(Error::InvalidPartition(
            "the two parties must differ".into(),
        ));
    }
    let parties = partition.parties();
    if parties.len() != 2 {
        return Err(Error::InvalidPartition(format!(
            "{theory} needs exactly two parties, found {}",
            parties.len()
        )));
    }
    for p in [a, b] {
        if !partition.contains(p) {
            return Err(Error::UnknownParty(p.to_string()));
        }
    }
    build_spec(theory, partition, Some((a.to_string(), b.to_string())))
}

fn build_spec(
    theory: Theory,
    partition: &ModePartition,
    parties: Option<(String, String)>,
) -> Result<FreeConeSpec> {
    let n = partition.n_modes();
    let dim = 2 * n;
    let mut spec = FreeConeSpec {
        theory: Some(theory),
        partition: partition.clone(),
        parties: parties.clone(),
        c: HermMatrix::zeros(dim),
        d: HermMatrix::zeros(0),
        f_basis: Vec::new(),
        g_basis: Vec::new(),
        q_blocks: Vec::new(),
    };
    let Some((a, b)) = parties else {
        spec.c = HermMatrix::from_real(Matrix::identity(dim));
        return Ok(spec);
    };
    let ma = partition.modes_of(&a)?;
    let mb = partition.modes_of(&b)?;
    let om_a = embedded_omega(n, &ma);
    let om_b = embedded_omega(n, &mb);
    match theory {
        Theory::Nonclassicality => unreachable!("handled above"),
        Theory::Ppt => {
            spec.c = HermMatrix::from_imag(&om_a - &om_b);
        }
        Theory::Steering => {
            spec.c = HermMatrix::from_imag(om_b);
        }
        Theory::Separability => {
            spec.d = HermMatrix::from_imag(&om_a + &om_b);
            let mut offset = 0;
            for (party, modes) in [(&a, &ma), (&b, &mb)] {
                let idx = mode_indices(modes, n);
                let basis = sym_basis(dim, &idx);
                spec.q_blocks.push(QBlock {
                    party: party.clone(),
                    dim: idx.len(),
                    offset,
                });
                offset += basis.len();
                spec.g_basis.extend(basis.iter().cloned());
                spec.f_basis.extend(basis);
            }
        }
        Theory::SeparabilitySimplified => {
            spec.c = HermMatrix::from_imag(om_b);
            let na = ma.len();
            spec.d = HermMatrix::from_imag(omega_matrix(na));
            let idx = mode_indices(&ma, n);
            let local: Vec<usize> = (0..2 * na).collect();
            spec.f_basis = sym_basis(dim, &idx);
            spec.g_basis = sym_basis(2 * na, &local);
            spec.q_blocks.push(QBlock {
                party: a.clone(),
                dim: 2 * na,
                offset: 0,
            });
        }
    }
    Ok(spec)
}

impl FreeConeSpec {
    /// A user-defined cone. `f_basis[k]` and `g_basis[k]` are the images of
    /// the `k`-th coordinate of `Q`; `d` may be `0 x 0` when there is no
    /// `g` inequality.
    pub fn custom(
        partition: ModePartition,
        c: HermMatrix,
        d: HermMatrix,
        f_basis: Vec<HermMatrix>,
        g_basis: Vec<HermMatrix>,
    ) -> Result<Self> {
        let dim = 2 * partition.n_modes();
        let spec = Self {
            theory: None,
            partition,
            parties: None,
            c,
            d,
            f_basis,
            g_basis,
            q_blocks: Vec::new(),
        };
        if spec.c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: spec.c.dim(),
            });
        }
        if spec.f_basis.len() != spec.g_basis.len() && spec.d.dim() > 0 {
            return Err(Error::InvalidParameter(
                "f and g need one image per coordinate".into(),
            ));
        }
        for h in spec.f_basis.iter().chain(core::iter::once(&spec.c)) {
            if h.dim() != dim || h.hermitian_defect() > 1e-12 {
                return Err(Error::InvalidParameter(
                    "f images and C must be Hermitian 2N x 2N".into(),
                ));
            }
        }
        for h in spec.g_basis.iter().chain(core::iter::once(&spec.d)) {
            if h.dim() != spec.d.dim() || h.hermitian_defect() > 1e-12 {
                return Err(Error::InvalidParameter(
                    "g images and D must be Hermitian and match D".into(),
                ));
            }
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn n_modes(&self) -> usize {
        self.partition.n_modes()
    }

    /// Number of real coordinates of `Q`.
    pub fn n_q(&self) -> usize {
        self.f_basis.len()
    }

    pub fn has_g(&self) -> bool {
        self.d.dim() > 0
    }

    pub fn f(&self, q: &[f64]) -> HermMatrix {
        combine(self.dim(), &self.f_basis, q)
    }

    pub fn g(&self, q: &[f64]) -> HermMatrix {
        combine(self.d.dim(), &self.g_basis, q)
    }

    /// `f^T(W)`: the coordinates `<f(e_k), W>`.
    pub fn f_adjoint(&self, w: &HermMatrix) -> Vec<f64> {
        self.f_basis.iter().map(|b| b.inner(w)).collect()
    }

    pub fn g_adjoint(&self, y: &HermMatrix) -> Vec<f64> {
        self.g_basis.iter().map(|b| b.inner(y)).collect()
    }

    /// Assembles the real symmetric matrix of one `Q` block from coordinates.
    pub fn q_block_matrix(&self, q: &[f64], block: &QBlock) -> Matrix {
        let mut m = Matrix::zeros(block.dim, block.dim);
        let mut k = block.offset;
        for a in 0..block.dim {
            for b in a..block.dim {
                m[(a, b)] = q[k];
                m[(b, a)] = q[k];
                k += 1;
            }
        }
        m
    }

    fn check_dim(&self, v: &Matrix) -> Result<()> {
        if !v.is_square() || v.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.rows(),
            });
        }
        Ok(())
    }
}

fn combine(dim: usize, basis: &[HermMatrix], q: &[f64]) -> HermMatrix {
    let mut out = HermMatrix::zeros(dim);
    for (b, &x) in basis.iter().zip(q) {
        if x != 0.0 {
            out = out.add(&b.scale(x));
        }
    }
    out
}

/// Largest `t` with `V - f(Q) - C >= t I` and `g(Q) - D >= t I` for some
/// `Q`, capped at 1. `V` is free iff the margin is non-negative.
pub fn membership_margin(v: &Matrix, spec: &FreeConeSpec, opts: &SdpOptions) -> Result<f64> {
    spec.check_dim(v)?;
    let vh = HermMatrix::from_real(v.symmetrize());
    if spec.n_q() == 0 {
        let mut t = vh.sub(&spec.c).min_eigenvalue();
        if spec.has_g() {
            t = t.min(spec.d.scale(-1.0).min_eigenvalue());
        }
        return Ok(t.min(1.0));
    }
    let k = spec.n_q();
    let mut obj = vec![0.0; 1 + k];
    obj[0] = -1.0;
    let mut p = SdpProblem::new(obj);
    let dim = spec.dim();
    let mut coeffs = Vec::with_capacity(1 + k);
    coeffs.push(Some(HermMatrix::from_real(
        Matrix::identity(dim).scale(-1.0),
    )));
    coeffs.extend(spec.f_basis.iter().map(|b| Some(b.scale(-1.0))));
    p.add_block(vh.sub(&spec.c), coeffs);
    if spec.has_g() {
        let dg = spec.d.dim();
        let mut coeffs = Vec::with_capacity(1 + k);
        coeffs.push(Some(HermMatrix::from_real(
            Matrix::identity(dg).scale(-1.0),
        )));
        coeffs.extend(spec.g_basis.iter().cloned().map(Some));
        p.add_block(spec.d.scale(-1.0), coeffs);
    }
    p.add_upper_bound(0, 1.0);
    let sol = sdp::solve(&p, opts)?.require_optimal()?;
    Ok(sol.y[0])
}

/// Default slack for [`membership`]; boundary points of the cone (pure
/// product states, for instance) sit at margin zero and the solver only
/// resolves it to a few `1e-9`.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// `V` belongs to the cone up to `tol` (boundary points count as members).
pub fn membership(v: &Matrix, spec: &FreeConeSpec, tol: f64) -> Result<bool> {
    Ok(membership_margin(v, spec, &SdpOptions::default())? >= -tol)
}

/// How `kappa` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed form when the theory has one, SDP otherwise.
    Auto,
    Analytic,
    Sdp,
    /// Bisection over `xi` with a membership oracle.
    Bisection,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaOptions {
    pub method: Method,
    pub sdp: SdpOptions,
    /// `kappa <= 1 + member_tol` classifies the state as free.
    pub member_tol: f64,
    pub bisect_rel_tol: f64,
    /// Membership margins down to `-bisect_margin_tol` count as feasible
    /// during bisection; this absorbs the solver's accuracy on boundary
    /// points such as the upper bracket end.
    pub bisect_margin_tol: f64,
    /// Also solve the `upsilon` program for a witness (SDP method only).
    pub witness: bool,
}

impl Default for KappaOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            sdp: SdpOptions::default(),
            member_tol: 1e-7,
            bisect_rel_tol: 1e-9,
            bisect_margin_tol: 1e-8,
            witness: true,
        }
    }
}

/// Dual certificate of the `upsilon` program.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub w: HermMatrix,
    /// Present when the cone has a `g` inequality.
    pub y: Option<HermMatrix>,
    /// `<W, C> + <Y, D>`, equal to 1 for a feasible dual point.
    pub normalization: f64,
    /// `max |f^T(W) - g^T(Y)|`.
    pub adjoint_residual: f64,
    /// `<W, V>`; below 1 certifies that `V` is resourceful.
    pub value: f64,
}

impl Witness {
    pub fn certifies_resource(&self) -> bool {
        self.value < 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonReport {
    pub upsilon: f64,
    /// Auxiliary variable `Q'` at the optimum.
    pub q: Vec<f64>,
    pub witness: Witness,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceReport {
    pub theory: Option<Theory>,
    /// The method that produced `kappa` (never `Auto`).
    pub method: Method,
    pub kappa: f64,
    pub upsilon: Option<f64>,
    pub member: bool,
    /// Unclamped optimum of the scaling (may be below 1 for interior points
    /// when computed analytically).
    pub xi: f64,
    /// Auxiliary variable at the optimum, when an SDP was solved.
    pub q: Option<Vec<f64>>,
    pub witness: Option<Witness>,
    pub iterations: usize,
    pub gap: f64,
}

/// Closed-form `upsilon` for theories that have one.
pub fn analytic_upsilon(v: &Matrix, spec: &FreeConeSpec) -> Result<f64> {
    spec.check_dim(v)?;
    let theory = spec
        .theory
        .filter(|t| t.has_analytic())
        .ok_or_else(|| Error::Unsupported("no closed form for this cone".into()))?;
    match theory {
        Theory::Nonclassicality => Ok(sym_eigen(&v.symmetrize()).min()),
        Theory::Ppt => {
            let (_, b) = spec.parties.as_ref().expect("bipartite spec");
            let vt = partial_transpose(v, &spec.partition, b)?;
            Ok(symplectic_eigenvalues(&vt)?[0])
        }
        Theory::Steering => Ok(steering_eigenvalues(v, spec)?[0]),
        _ => unreachable!("filtered by has_analytic"),
    }
}

/// Symplectic eigenvalues of `V / V_A` for a steering spec.
fn steering_eigenvalues(v: &Matrix, spec: &FreeConeSpec) -> Result<Vec<f64>> {
    let (a, _) = spec
        .parties
        .as_ref()
        .ok_or_else(|| Error::InvalidPartition("steering needs two parties".into()))?;
    let n = spec.n_modes();
    let ma = spec.partition.modes_of(a)?;
    let sc = schur_complement(&v.symmetrize(), &mode_indices(&ma, n))?;
    symplectic_eigenvalues(&sc.matrix)
}

/// `min xi` SDP: returns `(xi, Q, iterations, gap)`.
fn kappa_sdp(
    v: &Matrix,
    spec: &FreeConeSpec,
    opts: &SdpOptions,
) -> Result<(f64, Vec<f64>, usize, f64)> {
    let k = spec.n_q();
    let mut obj = vec![0.0; 1 + k];
    obj[0] = 1.0;
    let mut p = SdpProblem::new(obj);
    let mut coeffs = Vec::with_capacity(1 + k);
    coeffs.push(Some(HermMatrix::from_real(v.symmetrize())));
    coeffs.extend(spec.f_basis.iter().map(|b| Some(b.scale(-1.0))));
    p.add_block(spec.c.scale(-1.0), coeffs);
    if spec.has_g() {
        let mut coeffs = Vec::with_capacity(1 + k);
        coeffs.push(None);
        coeffs.extend(spec.g_basis.iter().cloned().map(Some));
        p.add_block(spec.d.scale(-1.0), coeffs);
    }
    p.add_lower_bound(0, 1.0);
    let sol = sdp::solve(&p, opts)?.require_optimal()?;
    Ok((sol.y[0], sol.y[1..].to_vec(), sol.iterations, sol.gap))
}

/// Solves the linearized `upsilon` program and its dual.
pub fn upsilon(v: &Matrix, spec: &FreeConeSpec, opts: &SdpOptions) -> Result<UpsilonReport> {
    spec.check_dim(v)?;
    let k = spec.n_q();
    let mut obj = vec![0.0; 1 + k];
    obj[0] = -1.0;
    let mut p = SdpProblem::new(obj);
    let vh = HermMatrix::from_real(v.symmetrize());
    let c_zero = spec.c.re.max_abs() == 0.0 && spec.c.im.max_abs() == 0.0;
    let mut coeffs = Vec::with_capacity(1 + k);
    coeffs.push(if c_zero {
        None
    } else {
        Some(spec.c.scale(-1.0))
    });
    coeffs.extend(spec.f_basis.iter().map(|b| Some(b.scale(-1.0))));
    p.add_block(vh.clone(), coeffs);
    if spec.has_g() {
        let mut coeffs = Vec::with_capacity(1 + k);
        coeffs.push(Some(spec.d.scale(-1.0)));
        coeffs.extend(spec.g_basis.iter().cloned().map(Some));
        p.add_block(HermMatrix::zeros(spec.d.dim()), coeffs);
    }
    let sol = sdp::solve(&p, opts)?;
    if sol.status == sdp::SdpStatus::Unbounded {
        return Err(Error::Unsupported(
            "upsilon is unbounded for this cone".into(),
        ));
    }
    let sol = sol.require_optimal()?;
    let w = sol.duals[0].clone();
    let y = spec.has_g().then(|| sol.duals[1].clone());
    let mut normalization = w.inner(&spec.c);
    let mut adj = spec.f_adjoint(&w);
    if let Some(y) = &y {
        normalization += y.inner(&spec.d);
        for (a, b) in adj.iter_mut().zip(spec.g_adjoint(y)) {
            *a -= b;
        }
    }
    let adjoint_residual = adj.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let value = w.inner(&vh);
    Ok(UpsilonReport {
        upsilon: sol.y[0],
        q: sol.y[1..].to_vec(),
        witness: Witness {
            w,
            y,
            normalization,
            adjoint_residual,
            value,
        },
        primal_objective: sol.primal_objective,
        dual_objective: sol.dual_objective,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}

/// `max(1, ||V^{-1}|| ||W0||)`, an upper bound on `kappa` for any cone that
/// contains `W0`.
pub fn kappa_upper_bound(v: &Matrix, w0: &Matrix) -> Result<f64> {
    let e = sym_eigen(&v.symmetrize());
    if !(e.min() > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: e.min(),
        });
    }
    let ew = sym_eigen(&w0.symmetrize());
    let w_norm = ew.max().abs().max(ew.min().abs());
    Ok((w_norm / e.min()).max(1.0))
}

pub fn kappa(v: &Matrix, spec: &FreeConeSpec, method: Method) -> Result<ResourceReport> {
    kappa_with(
        v,
        spec,
        &KappaOptions {
            method,
            ..KappaOptions::default()
        },
    )
}

pub fn kappa_with(v: &Matrix, spec: &FreeConeSpec, opts: &KappaOptions) -> Result<ResourceReport> {
    spec.check_dim(v)?;
    let analytic_ok = spec.theory.is_some_and(Theory::has_analytic);
    let method = match opts.method {
        Method::Auto if analytic_ok => Method::Analytic,
        Method::Auto => Method::Sdp,
        Method::Analytic if !analytic_ok => {
            return Err(Error::Unsupported(format!(
                "no closed form for {}",
                spec.theory.map_or("a custom cone", Theory::name)
            )))
        }
        m => m,
    };
    let finish = |xi: f64| {
        let kappa = xi.max(1.0);
        (kappa, kappa <= 1.0 + opts.member_tol)
    };
    match method {
        Method::Analytic => {
            let ups = analytic_upsilon(v, spec)?;
            let xi = 1.0 / ups;
            let (kappa, member) = finish(xi);
            Ok(ResourceReport {
                theory: spec.theory,
                method,
                kappa,
                upsilon: Some(ups),
                member,
                xi,
                q: None,
                witness: None,
                iterations: 0,
                gap: 0.0,
            })
        }
        Method::Sdp => {
            let (xi, q, mut iterations, gap) = kappa_sdp(v, spec, &opts.sdp)?;
            let (mut ups, mut witness) = (None, None);
            if opts.witness {
                let u = upsilon(v, spec, &opts.sdp)?;
                iterations += u.iterations;
                ups = Some(u.upsilon);
                witness = Some(u.witness);
            }
            let (kappa, member) = finish(xi);
            Ok(ResourceReport {
                theory: spec.theory,
                method,
                kappa,
                upsilon: ups,
                member,
                xi,
                q: Some(q),
                witness,
                iterations,
                gap,
            })
        }
        Method::Bisection => {
            let hi = kappa_upper_bound(v, &Matrix::identity(spec.dim()))?;
            let mut calls = 0usize;
            let b =
                feasibility_bisect(
                    |xi| {
                        calls += 1;
                        Ok(membership_margin(&v.scale(xi), spec, &opts.sdp)?
                            >= -opts.bisect_margin_tol)
                    },
                    1.0,
                    hi,
                    opts.bisect_rel_tol,
                )?;
            let (kappa, member) = finish(b.value);
            Ok(ResourceReport {
                theory: spec.theory,
                method,
                kappa,
                upsilon: None,
                member,
                xi: b.value,
                q: None,
                witness: None,
                iterations: calls,
                gap: b.widths.last().copied().unwrap_or(0.0),
            })
        }
        Method::Auto => unreachable!("resolved above"),
    }
}

/// Gaussian `A -> B` steerability `-sum_k ln min(1, nu_k(V / V_A))`.
pub fn steerability_n(v: &Matrix, partition: &ModePartition) -> Result<f64> {
    let spec = cone_spec(Theory::Steering, partition)?;
    spec.check_dim(v)?;
    Ok(steering_eigenvalues(v, &spec)?
        .iter()
        .map(|nu| -ln(nu.min(1.0)))
        .sum())
}

/// Outcome of the strict dual feasibility check.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterReport {
    pub strictly_feasible: bool,
    pub w_min_eigenvalue: f64,
    pub y_min_eigenvalue: Option<f64>,
    pub normalization: f64,
    pub adjoint_residual: f64,
}

/// Checks that `W* = I + t C`, `Y* = I + t D` (with `t` fixing the
/// normalization) is a strictly feasible dual point of the `upsilon`
/// program. For the built-in cones this reproduces the usual
/// `1 + (i/2n) Omega` construction.
pub fn slater_check(spec: &FreeConeSpec) -> SlaterReport {
    let cc = spec.c.inner(&spec.c) + spec.d.inner(&spec.d);
    let tr = spec.c.trace() + spec.d.trace();
    let t = if cc > 0.0 { (1.0 - tr) / cc } else { 0.0 };
    let w = HermMatrix::from_real(Matrix::identity(spec.dim())).add(&spec.c.scale(t));
    let y = HermMatrix::from_real(Matrix::identity(spec.d.dim())).add(&spec.d.scale(t));
    let normalization = w.inner(&spec.c) + y.inner(&spec.d);
    let mut adj = spec.f_adjoint(&w);
    if spec.has_g() {
        for (a, b) in adj.iter_mut().zip(spec.g_adjoint(&y)) {
            *a -= b;
        }
    }
    let adjoint_residual = adj.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let w_min = w.min_eigenvalue();
    let y_min = spec.has_g().then(|| y.min_eigenvalue());
    SlaterReport {
        strictly_feasible: w_min > 0.0
            && y_min.is_none_or(|m| m > 0.0)
            && (normalization - 1.0).abs() < 1e-12
            && adjoint_residual < 1e-12,
        w_min_eigenvalue: w_min,
        y_min_eigenvalue: y_min,
        normalization,
        adjoint_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cosh, exp};
    use crate::states::{squeezed_matrix, tmsv_matrix};
    use crate::symplectic::direct_sum_cm;

    fn ab() -> ModePartition {
        ModePartition::bipartite(1, 1).unwrap()
    }

    #[test]
    fn table_rows() {
        let p = ab();
        let nc = cone_spec(Theory::Nonclassicality, &p).unwrap();
        assert_eq!(nc.c.re, Matrix::identity(4));
        assert_eq!(nc.n_q(), 0);
        let st = cone_spec(Theory::Steering, &p).unwrap();
        // Only the x_B / p_B entries (indices 1, 3) are nonzero.
        assert_eq!(st.c.im[(1, 3)], 1.0);
        assert_eq!(st.c.im[(3, 1)], -1.0);
        assert_eq!(st.c.im.max_abs(), 1.0);
        assert_eq!(st.c.im[(0, 2)], 0.0);
        let ppt = cone_spec(Theory::Ppt, &p).unwrap();
        assert_eq!(ppt.c.im[(0, 2)], 1.0);
        assert_eq!(ppt.c.im[(1, 3)], -1.0);
        let sep = cone_spec(Theory::Separability, &p).unwrap();
        assert_eq!(sep.n_q(), 6);
        assert_eq!(sep.c.re.max_abs() + sep.c.im.max_abs(), 0.0);
        assert_eq!(sep.d.im, omega_matrix(2));
        let simp = cone_spec(Theory::SeparabilitySimplified, &p).unwrap();
        assert_eq!(simp.n_q(), 3);
        assert_eq!(simp.d.dim(), 2);
        assert!(cone_spec(Theory::Ppt, &ModePartition::uniform(2, "A").unwrap()).is_err());
    }

    #[test]
    fn f_and_g_are_linear() {
        let p = ModePartition::new(["A", "B", "A"]).unwrap();
        let spec = cone_spec(Theory::Separability, &p).unwrap();
        let k = spec.n_q();
        let q1: Vec<f64> = (0..k).map(|i| libm::sin(i as f64)).collect();
        let q2: Vec<f64> = (0..k).map(|i| libm::cos(3.0 * i as f64)).collect();
        let alpha = -1.7;
        let mix: Vec<f64> = q1.iter().zip(&q2).map(|(a, b)| alpha * a + b).collect();
        let lhs = spec.f(&mix);
        let rhs = spec.f(&q1).scale(alpha).add(&spec.f(&q2));
        assert!(lhs.sub(&rhs).re.max_abs() < 1e-15);
        let lhs = spec.g(&mix);
        let rhs = spec.g(&q1).scale(alpha).add(&spec.g(&q2));
        assert!(lhs.sub(&rhs).re.max_abs() < 1e-15);
        // Q_A occupies x_0, x_2, p_0, p_2.
        let qa = spec.q_block_matrix(&q1, &spec.q_blocks[0]);
        let f = spec.f(&q1);
        let idx = mode_indices(&[0, 2], 3);
        assert!((&f.re.principal(&idx) - &qa).max_abs() < 1e-15);
    }

    #[test]
    fn analytic_benchmarks() {
        let p = ab();
        let sq = squeezed_matrix(0.3, 0.0);
        let one = ModePartition::uniform(1, "A").unwrap();
        let nc = cone_spec(Theory::Nonclassicality, &one).unwrap();
        let r = kappa(&sq, &nc, Method::Auto).unwrap();
        assert!((r.kappa - exp(0.6)).abs() < 1e-12);
        assert!(!r.member);
        let t = tmsv_matrix(0.5);
        let r = kappa(&t, &cone_spec(Theory::Ppt, &p).unwrap(), Method::Analytic).unwrap();
        assert!((r.kappa - exp(1.0)).abs() < 1e-10);
        let r = kappa(
            &t,
            &cone_spec(Theory::Steering, &p).unwrap(),
            Method::Analytic,
        )
        .unwrap();
        assert!((r.kappa - cosh(1.0)).abs() < 1e-10);
        assert!((steerability_n(&t, &p).unwrap() - ln(cosh(1.0))).abs() < 1e-12);
        let vac = Matrix::identity(4);
        for th in [Theory::Nonclassicality, Theory::Ppt, Theory::Steering] {
            let r = kappa(&vac, &cone_spec(th, &p).unwrap(), Method::Auto).unwrap();
            assert_eq!(r.kappa, 1.0);
            assert!(r.member);
        }
        assert_eq!(steerability_n(&vac, &p).unwrap(), 0.0);
    }

    #[test]
    fn sdp_matches_analytic_on_tmsv() {
        let p = ab();
        let t = tmsv_matrix(0.5);
        for th in [Theory::Nonclassicality, Theory::Ppt, Theory::Steering] {
            let spec = cone_spec(th, &p).unwrap();
            let a = kappa(&t, &spec, Method::Analytic).unwrap();
            let s = kappa(&t, &spec, Method::Sdp).unwrap();
            assert!(
                (a.kappa - s.kappa).abs() < 1e-6,
                "{th}: {} vs {}",
                a.kappa,
                s.kappa
            );
            let w = s.witness.unwrap();
            assert!((w.normalization - 1.0).abs() < 1e-7);
            assert!((w.value - a.upsilon.unwrap()).abs() < 1e-6);
            assert!(w.certifies_resource());
        }
    }

    #[test]
    fn separability_of_tmsv_and_products() {
        let p = ab();
        let t = tmsv_matrix(0.5);
        let spec = cone_spec(Theory::Separability, &p).unwrap();
        let s = kappa(&t, &spec, Method::Sdp).unwrap();
        // For TMSV the separability and PPT values coincide.
        assert!((s.kappa - exp(1.0)).abs() < 1e-6, "{}", s.kappa);
        let simp = cone_spec(Theory::SeparabilitySimplified, &p).unwrap();
        let s2 = kappa(&t, &simp, Method::Sdp).unwrap();
        assert!((s2.kappa - s.kappa).abs() < 1e-6);
        assert!(!membership(&t, &spec, MEMBERSHIP_TOL).unwrap());
        let prod =
            direct_sum_cm(&squeezed_matrix(0.4, 0.3), &Matrix::identity(2).scale(2.0)).unwrap();
        assert!(membership(&prod, &spec, MEMBERSHIP_TOL).unwrap());
        assert!(membership(&prod, &simp, MEMBERSHIP_TOL).unwrap());
    }

    #[test]
    fn bisection_agrees() {
        let p = ab();
        let t = tmsv_matrix(0.3);
        for th in [Theory::Ppt, Theory::Separability] {
            let spec = cone_spec(th, &p).unwrap();
            let b = kappa(&t, &spec, Method::Bisection).unwrap();
            assert!((b.kappa - exp(0.6)).abs() < 1e-6, "{th}: {}", b.kappa);
        }
        let one = ModePartition::uniform(1, "A").unwrap();
        let nc = cone_spec(Theory::Nonclassicality, &one).unwrap();
        let b = kappa(&Matrix::identity(2).scale(2.0), &nc, Method::Bisection).unwrap();
        assert_eq!(b.kappa, 1.0);
    }

    #[test]
    fn upper_bound() {
        assert_eq!(
            kappa_upper_bound(&Matrix::identity(2), &Matrix::identity(2)).unwrap(),
            1.0
        );
        let sq = squeezed_matrix(0.3, 0.0);
        let b = kappa_upper_bound(&sq, &Matrix::identity(2)).unwrap();
        assert!((b - exp(0.6)).abs() < 1e-12);
    }

    #[test]
    fn slater_points() {
        let p = ModePartition::new(["A", "B", "B"]).unwrap();
        for th in Theory::ALL {
            let r = slater_check(&cone_spec(th, &p).unwrap());
            assert!(r.strictly_feasible, "{th}: {r:?}");
        }
        // PPT on n modes: W* = I + (i / 2n) * (Omega_A (+) -Omega_B).
        let r = slater_check(&cone_spec(Theory::Ppt, &p).unwrap());
        assert!((r.w_min_eigenvalue - (1.0 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn custom_cone_equals_builtin() {
        let p = ab();
        let ppt = cone_spec(Theory::Ppt, &p).unwrap();
        let custom =
            FreeConeSpec::custom(p, ppt.c.clone(), HermMatrix::zeros(0), vec![], vec![]).unwrap();
        let t = tmsv_matrix(0.2);
        let a = kappa(&t, &custom, Method::Auto).unwrap();
        assert_eq!(a.method, Method::Sdp);
        assert!((a.kappa - exp(0.4)).abs() < 1e-6);
        assert!(kappa(&t, &custom, Method::Analytic).is_err());
    }

    #[test]
    fn theory_names_round_trip() {
        for th in Theory::ALL {
            assert_eq!(th.name().parse::<Theory>().unwrap(), th);
        }
        assert!("bogus".parse::<Theory>().is_err());
    }
}
