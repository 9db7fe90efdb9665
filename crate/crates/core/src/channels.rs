//! Gaussian channels acting on covariance matrices.
//!
//! A channel with a Choi covariance matrix `Gamma` (input modes first) maps
//!
//! ```text
//! V  ->  (Gamma + S V S (+) 0) / (Gamma_in + S V S)
//! ```
//!
//! where `S` flips the input momenta and `/` is the Schur complement on the
//! input block. Unitaries and the identity have no finite Choi matrix, so
//! they (and other closed-form maps) are carried as [`CmMap`]s.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cones::{membership_margin, FreeConeSpec, MEMBERSHIP_TOL};
use crate::linalg::{sym_eigen, HermMatrix, Matrix};
use crate::math::{cos, cosh, sin, sinh, sqrt};
use crate::partition::ModePartition;
use crate::sample::{local_direct_sum, random_member, random_pure};
use crate::sdp::{self, SdpOptions, SdpProblem};
use crate::symplectic::{
    check_symplectic, direct_sum_cm, mode_indices, omega_matrix, reduce_to_modes, schur_complement,
    validate_qcm, MomentumFlip,
};
use crate::{Error, Result, DEFAULT_TOL};

/// Tolerance for the positivity of a noise kernel.
pub const KERNEL_TOL: f64 = 1e-10;

/// Covariance of a random displacement, `K >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseKernel {
    k: Matrix,
}

impl NoiseKernel {
    pub fn new(k: Matrix) -> Result<Self> {
        if !k.is_square() || !k.rows().is_multiple_of(2) || k.rows() == 0 {
            return Err(Error::BadDimension {
                rows: k.rows(),
                cols: k.cols(),
            });
        }
        let defect = k.asymmetry();
        if defect > 1e-12 {
            return Err(Error::NotSymmetric { defect });
        }
        let min = sym_eigen(&k.symmetrize()).min();
        if min < -KERNEL_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { k: k.symmetrize() })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.k
    }
}

/// `V + K`.
pub fn random_displacement(v: &Matrix, k: &NoiseKernel) -> Result<Matrix> {
    if v.rows() != k.k.rows() {
        return Err(Error::DimensionMismatch {
            expected: k.k.rows(),
            found: v.rows(),
        });
    }
    Ok(v + &k.k)
}

/// A channel given by its Choi covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiChannel {
    gamma: Matrix,
    n_in: usize,
    n_out: usize,
    physical: bool,
}

impl ChoiChannel {
    /// Requires `Gamma >= i Omega` within [`DEFAULT_TOL`].
    pub fn new(gamma: Matrix, n_in: usize, n_out: usize) -> Result<Self> {
        Self::with_physicality(gamma, n_in, n_out, false)
    }

    /// With `allow_unphysical`, only `Gamma >= 0` is required; such maps
    /// are positive on covariance matrices but not quantum channels.
    pub fn with_physicality(
        gamma: Matrix,
        n_in: usize,
        n_out: usize,
        allow_unphysical: bool,
    ) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::ZeroModes);
        }
        let dim = 2 * (n_in + n_out);
        if gamma.rows() != dim || gamma.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: gamma.rows(),
            });
        }
        let report = validate_qcm(&gamma, DEFAULT_TOL)?;
        if !report.valid {
            if !allow_unphysical {
                return Err(Error::NotQcm {
                    min_eigenvalue: report.min_eigenvalue,
                });
            }
            let min = sym_eigen(&gamma.symmetrize()).min();
            if min < -DEFAULT_TOL {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: min,
                });
            }
        }
        Ok(Self {
            gamma: gamma.symmetrize(),
            n_in,
            n_out,
            physical: report.valid,
        })
    }

    /// Choi matrix of `V -> X V X^T + Y` built from a two-mode squeezed
    /// resource with squeezing `r`. The induced map is
    /// `Y + X (1 + c V)(c + V)^{-1} X^T` with `c = cosh 2r`, which tends to
    /// the target as `r` grows; the deviation is `O(|1 - V^2| / c)`.
    pub fn from_linear_map(x: &Matrix, y: &Matrix, r: f64) -> Result<Self> {
        if !x.rows().is_multiple_of(2)
            || !x.cols().is_multiple_of(2)
            || x.rows() == 0
            || x.cols() == 0
        {
            return Err(Error::BadDimension {
                rows: x.rows(),
                cols: x.cols(),
            });
        }
        if y.rows() != x.rows() || y.cols() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: y.rows(),
            });
        }
        let n_in = x.cols() / 2;
        let n_out = x.rows() / 2;
        let c = cosh(2.0 * r);
        let s = sinh(2.0 * r);
        let flip = MomentumFlip::full(n_in).matrix();
        let inp = mode_indices(&(0..n_in).collect::<Vec<_>>(), n_in + n_out);
        let out = mode_indices(&(n_in..n_in + n_out).collect::<Vec<_>>(), n_in + n_out);
        let off = (&flip * &x.transpose()).scale(s);
        let mut gamma = Matrix::zeros(2 * (n_in + n_out), 2 * (n_in + n_out));
        gamma.add_block(&inp, &inp, &Matrix::identity(2 * n_in).scale(c));
        gamma.add_block(&inp, &out, &off);
        gamma.add_block(&out, &inp, &off.transpose());
        gamma.add_block(&out, &out, &(&(x * &x.transpose()).scale(c) + y));
        Self::new(gamma, n_in, n_out)
    }

    /// Finite-squeezing stand-in for the identity on `n` modes.
    pub fn identity_approx(n: usize, r: f64) -> Result<Self> {
        Self::from_linear_map(&Matrix::identity(2 * n), &Matrix::zeros(2 * n, 2 * n), r)
    }

    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    fn input_indices(&self) -> Vec<usize> {
        mode_indices(&(0..self.n_in).collect::<Vec<_>>(), self.n_in + self.n_out)
    }

    fn output_indices(&self) -> Vec<usize> {
        mode_indices(
            &(self.n_in..self.n_in + self.n_out).collect::<Vec<_>>(),
            self.n_in + self.n_out,
        )
    }

    pub fn apply(&self, v: &Matrix) -> Result<Matrix> {
        if v.rows() != 2 * self.n_in || !v.is_square() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n_in,
                found: v.rows(),
            });
        }
        let inp = self.input_indices();
        let mut m = self.gamma.clone();
        m.add_block(&inp, &inp, &MomentumFlip::full(self.n_in).conjugate(v));
        Ok(schur_complement(&m, &inp)?.matrix.symmetrize())
    }
}

/// Closed-form covariance-matrix maps.
#[derive(Clone, Debug, PartialEq)]
pub enum CmMap {
    Identity,
    /// `V -> eta V + (1 - eta)(2 nbar + 1) I` on `modes` (all when `None`).
    Loss {
        eta: f64,
        nbar: f64,
        modes: Option<Vec<usize>>,
    },
    /// `V -> S V S^T`.
    Symplectic(Matrix),
    /// `V -> V (+) W`; the ancilla modes carry `labels`.
    AddAncilla {
        w: Matrix,
        labels: ModePartition,
    },
    /// 50:50-type mixing `x_a' = c x_a - s x_b`, `x_b' = s x_a + c x_b` on
    /// every pair, momenta alike.
    BeamSplitter {
        theta: f64,
        pairs: Vec<(usize, usize)>,
    },
    /// `V -> V + K`.
    RandomDisplacement(NoiseKernel),
    /// Keeps the listed modes, in order.
    Discard {
        keep: Vec<usize>,
    },
}

/// Two-mode-pair mixing symplectic on `n` modes.
pub fn beam_splitter_matrix(theta: f64, pairs: &[(usize, usize)], n: usize) -> Result<Matrix> {
    let (c, s) = (cos(theta), sin(theta));
    let mut m = Matrix::identity(2 * n);
    let mut used = vec![false; n];
    for &(a, b) in pairs {
        if a >= n || b >= n || a == b || used[a] || used[b] {
            return Err(Error::InvalidParameter(format!(
                "bad beam-splitter pair ({a}, {b})"
            )));
        }
        used[a] = true;
        used[b] = true;
        for off in [0, n] {
            let (i, j) = (a + off, b + off);
            m[(i, i)] = c;
            m[(i, j)] = -s;
            m[(j, i)] = s;
            m[(j, j)] = c;
        }
    }
    Ok(m)
}

impl CmMap {
    pub fn apply(&self, v: &Matrix) -> Result<Matrix> {
        if !v.is_square() || !v.rows().is_multiple_of(2) || v.rows() == 0 {
            return Err(Error::BadDimension {
                rows: v.rows(),
                cols: v.cols(),
            });
        }
        let n = v.rows() / 2;
        match self {
            CmMap::Identity => Ok(v.clone()),
            CmMap::Loss { eta, nbar, modes } => {
                let modes: Vec<usize> = match modes {
                    Some(m) => m.clone(),
                    None => (0..n).collect(),
                };
                if modes.iter().any(|&k| k >= n) {
                    return Err(Error::InvalidParameter("loss mode out of range".into()));
                }
                let idx = mode_indices(&modes, n);
                let mut x = vec![1.0; 2 * n];
                for &i in &idx {
                    x[i] = sqrt(*eta);
                }
                let mut out = Matrix::from_fn(2 * n, 2 * n, |i, j| x[i] * v[(i, j)] * x[j]);
                for &i in &idx {
                    out[(i, i)] += (1.0 - eta) * (2.0 * nbar + 1.0);
                }
                Ok(out)
            }
            CmMap::Symplectic(s) => {
                if s.rows() != v.rows() {
                    return Err(Error::DimensionMismatch {
                        expected: s.rows(),
                        found: v.rows(),
                    });
                }
                Ok(s.congruence(v).symmetrize())
            }
            CmMap::AddAncilla { w, .. } => direct_sum_cm(v, w),
            CmMap::BeamSplitter { theta, pairs } => Ok(beam_splitter_matrix(*theta, pairs, n)?
                .congruence(v)
                .symmetrize()),
            CmMap::RandomDisplacement(k) => random_displacement(v, k),
            CmMap::Discard { keep } => {
                if keep.is_empty() || keep.iter().any(|&k| k >= n) {
                    return Err(Error::InvalidParameter(
                        "discard keeps no valid modes".into(),
                    ));
                }
                Ok(reduce_to_modes(v, keep))
            }
        }
    }

    /// Image of the mean vector. Ancillas enter with zero mean and random
    /// displacements leave the mean unchanged.
    pub fn transform_mean(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "mean vector must have even positive length".into(),
            ));
        }
        let n = s.len() / 2;
        match self {
            CmMap::Identity | CmMap::RandomDisplacement(_) => Ok(s.to_vec()),
            CmMap::Loss { eta, modes, .. } => {
                let modes: Vec<usize> = match modes {
                    Some(m) => m.clone(),
                    None => (0..n).collect(),
                };
                let mut out = s.to_vec();
                for i in mode_indices(&modes, n) {
                    *out.get_mut(i).ok_or_else(|| {
                        Error::InvalidParameter("loss mode out of range".into())
                    })? *= sqrt(*eta);
                }
                Ok(out)
            }
            CmMap::Symplectic(m) => {
                if m.cols() != s.len() {
                    return Err(Error::DimensionMismatch {
                        expected: m.cols(),
                        found: s.len(),
                    });
                }
                Ok(m.mul_vec(s))
            }
            CmMap::BeamSplitter { theta, pairs } => {
                Ok(beam_splitter_matrix(*theta, pairs, n)?.mul_vec(s))
            }
            CmMap::AddAncilla { labels, .. } => {
                let k = labels.n_modes();
                let mut out = Vec::with_capacity(2 * (n + k));
                out.extend_from_slice(&s[..n]);
                out.extend(core::iter::repeat_n(0.0, k));
                out.extend_from_slice(&s[n..]);
                out.extend(core::iter::repeat_n(0.0, k));
                Ok(out)
            }
            CmMap::Discard { keep } => {
                if keep.iter().any(|&k| k >= n) {
                    return Err(Error::InvalidParameter(
                        "discard keeps no valid modes".into(),
                    ));
                }
                Ok(mode_indices(keep, n).into_iter().map(|i| s[i]).collect())
            }
        }
    }

    pub fn output_partition(&self, input: &ModePartition) -> Result<ModePartition> {
        match self {
            CmMap::AddAncilla { labels, .. } => Ok(input.concat(labels)),
            CmMap::Discard { keep } => {
                let labels = input.labels();
                ModePartition::new(keep.iter().map(|&k| labels[k].clone()))
            }
            _ => Ok(input.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GaussianChannel {
    Choi(ChoiChannel),
    Map(CmMap),
    /// Applied left to right.
    Sequence(Vec<GaussianChannel>),
}

impl GaussianChannel {
    pub fn apply(&self, v: &Matrix) -> Result<Matrix> {
        match self {
            GaussianChannel::Choi(c) => c.apply(v),
            GaussianChannel::Map(m) => m.apply(v),
            GaussianChannel::Sequence(chs) => {
                chs.iter().try_fold(v.clone(), |acc, c| c.apply(&acc))
            }
        }
    }

    /// Labels of the output modes. A Choi channel keeps the input labels
    /// when the mode count is unchanged.
    pub fn output_partition(&self, input: &ModePartition) -> Result<ModePartition> {
        match self {
            GaussianChannel::Choi(c) if c.n_out == input.n_modes() => Ok(input.clone()),
            GaussianChannel::Choi(_) => Err(Error::InvalidPartition(
                "Choi channel changes the mode count; label the output explicitly".into(),
            )),
            GaussianChannel::Map(m) => m.output_partition(input),
            GaussianChannel::Sequence(chs) => chs
                .iter()
                .try_fold(input.clone(), |p, c| c.output_partition(&p)),
        }
    }
}

/// Standard channel constructors.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    Loss {
        eta: f64,
        nbar: f64,
    },
    LocalSymplectic(Matrix),
    AddAncilla {
        w: Matrix,
        labels: ModePartition,
    },
    BeamSplitter {
        theta: f64,
        pairs: Vec<(usize, usize)>,
    },
}

pub fn make_channel(kind: ChannelKind) -> Result<GaussianChannel> {
    let map = match kind {
        ChannelKind::Loss { eta, nbar } => {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!(
                    "loss eta = {eta} not in [0, 1]"
                )));
            }
            if !(nbar >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "thermal nbar = {nbar} is negative"
                )));
            }
            CmMap::Loss {
                eta,
                nbar,
                modes: None,
            }
        }
        ChannelKind::LocalSymplectic(s) => {
            check_symplectic(&s, DEFAULT_TOL)?;
            CmMap::Symplectic(s)
        }
        ChannelKind::AddAncilla { w, labels } => {
            if w.rows() != 2 * labels.n_modes() {
                return Err(Error::DimensionMismatch {
                    expected: 2 * labels.n_modes(),
                    found: w.rows(),
                });
            }
            let report = validate_qcm(&w, DEFAULT_TOL)?;
            if !report.valid {
                return Err(Error::NotQcm {
                    min_eigenvalue: report.min_eigenvalue,
                });
            }
            CmMap::AddAncilla { w, labels }
        }
        ChannelKind::BeamSplitter { theta, pairs } => {
            let n = pairs
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .max()
                .map_or(0, |m| m + 1);
            beam_splitter_matrix(theta, &pairs, n)?;
            CmMap::BeamSplitter { theta, pairs }
        }
    };
    Ok(GaussianChannel::Map(map))
}

pub fn apply_channel(ch: &GaussianChannel, v: &Matrix) -> Result<Matrix> {
    ch.apply(v)
}

/// Outcome of probing a channel for free-ness.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeCertificate {
    /// No probe produced a violation. This is falsification over the probe
    /// set, not a proof.
    pub pass: bool,
    /// Membership margin of each probe's image (negative means violation).
    pub margins: Vec<f64>,
    pub violating_probe: Option<usize>,
}

/// Vacuum, pure product states and noisy members of the input cone.
pub fn default_probes<R: Rng + ?Sized>(
    spec: &FreeConeSpec,
    random: usize,
    rng: &mut R,
) -> Result<Vec<Matrix>> {
    let dim = spec.dim();
    let mut probes = vec![Matrix::identity(dim)];
    if spec.theory.is_some_and(|t| t.is_bipartite()) {
        let blocks = spec
            .partition
            .parties()
            .into_iter()
            .map(|p| Ok((p, random_pure(spec.partition.modes_of(p)?.len(), 0.5, rng))))
            .collect::<Result<Vec<_>>>()?;
        probes.push(local_direct_sum(&spec.partition, &blocks)?);
    }
    for k in 0..random {
        probes.push(random_member(spec, k % 4 == 0, rng)?);
    }
    Ok(probes)
}

/// Largest `t` such that some `W` in the output cone satisfies
/// `Gamma + (S V S (+) -W) >= t I`, with the output-cone margins also
/// `>= t` and `W >= i Omega`.
fn choi_margin(ch: &ChoiChannel, v: &Matrix, out: &FreeConeSpec, opts: &SdpOptions) -> Result<f64> {
    let d_out = 2 * ch.n_out;
    let n_w = d_out * (d_out + 1) / 2;
    let n_q = out.n_q();
    let n_vars = 1 + n_w + n_q;
    let mut obj = vec![0.0; n_vars];
    obj[0] = -1.0;
    let mut p = SdpProblem::new(obj);
    let unit = |i: usize, j: usize| {
        let mut m = Matrix::zeros(d_out, d_out);
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
        m
    };
    let w_basis: Vec<Matrix> = (0..d_out)
        .flat_map(|i| (i..d_out).map(move |j| (i, j)))
        .map(|(i, j)| unit(i, j))
        .collect();
    let neg_i = |d: usize| Some(HermMatrix::from_real(Matrix::identity(d).scale(-1.0)));

    let inp = ch.input_indices();
    let outi = ch.output_indices();
    let d_tot = ch.gamma.rows();
    let mut constant = ch.gamma.clone();
    constant.add_block(&inp, &inp, &MomentumFlip::full(ch.n_in).conjugate(v));
    let mut coeffs = vec![neg_i(d_tot)];
    for e in &w_basis {
        let mut m = Matrix::zeros(d_tot, d_tot);
        m.add_block(&outi, &outi, &e.scale(-1.0));
        coeffs.push(Some(HermMatrix::from_real(m)));
    }
    coeffs.extend((0..n_q).map(|_| None));
    p.add_block(HermMatrix::from_real(constant), coeffs);

    let w_coeffs = || {
        w_basis
            .iter()
            .map(|e| Some(HermMatrix::from_real(e.clone())))
    };
    let mut coeffs = vec![neg_i(d_out)];
    coeffs.extend(w_coeffs());
    coeffs.extend(out.f_basis.iter().map(|b| Some(b.scale(-1.0))));
    p.add_block(out.c.scale(-1.0), coeffs);

    if out.has_g() {
        let mut coeffs = vec![neg_i(out.d.dim())];
        coeffs.extend((0..n_w).map(|_| None));
        coeffs.extend(out.g_basis.iter().cloned().map(Some));
        p.add_block(out.d.scale(-1.0), coeffs);
    }

    let mut coeffs = vec![neg_i(d_out)];
    coeffs.extend(w_coeffs());
    coeffs.extend((0..n_q).map(|_| None));
    p.add_block(
        HermMatrix::from_imag(omega_matrix(ch.n_out).scale(-1.0)),
        coeffs,
    );

    p.add_upper_bound(0, 1.0);
    let sol = sdp::solve(&p, opts)?.require_optimal()?;
    Ok(sol.y[0])
}

/// Checks every probe `V_A` of the input cone: a Choi channel must admit
/// `W_B` in the output cone with `Gamma >= (-S V_A S) (+) W_B`; a closed-form
/// map must send `V_A` into the output cone.
pub fn certify_free(
    ch: &GaussianChannel,
    input: &FreeConeSpec,
    output: &FreeConeSpec,
    probes: &[Matrix],
    tol: f64,
) -> Result<FreeCertificate> {
    let opts = SdpOptions::default();
    let mut margins = Vec::with_capacity(probes.len());
    let mut violating_probe = None;
    for (k, v) in probes.iter().enumerate() {
        let m_in = membership_margin(v, input, &opts)?;
        if m_in < -MEMBERSHIP_TOL {
            return Err(Error::InvalidParameter(format!(
                "probe {k} is not in the input cone (margin {m_in:e})"
            )));
        }
        let m = match ch {
            GaussianChannel::Choi(c) if c.n_out * 2 == output.dim() => {
                choi_margin(c, v, output, &opts)?
            }
            GaussianChannel::Choi(_) => {
                return Err(Error::DimensionMismatch {
                    expected: output.dim(),
                    found: ch
                        .output_partition(&input.partition)
                        .map_or(0, |p| 2 * p.n_modes()),
                })
            }
            _ => membership_margin(&ch.apply(v)?, output, &opts)?,
        };
        if m < -tol && violating_probe.is_none() {
            violating_probe = Some(k);
        }
        margins.push(m);
    }
    Ok(FreeCertificate {
        pass: violating_probe.is_none(),
        margins,
        violating_probe,
    })
}
