use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Algorithm, IterateRecord, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::linalg::{cholesky, solve as lu_solve, sym_eigen, HermMatrix, Matrix};
use crate::math::sqrt;
use crate::{Error, Result};

/// A constraint block after embedding: real symmetric data only.
struct Block {
    dim: usize,
    complex: bool,
    f0: Matrix,
    f: Vec<Option<Matrix>>,
}

enum Scaling {
    Nt {
        g: Matrix,
        g_inv: Matrix,
        w: Matrix,
        lambda: Vec<f64>,
    },
    Hkm {
        zinv: Matrix,
    },
}

impl Scaling {
    /// The operator `U -> W U W` (NT) or `U -> sym(X U Z^{-1})` (HKM).
    fn apply(&self, x: &Matrix, u: &Matrix) -> Matrix {
        match self {
            Scaling::Nt { w, .. } => &(w * u) * w,
            Scaling::Hkm { zinv } => (&(x * u) * zinv).symmetrize(),
        }
    }
}

fn lower(problem: &SdpProblem) -> Vec<Block> {
    let mut out = Vec::with_capacity(problem.blocks.len() + problem.scalars.len());
    for b in &problem.blocks {
        let complex = !b.is_real();
        let map = |h: &HermMatrix| {
            if complex {
                h.embed()
            } else {
                h.re.symmetrize()
            }
        };
        out.push(Block {
            dim: if complex { 2 * b.dim() } else { b.dim() },
            complex,
            f0: map(&b.constant),
            f: b.coeffs.iter().map(|c| c.as_ref().map(map)).collect(),
        });
    }
    for s in &problem.scalars {
        out.push(Block {
            dim: 1,
            complex: false,
            f0: Matrix::from_diag(&[s.constant]),
            f: s.coeffs
                .iter()
                .map(|&a| {
                    if a != 0.0 {
                        Some(Matrix::from_diag(&[a]))
                    } else {
                        None
                    }
                })
                .collect(),
        });
    }
    out
}

/// Symmetrizes an iterate and, on an embedded complex block, removes the
/// component that anticommutes with the complex structure. That component
/// is invisible to the constraints, so round-off would otherwise let it
/// drift until it pins the iterate to the boundary of the cone. Averaging
/// with `J X J^T` keeps positive semidefiniteness.
fn restore_structure(b: &Block, x: &Matrix) -> Matrix {
    let x = x.symmetrize();
    if !b.complex {
        return x;
    }
    let n = b.dim / 2;
    Matrix::from_fn(b.dim, b.dim, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let same = 0.5 * (x[(ii, jj)] + x[(n + ii, n + jj)]);
        let off = 0.5 * (x[(n + ii, jj)] - x[(ii, n + jj)]);
        match (bi, bj) {
            (0, 0) | (1, 1) => same,
            (1, 0) => off,
            _ => -off,
        }
    })
}

fn apply_map(blocks: &[Block], y: &[f64]) -> Vec<Matrix> {
    blocks
        .iter()
        .map(|b| {
            let mut acc = Matrix::zeros(b.dim, b.dim);
            for (fi, &yi) in b.f.iter().zip(y) {
                if let Some(fi) = fi {
                    if yi != 0.0 {
                        acc += &fi.scale(yi);
                    }
                }
            }
            acc
        })
        .collect()
}

fn adjoint(blocks: &[Block], xs: &[Matrix], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (b, x) in blocks.iter().zip(xs) {
        for (i, fi) in b.f.iter().enumerate() {
            if let Some(fi) = fi {
                out[i] += fi.inner(x);
            }
        }
    }
    out
}

fn inner_sum(a: &[Matrix], b: &[Matrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn frob(a: &[Matrix]) -> f64 {
    sqrt(a.iter().map(|x| x.inner(x)).sum())
}

fn vnorm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// Largest `alpha` with `x + alpha * dx >= 0`, infinite if unbounded.
fn max_step(x: &Matrix, dx: &Matrix) -> f64 {
    if x.rows() == 1 {
        return if dx[(0, 0)] < 0.0 {
            -x[(0, 0)] / dx[(0, 0)]
        } else {
            f64::INFINITY
        };
    }
    let Ok(c) = cholesky(x) else { return 0.0 };
    let li = c.l_inverse();
    let k = li.congruence(dx);
    let lmin = sym_eigen(&k).min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn nt_scaling(x: &Matrix, z: &Matrix) -> Option<Scaling> {
    let lz = cholesky(z).ok()?;
    let lzinv = lz.l_inverse();
    let g_mid = lz.l.transpose().congruence(x);
    let e = sym_eigen(&g_mid.symmetrize());
    if !(e.min() > 0.0) {
        return None;
    }
    let n = x.rows();
    let s: Vec<f64> = e.values.iter().map(|v| sqrt(*v)).collect();
    let q = &e.vectors;
    // g = Lz^{-T} Q diag(s^{1/2}); g^{-1} = diag(s^{-1/2}) Q^T Lz^T.
    let mut g = &lzinv.transpose() * q;
    let mut g_inv = &q.transpose() * &lz.l.transpose();
    for i in 0..n {
        let r = sqrt(s[i]);
        for k in 0..n {
            g[(k, i)] *= r;
            g_inv[(i, k)] /= r;
        }
    }
    let w = (&g * &g.transpose()).symmetrize();
    Some(Scaling::Nt {
        g,
        g_inv,
        w,
        lambda: s,
    })
}

fn hkm_scaling(z: &Matrix) -> Option<Scaling> {
    let c = cholesky(z).ok()?;
    Some(Scaling::Hkm {
        zinv: c.solve(&Matrix::identity(z.rows())).symmetrize(),
    })
}

/// Complementarity right-hand side `R_c` for the search direction
/// `dX = R_c - O(dZ)`.
fn complementarity_rhs(
    s: &Scaling,
    x: &Matrix,
    sigma_mu: f64,
    affine: Option<(&Matrix, &Matrix)>,
) -> Matrix {
    match s {
        Scaling::Nt {
            g, g_inv, lambda, ..
        } => {
            let n = lambda.len();
            let mut rhs = Matrix::zeros(n, n);
            for i in 0..n {
                rhs[(i, i)] = sigma_mu - lambda[i] * lambda[i];
            }
            if let Some((dx, dz)) = affine {
                let dxs = g_inv.congruence(dx);
                let dzs = g.transpose().congruence(dz);
                let prod = (&dxs * &dzs).symmetrize();
                rhs -= &prod;
            }
            let t = Matrix::from_fn(n, n, |i, j| 2.0 * rhs[(i, j)] / (lambda[i] + lambda[j]));
            g.congruence(&t).symmetrize()
        }
        Scaling::Hkm { zinv } => {
            let mut r = &zinv.scale(sigma_mu) - x;
            if let Some((dx, dz)) = affine {
                r -= &(&(dx * dz) * zinv).symmetrize();
            }
            r
        }
    }
}

struct Direction {
    dy: Vec<f64>,
    dz: Vec<Matrix>,
    dx: Vec<Matrix>,
}

struct Newton<'a> {
    blocks: &'a [Block],
    scal: Vec<Scaling>,
    chol: Option<crate::linalg::Cholesky>,
    m_mat: Matrix,
}

impl Newton<'_> {
    fn solve_schur(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        if let Some(c) = &self.chol {
            // A few rounds of iterative refinement recover the accuracy that
            // the Cholesky solve loses once the Schur matrix is ill-conditioned.
            let mut dy = c.solve_vec(rhs);
            for _ in 0..REFINE_STEPS {
                let md = self.m_mat.mul_vec(&dy);
                let r: Vec<f64> = rhs.iter().zip(&md).map(|(a, b)| a - b).collect();
                for (d, e) in dy.iter_mut().zip(c.solve_vec(&r)) {
                    *d += e;
                }
            }
            return Some(dy);
        }
        let b = Matrix::from_vec(rhs.len(), 1, rhs.to_vec());
        lu_solve(&self.m_mat, &b).ok().map(|x| x.column(0))
    }

    fn direction(
        &self,
        xs: &[Matrix],
        rp: &[Matrix],
        rd: &[f64],
        rc: &[Matrix],
    ) -> Option<Direction> {
        let m = rd.len();
        let tmp: Vec<Matrix> = self
            .scal
            .iter()
            .zip(xs)
            .zip(rp.iter().zip(rc))
            .map(|((s, x), (r, c))| c + &s.apply(x, r))
            .collect();
        let mut rhs = adjoint(self.blocks, &tmp, m);
        for (a, b) in rhs.iter_mut().zip(rd) {
            *a += b;
        }
        let dy = self.solve_schur(&rhs)?;
        let fdy = apply_map(self.blocks, &dy);
        let dz: Vec<Matrix> = fdy.iter().zip(rp).map(|(a, b)| a - b).collect();
        let dx: Vec<Matrix> = self
            .scal
            .iter()
            .zip(xs)
            .zip(rc.iter().zip(&dz))
            .map(|((s, x), (c, d))| (c - &s.apply(x, d)).symmetrize())
            .collect();
        if dy.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Direction { dy, dz, dx })
    }
}

fn build_newton<'a>(
    blocks: &'a [Block],
    xs: &[Matrix],
    zs: &[Matrix],
    m: usize,
    alg: Algorithm,
) -> Option<Newton<'a>> {
    let mut scal = Vec::with_capacity(blocks.len());
    for (x, z) in xs.iter().zip(zs) {
        scal.push(match alg {
            // Near the optimum the NT product can lose definiteness in
            // floating point; the HKM direction only needs Z.
            Algorithm::NesterovTodd => nt_scaling(x, z).or_else(|| hkm_scaling(z))?,
            Algorithm::Hkm => hkm_scaling(z)?,
        });
    }
    let mut m_mat = Matrix::zeros(m, m);
    for ((b, s), x) in blocks.iter().zip(&scal).zip(xs) {
        for k in 0..m {
            let Some(fk) = &b.f[k] else { continue };
            let ofk = s.apply(x, fk);
            for i in 0..m {
                if let Some(fi) = &b.f[i] {
                    m_mat[(i, k)] += fi.inner(&ofk);
                }
            }
        }
    }
    let m_mat = m_mat.symmetrize();
    let chol = cholesky(&m_mat).ok().or_else(|| {
        let reg = 1e-14
            * m_mat
                .diagonal()
                .iter()
                .fold(0.0f64, |a, &b| a.max(b))
                .max(1e-300);
        cholesky(&(&m_mat + &Matrix::identity(m).scale(reg))).ok()
    });
    Some(Newton {
        blocks,
        scal,
        chol,
        m_mat,
    })
}

/// Refinement rounds applied to each Schur complement solve.
const REFINE_STEPS: usize = 2;

/// Iterations without progress on the best iterate before the run stops.
const STAGNATION_ITERS: usize = 8;

fn is_near_optimal(r: &IterateRecord, opts: &SdpOptions) -> bool {
    let gap = (r.primal_objective - r.dual_objective).abs()
        / (1.0 + r.primal_objective.abs() + r.dual_objective.abs());
    r.relative_primal_infeasibility <= opts.near_feas_tol
        && r.relative_dual_infeasibility <= opts.near_feas_tol
        && gap <= opts.near_gap_tol
}

/// Solves `problem` with an infeasible-start primal-dual path-following
/// method. Returns `Err` only for malformed input; convergence problems are
/// reported through [`SdpSolution::status`].
pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let m = problem.n_vars;
    let blocks = lower(problem);
    for i in 0..m {
        if blocks.iter().all(|b| b.f[i].is_none()) {
            return Err(Error::MalformedProblem(format!(
                "variable {i} appears in no constraint"
            )));
        }
    }
    let c = &problem.objective;
    let n_tot: usize = blocks.iter().map(|b| b.dim).sum();
    let f0: Vec<Matrix> = blocks.iter().map(|b| b.f0.clone()).collect();
    let norm_f0 = frob(&f0);
    let norm_c = vnorm(c);

    // Identity-multiple starting point scaled by the data norms.
    let mut xs = Vec::with_capacity(blocks.len());
    let mut zs = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let nj = b.dim as f64;
        let mut xi: f64 = 10.0f64.max(sqrt(nj));
        let mut fmax: f64 = b.f0.frobenius_norm();
        for (i, fi) in b.f.iter().enumerate() {
            if let Some(fi) = fi {
                let nf = fi.frobenius_norm();
                fmax = fmax.max(nf);
                xi = xi.max(nj * (1.0 + c[i].abs()) / (1.0 + nf));
            }
        }
        let eta = 10.0f64.max(sqrt(nj)).max(fmax);
        xs.push(Matrix::identity(b.dim).scale(xi));
        zs.push(Matrix::identity(b.dim).scale(eta));
    }
    let mut y = vec![0.0; m];
    let x0_trace: f64 = xs.iter().map(Matrix::trace).sum();

    let mut history = Vec::new();
    let mut status = SdpStatus::NumericalFailure;
    let mut farkas = None;
    let mut iterations = 0;
    let mut stalls = 0;
    let (mut last_ap, mut last_ad) = (0.0, 0.0);
    let mut last: Option<IterateRecord>;
    // Best iterate by the worst ratio of residual to tolerance, kept in case
    // round-off stalls the method before it meets the tolerances.
    let mut best: Option<(f64, Vec<f64>, Vec<Matrix>, IterateRecord)> = None;
    let mut since_best = 0usize;

    loop {
        let fy = apply_map(&blocks, &y);
        let rp: Vec<Matrix> = zs
            .iter()
            .zip(&f0)
            .zip(&fy)
            .map(|((z, f), g)| &(z - f) - g)
            .collect();
        let mut rd = adjoint(&blocks, &xs, m);
        for (a, b) in rd.iter_mut().zip(c) {
            *a -= b;
        }
        let pobj: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
        let dobj = -inner_sum(&f0, &xs);
        let xz = inner_sum(&xs, &zs);
        let rp_norm = frob(&rp);
        let rd_norm = vnorm(&rd);
        let pinf = rp_norm / (1.0 + norm_f0);
        let dinf = rd_norm / (1.0 + norm_c);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let record = IterateRecord {
            primal_objective: pobj,
            dual_objective: dobj,
            complementarity: xz,
            primal_residual: rp_norm,
            dual_residual: rd_norm,
            relative_primal_infeasibility: pinf,
            relative_dual_infeasibility: dinf,
            step_primal: last_ap,
            step_dual: last_ad,
        };
        last = Some(record);
        if opts.keep_history {
            history.push(record);
        }
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && rel_gap <= opts.gap_tol {
            status = SdpStatus::Optimal;
            break;
        }
        let merit = (pinf / opts.feas_tol)
            .max(dinf / opts.feas_tol)
            .max(rel_gap / opts.gap_tol);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, y.clone(), xs.clone(), record));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STAGNATION_ITERS {
                break;
            }
        }

        // Farkas ray for the y-problem: X >= 0, F*(X) ~ 0, tr(F0 X) < 0.
        let ftx = -dobj;
        let x_trace: f64 = xs.iter().map(Matrix::trace).sum();
        if ftx < 0.0 && x_trace > 1e6 * x0_trace {
            let fx: Vec<f64> = rd.iter().zip(c).map(|(a, b)| a + b).collect();
            if vnorm(&fx) / -ftx < 1e-7 {
                status = SdpStatus::Infeasible;
                farkas = Some(xs.iter().map(|x| x.scale(1.0 / -ftx)).collect::<Vec<_>>());
                break;
            }
        }
        // Improving ray for the y-problem: F(d) >= 0 with c^T d = -1.
        if pobj < -1e8 * (1.0 + norm_f0) {
            let d: Vec<f64> = y.iter().map(|v| v / -pobj).collect();
            let fd = apply_map(&blocks, &d);
            let scale = frob(&fd).max(1.0);
            if fd.iter().all(|f| sym_eigen(f).min() >= -1e-7 * scale) {
                status = SdpStatus::Unbounded;
                break;
            }
        }
        if iterations >= opts.max_iter {
            break;
        }

        let Some(newton) = build_newton(&blocks, &xs, &zs, m, opts.algorithm) else {
            break;
        };
        let mu = xz / n_tot as f64;

        let rc_aff: Vec<Matrix> = newton
            .scal
            .iter()
            .zip(&xs)
            .map(|(s, x)| complementarity_rhs(s, x, 0.0, None))
            .collect();
        let Some(aff) = newton.direction(&xs, &rp, &rd, &rc_aff) else {
            break;
        };
        let ap_aff = xs
            .iter()
            .zip(&aff.dx)
            .map(|(x, d)| max_step(x, d))
            .fold(1.0f64, f64::min);
        let ad_aff = zs
            .iter()
            .zip(&aff.dz)
            .map(|(z, d)| max_step(z, d))
            .fold(1.0f64, f64::min);
        let x_aff: Vec<Matrix> = xs
            .iter()
            .zip(&aff.dx)
            .map(|(x, d)| x + &d.scale(ap_aff))
            .collect();
        let z_aff: Vec<Matrix> = zs
            .iter()
            .zip(&aff.dz)
            .map(|(z, d)| z + &d.scale(ad_aff))
            .collect();
        let mu_aff = inner_sum(&x_aff, &z_aff) / n_tot as f64;
        let mut sigma = (mu_aff / mu).max(0.0);
        sigma = (sigma * sigma * sigma).min(1.0);

        let rc: Vec<Matrix> = newton
            .scal
            .iter()
            .zip(&xs)
            .zip(aff.dx.iter().zip(&aff.dz))
            .map(|((s, x), (dx, dz))| complementarity_rhs(s, x, sigma * mu, Some((dx, dz))))
            .collect();
        let Some(dir) = newton.direction(&xs, &rp, &rd, &rc) else {
            break;
        };
        let tau = opts.step_fraction;
        let ap = xs
            .iter()
            .zip(&dir.dx)
            .map(|(x, d)| tau * max_step(x, d))
            .fold(1.0f64, f64::min);
        let ad = zs
            .iter()
            .zip(&dir.dz)
            .map(|(z, d)| tau * max_step(z, d))
            .fold(1.0f64, f64::min);
        for ((x, d), b) in xs.iter_mut().zip(&dir.dx).zip(&blocks) {
            *x += &d.scale(ap);
            *x = restore_structure(b, x);
        }
        for ((z, d), b) in zs.iter_mut().zip(&dir.dz).zip(&blocks) {
            *z += &d.scale(ad);
            *z = restore_structure(b, z);
        }
        for (yi, di) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * di;
        }
        iterations += 1;
        last_ap = ap;
        last_ad = ad;
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }

    if status == SdpStatus::NumericalFailure {
        if let Some((_, by, bx, rec)) = best {
            if is_near_optimal(&rec, opts) {
                status = SdpStatus::NearOptimal;
            }
            y = by;
            xs = bx;
            last = Some(rec);
        }
    }

    let n_lmi = problem.blocks.len();
    let to_herm = |b: &Block, x: &Matrix| {
        if b.complex {
            HermMatrix::from_embedded_dual(x)
        } else {
            HermMatrix::from_real(x.clone())
        }
    };
    let duals: Vec<HermMatrix> = blocks[..n_lmi]
        .iter()
        .zip(&xs)
        .map(|(b, x)| to_herm(b, x))
        .collect();
    let scalar_duals: Vec<f64> = xs[n_lmi..].iter().map(|x| x[(0, 0)]).collect();
    let slacks: Vec<HermMatrix> = problem.blocks.iter().map(|b| b.evaluate(&y)).collect();
    let farkas = farkas.map(|fx: Vec<Matrix>| {
        blocks[..n_lmi]
            .iter()
            .zip(&fx)
            .map(|(b, x)| to_herm(b, x))
            .collect()
    });
    let r = last.expect("at least one iterate is evaluated");
    let (pobj, dobj, pinf, dinf) = (
        r.primal_objective,
        r.dual_objective,
        r.relative_primal_infeasibility,
        r.relative_dual_infeasibility,
    );
    Ok(SdpSolution {
        status,
        y,
        duals,
        scalar_duals,
        slacks,
        primal_objective: pobj,
        dual_objective: dobj,
        gap: pobj - dobj,
        relative_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        iterations,
        farkas,
        history,
    })
}
