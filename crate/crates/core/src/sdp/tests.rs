use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::linalg::sym_eigenvalues;
use crate::math::{cosh, exp, sinh};
use crate::symplectic::omega_matrix;

fn scalar_kappa_problem(v: &Matrix, c: &HermMatrix) -> SdpProblem {
    // minimize xi s.t. xi V - C >= 0, xi >= 1
    let mut p = SdpProblem::new(vec![1.0]);
    p.add_block(c.scale(-1.0), vec![Some(HermMatrix::from_real(v.clone()))]);
    p.add_lower_bound(0, 1.0);
    p
}

fn tmsv(r: f64) -> Matrix {
    let (c, s) = (cosh(2.0 * r), sinh(2.0 * r));
    Matrix::from_rows(&[
        [c, s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, c, -s],
        [0.0, 0.0, -s, c],
    ])
}

#[test]
fn trivial_identity_problem() {
    let p = scalar_kappa_problem(
        &Matrix::identity(2),
        &HermMatrix::from_real(Matrix::identity(2)),
    );
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    // Relative gap tolerance 1e-8 bounds the distance to the optimum.
    assert!((s.y[0] - 1.0).abs() < 1e-7, "{}", s.y[0]);
}

#[test]
fn squeezed_nonclassicality() {
    let r = 0.3;
    let v = Matrix::from_diag(&[exp(-2.0 * r), exp(2.0 * r)]);
    let p = scalar_kappa_problem(&v, &HermMatrix::from_real(Matrix::identity(2)));
    for alg in [Algorithm::NesterovTodd, Algorithm::Hkm] {
        let opts = SdpOptions {
            algorithm: alg,
            ..SdpOptions::default()
        };
        let s = solve(&p, &opts).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.y[0] - exp(0.6)).abs() < 1e-7, "{alg:?}: {}", s.y[0]);
    }
}

#[test]
fn tmsv_ppt_problem_and_witness() {
    // C = i Omega_A (+) -i Omega_B on 2 modes, xxpp.
    let mut im = Matrix::zeros(4, 4);
    im[(0, 2)] = 1.0;
    im[(2, 0)] = -1.0;
    im[(1, 3)] = -1.0;
    im[(3, 1)] = 1.0;
    let c = HermMatrix::from_imag(im);
    let p = scalar_kappa_problem(&tmsv(0.5), &c);
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.y[0] - exp(1.0)).abs() < 1e-6);
    // Dual: <W, V> + x_s = 1 and objective <W, C> + x_s = kappa.
    let w = &s.duals[0];
    let v = HermMatrix::from_real(tmsv(0.5));
    assert!((w.inner(&v) + s.scalar_duals[0] - 1.0).abs() < 1e-7);
    assert!((w.inner(&c) + s.scalar_duals[0] - exp(1.0)).abs() < 1e-6);
    assert!(w.min_eigenvalue() > -1e-8);
}

#[test]
fn embedding_examples() {
    let a = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
    let e = embed_hermitian(&HermMatrix::from_real(a.clone()), 1e-12).unwrap();
    assert_eq!(e, a.block_diag(&a));
    let e = embed_hermitian(&HermMatrix::from_imag(omega_matrix(1)), 1e-12).unwrap();
    let ev = sym_eigenvalues(&e);
    for (g, w) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((g - w).abs() < 1e-14);
    }
    let bad = HermMatrix {
        re: Matrix::identity(2),
        im: Matrix::identity(2),
    };
    assert!(embed_hermitian(&bad, 1e-12).is_err());
}

#[test]
fn detects_infeasibility() {
    // y * I - 2I >= 0 and -y * I + I >= 0: y >= 2 and y <= 1.
    let mut p = SdpProblem::new(vec![1.0]);
    p.add_block(
        HermMatrix::from_real(Matrix::identity(2).scale(-2.0)),
        vec![Some(HermMatrix::from_real(Matrix::identity(2)))],
    );
    p.add_block(
        HermMatrix::from_real(Matrix::identity(2)),
        vec![Some(HermMatrix::from_real(Matrix::identity(2).scale(-1.0)))],
    );
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status, SdpStatus::Infeasible);
    let cert = s.farkas.unwrap();
    // F*(X) ~ 0 and tr(F0 X) = -1.
    let fx = cert[0].trace() - cert[1].trace();
    let f0x = -2.0 * cert[0].trace() + cert[1].trace();
    assert!(fx.abs() < 1e-6);
    assert!((f0x + 1.0).abs() < 1e-9);
}

#[test]
fn detects_unboundedness() {
    // minimize -y s.t. y * I >= 0.
    let mut p = SdpProblem::new(vec![-1.0]);
    p.add_block(
        HermMatrix::from_real(Matrix::zeros(2, 2)),
        vec![Some(HermMatrix::from_real(Matrix::identity(2)))],
    );
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status, SdpStatus::Unbounded);
}

#[test]
fn malformed_problems() {
    let mut p = SdpProblem::new(vec![1.0, 1.0]);
    p.add_block(
        HermMatrix::from_real(Matrix::identity(2)),
        vec![Some(HermMatrix::from_real(Matrix::identity(2))), None],
    );
    assert!(matches!(
        solve(&p, &SdpOptions::default()),
        Err(Error::MalformedProblem(_))
    ));
    let mut q = SdpProblem::new(vec![1.0]);
    q.add_block(
        HermMatrix::from_real(Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]])),
        vec![Some(HermMatrix::from_real(Matrix::identity(2)))],
    );
    assert!(q.validate().is_err());
}

#[test]
fn weak_duality_on_feasible_iterates() {
    let p = scalar_kappa_problem(&tmsv(0.3), &HermMatrix::from_real(Matrix::identity(4)));
    let s = solve(&p, &SdpOptions::default()).unwrap();
    let feasible: Vec<_> = s
        .history
        .iter()
        .filter(|r| {
            r.relative_primal_infeasibility <= 1e-9 && r.relative_dual_infeasibility <= 1e-9
        })
        .collect();
    assert!(!feasible.is_empty());
    for r in feasible {
        assert!(r.primal_objective - r.dual_objective >= -1e-10);
    }
}

#[test]
fn deterministic() {
    let p = scalar_kappa_problem(&tmsv(0.4), &HermMatrix::from_real(Matrix::identity(4)));
    let a = solve(&p, &SdpOptions::default()).unwrap();
    let b = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(a.y[0].to_bits(), b.y[0].to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn text_round_trip() {
    let mut im = Matrix::zeros(2, 2);
    im[(0, 1)] = 0.25;
    im[(1, 0)] = -0.25;
    let mut p = SdpProblem::new(vec![1.0, -0.5]);
    p.add_block(
        HermMatrix {
            re: Matrix::identity(2),
            im,
        },
        vec![
            None,
            Some(HermMatrix::from_real(Matrix::from_rows(&[
                [1.0, 0.1],
                [0.1, 3.0],
            ]))),
        ],
    );
    p.add_block(
        HermMatrix::from_real(Matrix::identity(1)),
        vec![Some(HermMatrix::from_real(Matrix::identity(1))), None],
    );
    p.add_lower_bound(0, 1.0);
    let text = to_lmi_text(&p);
    let q = from_lmi_text(&text).unwrap();
    assert_eq!(p, q);
    assert!(from_lmi_text("lmi 2\n").is_err());
    assert!(from_lmi_text("lmi 1\nvars 1\nobjective 1\nblock 1 real\nconst\n1 2\n").is_err());
}
