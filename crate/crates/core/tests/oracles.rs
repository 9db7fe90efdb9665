//! Cross-checks against nalgebra eigen-solvers, which share no code with the
//! crate's Jacobi routine.

use gaussrt_core::cones::{cone_spec, kappa, Method, Theory};
use gaussrt_core::linalg::{sym_eigen, HermMatrix};
use gaussrt_core::sample::{random_qcm, random_symmetric};
use gaussrt_core::states::tmsv_matrix;
use gaussrt_core::symplectic::{
    nu_min_bisection, omega, partial_transpose, schur_complement, symplectic_eigenvalues,
    williamson,
};
use gaussrt_core::{Matrix, ModePartition};
use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Symplectic spectrum from the moduli of the eigenvalues of `Omega V`,
/// which come in pairs `+- i nu`.
fn oracle_symplectic(v: &Matrix) -> Vec<f64> {
    let n = v.rows() / 2;
    let w = to_na(&omega(n).unwrap().matrix) * to_na(v);
    let mut nu: Vec<f64> = w.complex_eigenvalues().iter().map(|z| z.im.abs()).collect();
    nu.sort_by(f64::total_cmp);
    nu.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

fn oracle_herm_min(h: &HermMatrix) -> f64 {
    let d = h.dim();
    let m = DMatrix::from_fn(d, d, |i, j| Complex::new(h.re[(i, j)], h.im[(i, j)]));
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn symplectic_spectrum_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        for _ in 0..25 {
            let v = random_qcm(n, &mut rng);
            let ours = symplectic_eigenvalues(&v).unwrap();
            let oracle = oracle_symplectic(&v);
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9 * b.max(1.0), "{ours:?} vs {oracle:?}");
            }
        }
    }
}

#[test]
fn williamson_and_bisection_on_random_qcms() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..200 {
        let v = random_qcm(1 + k % 4, &mut rng);
        let w = williamson(&v).unwrap();
        assert!(w.congruence_residual <= 1e-9 && w.symplectic_residual <= 1e-9);
        let nu = symplectic_eigenvalues(&v).unwrap()[0];
        assert!((nu_min_bisection(&v, 1e-12).unwrap() - nu).abs() <= 1e-8);
    }
}

#[test]
fn hermitian_min_eigenvalue_matches_complex_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 1..=6 {
        for _ in 0..15 {
            let re = random_symmetric(d, 1.0, &mut rng);
            let g = random_symmetric(d, 1.0, &mut rng);
            let lower = Matrix::from_fn(d, d, |i, j| if i > j { g[(i, j)] } else { 0.0 });
            let im = &lower - &lower.transpose();
            let h = HermMatrix::new(re, im, 1e-12).unwrap();
            assert!((h.min_eigenvalue() - oracle_herm_min(&h)).abs() < 1e-10);
        }
    }
}

#[test]
fn benchmark_kappas_from_oracle() {
    let p = ModePartition::bipartite(1, 1).unwrap();
    for r in [0.1f64, 0.5, 1.0] {
        let v = tmsv_matrix(r);
        // Partial transpose on B, then the oracle spectrum.
        let ppt_oracle = 1.0 / oracle_symplectic(&partial_transpose(&v, &p, "B").unwrap())[0];
        assert!((ppt_oracle - (2.0 * r).exp()).abs() < 1e-9 * ppt_oracle);
        // Schur complement through a nalgebra inverse.
        let nv = to_na(&v);
        let (a, b) = ([0usize, 2], [1usize, 3]);
        let va = nv.select_rows(&a).select_columns(&a);
        let vab = nv.select_rows(&a).select_columns(&b);
        let vb = nv.select_rows(&b).select_columns(&b);
        let sc = &vb - vab.transpose() * va.try_inverse().unwrap() * &vab;
        let sc = Matrix::from_fn(2, 2, |i, j| sc[(i, j)]);
        let st_oracle = 1.0 / oracle_symplectic(&sc)[0];
        assert!((st_oracle - (2.0 * r).cosh()).abs() < 1e-9 * st_oracle);
        let ours = schur_complement(&v, &[0, 2]).unwrap();
        assert!((&ours.matrix - &sc).max_abs() < 1e-9 * v.max_abs());

        let kp = kappa(&v, &cone_spec(Theory::Ppt, &p).unwrap(), Method::Analytic).unwrap();
        let kt = kappa(
            &v,
            &cone_spec(Theory::Steering, &p).unwrap(),
            Method::Analytic,
        )
        .unwrap();
        assert!((kp.kappa - ppt_oracle).abs() < 1e-6);
        assert!((kt.kappa - st_oracle).abs() < 1e-6);
    }
}

#[test]
fn nonclassicality_kappa_is_inverse_min_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let one = ModePartition::uniform(2, "A").unwrap();
    let spec = cone_spec(Theory::Nonclassicality, &one).unwrap();
    for _ in 0..20 {
        let v = random_qcm(2, &mut rng);
        let lmin = to_na(&v).symmetric_eigen().eigenvalues.min();
        let k = kappa(&v, &spec, Method::Analytic).unwrap().kappa;
        assert!((k - (1.0 / lmin).max(1.0)).abs() < 1e-10);
        assert!((sym_eigen(&v).min() - lmin).abs() < 1e-10);
    }
}
