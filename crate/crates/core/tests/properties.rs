use gaussrt_core::channels::{make_channel, ChannelKind};
use gaussrt_core::cones::{cone_spec, kappa, membership, Method, Theory, MEMBERSHIP_TOL};
use gaussrt_core::linalg::{sym_eigen, HermMatrix};
use gaussrt_core::sample::{random_member, random_psd, random_qcm, random_symplectic};
use gaussrt_core::sdp::{from_lmi_text, to_lmi_text, SdpProblem};
use gaussrt_core::states::{coherent_overlap, make_state, StateKind};
use gaussrt_core::symplectic::{
    direct_sum, partial_transpose, symplectic_eigenvalues, validate_qcm, williamson,
};
use gaussrt_core::{Matrix, ModePartition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ab(na: usize, nb: usize) -> ModePartition {
    ModePartition::bipartite(na, nb).unwrap()
}

const ANALYTIC: [Theory; 3] = [Theory::Nonclassicality, Theory::Ppt, Theory::Steering];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symplectic_spectrum_is_invariant(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let v = random_qcm(n, &mut r);
        let s = random_symplectic(n, 0.4, &mut r);
        let a = symplectic_eigenvalues(&v).unwrap();
        let b = symplectic_eigenvalues(&s.congruence(&v).symmetrize()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
        prop_assert!(a[0] >= 1.0 - 1e-9);
    }

    #[test]
    fn williamson_diagonalizes(seed in any::<u64>(), n in 1usize..5) {
        let v = random_qcm(n, &mut rng(seed));
        let w = williamson(&v).unwrap();
        let mut d = w.d.clone();
        d.extend_from_slice(&w.d);
        let direct = w.s.congruence(&v);
        prop_assert!((&direct - &Matrix::from_diag(&d)).max_abs() < 1e-8 * v.max_abs());
        prop_assert!(w.d.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>()) {
        let p = ab(1, 2);
        let v = random_qcm(3, &mut rng(seed));
        let t = partial_transpose(&partial_transpose(&v, &p, "B").unwrap(), &p, "B").unwrap();
        prop_assert_eq!(t, v);
    }

    #[test]
    fn hermitian_embedding_preserves_min_eigenvalue(seed in any::<u64>(), d in 1usize..6) {
        let mut r = rng(seed);
        let re = random_psd(d, 1.0, &mut r);
        let g = random_psd(d, 1.0, &mut r);
        let im = Matrix::from_fn(d, d, |i, j| if i == j { 0.0 } else if i < j { g[(i, j)] } else { -g[(j, i)] });
        let h = HermMatrix::new(re, im, 1e-12).unwrap();
        let lmin = sym_eigen(&h.embed()).min();
        prop_assert!((lmin - h.min_eigenvalue()).abs() < 1e-12);
    }

    #[test]
    fn kappa_scaling_and_psd_monotonicity(seed in any::<u64>(), s in 1.0f64..3.0) {
        let mut r = rng(seed);
        let p = ab(1, 1);
        let v = random_qcm(2, &mut r);
        let w = &v + &random_psd(4, 0.5, &mut r);
        for th in ANALYTIC {
            let spec = cone_spec(th, &p).unwrap();
            let kv = kappa(&v, &spec, Method::Analytic).unwrap().kappa;
            let ks = kappa(&v.scale(s), &spec, Method::Analytic).unwrap().kappa;
            prop_assert!(ks >= kv / s - 1e-12);
            if ks > 1.0 {
                prop_assert!((ks - kv / s).abs() < 1e-9 * kv);
            }
            let kw = kappa(&w, &spec, Method::Analytic).unwrap().kappa;
            prop_assert!(kw <= kv + 1e-9);
        }
    }

    #[test]
    fn tensorization_for_analytic_theories(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ab(1, 1);
        let v = random_qcm(2, &mut r);
        let w = random_qcm(2, &mut r);
        let (vw, pvw) = direct_sum(&v, &p, &w, &p).unwrap();
        for th in ANALYTIC {
            let k = |m: &Matrix, q: &ModePartition| kappa(m, &cone_spec(th, q).unwrap(), Method::Analytic).unwrap().kappa;
            let joint = k(&vw, &pvw);
            prop_assert!((joint - k(&v, &p).max(k(&w, &p))).abs() < 1e-9 * joint);
        }
    }

    #[test]
    fn loss_output_is_physical(seed in any::<u64>(), eta in 0.0f64..=1.0, nbar in 0.0f64..2.0) {
        let v = random_qcm(2, &mut rng(seed));
        let ch = make_channel(ChannelKind::Loss { eta, nbar }).unwrap();
        let out = ch.apply(&v).unwrap();
        prop_assert!(validate_qcm(&out, 1e-9).unwrap().valid);
    }

    #[test]
    fn cone_members_are_convex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = ab(1, 1);
        for th in Theory::ALL {
            let spec = cone_spec(th, &p).unwrap();
            let a = random_member(&spec, false, &mut r).unwrap();
            let b = random_member(&spec, true, &mut r).unwrap();
            prop_assert!(membership(&(&a + &b).scale(0.5), &spec, MEMBERSHIP_TOL).unwrap());
        }
    }

    #[test]
    fn coherent_overlap_is_a_probability(seed in any::<u64>(), u0 in -2.0f64..2.0, u1 in -2.0f64..2.0) {
        let v = random_qcm(1, &mut rng(seed));
        let part = ModePartition::uniform(1, "A").unwrap();
        let st = gaussrt_core::states::GaussianState::new(
            gaussrt_core::CovMatrix::new(v).unwrap(), vec![0.3, -0.1], part,
        ).unwrap();
        let o = coherent_overlap(&st, &[u0, u1]).unwrap();
        prop_assert!(o > 0.0 && o <= 1.0 + 1e-12);
        let coh = make_state(&StateKind::Coherent { u: vec![u0, u1] }, None).unwrap();
        prop_assert!((coherent_overlap(&coh, &[u0, u1]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lmi_text_round_trip(seed in any::<u64>(), m in 1usize..4, d in 1usize..4) {
        let mut r = rng(seed);
        let obj: Vec<f64> = (0..m).map(|i| i as f64 - 0.5).collect();
        let mut p = SdpProblem::new(obj);
        let c = HermMatrix::from_real(random_psd(d, 1.0, &mut r));
        let coeffs = (0..m)
            .map(|i| (i % 2 == 0).then(|| HermMatrix::from_real(random_psd(d, 1.0, &mut r))))
            .collect();
        p.add_block(c, coeffs);
        p.add_lower_bound(0, 1.0);
        let back = from_lmi_text(&to_lmi_text(&p)).unwrap();
        prop_assert_eq!(back, p);
    }
}
