//! Random symplectic matrices, covariance matrices and cone members.
//!
//! Everything is driven by a caller-supplied [`Rng`], so seeded generators
//! give reproducible corpora.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cones::{FreeConeSpec, Theory};
use crate::linalg::{expm, Matrix};
use crate::partition::ModePartition;
use crate::symplectic::{embed_symplectic, mode_indices, omega_matrix};
use crate::{Error, Result};

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    scale: f64,
    rng: &mut R,
) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scale * standard_normal(rng))
}

/// Symmetric matrix with i.i.d. `N(0, scale^2)` entries on and above the
/// diagonal.
pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x = scale * standard_normal(rng);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// `exp(Omega H)` with `H` a random symmetric generator of size `scale`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Matrix {
    let h = random_symmetric(2 * n, scale, rng);
    expm(&(&omega_matrix(n) * &h))
}

/// Random orthogonal symplectic (passive) matrix.
pub fn random_passive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let a = random_symmetric(n, 1.0, rng);
    let g = gaussian_matrix(n, n, 1.0, rng);
    let b = (&g - &g.transpose()).scale(0.5);
    let mut h = Matrix::zeros(2 * n, 2 * n);
    let top: Vec<usize> = (0..n).collect();
    let bottom: Vec<usize> = (n..2 * n).collect();
    h.add_block(&top, &top, &a);
    h.add_block(&bottom, &bottom, &a);
    h.add_block(&top, &bottom, &b);
    h.add_block(&bottom, &top, &b.scale(-1.0));
    expm(&(&omega_matrix(n) * &h))
}

/// `S (D (+) D) S^T` with symplectic eigenvalues `D` uniform in
/// `[1, max_nu]` and `S` from [`random_symplectic`].
pub fn random_qcm_with<R: Rng + ?Sized>(n: usize, scale: f64, max_nu: f64, rng: &mut R) -> Matrix {
    let d: Vec<f64> = (0..n)
        .map(|_| 1.0 + (max_nu - 1.0) * rng.random::<f64>())
        .collect();
    let mut diag = d.clone();
    diag.extend_from_slice(&d);
    let s = random_symplectic(n, scale, rng);
    s.congruence(&Matrix::from_diag(&diag)).symmetrize()
}

pub fn random_qcm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    random_qcm_with(n, 0.3, 3.0, rng)
}

/// Random pure state `S S^T`.
pub fn random_pure<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Matrix {
    let s = random_symplectic(n, scale, rng);
    (&s * &s.transpose()).symmetrize()
}

/// `G G^T scale / dim` for Gaussian `G`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Matrix {
    let g = gaussian_matrix(dim, dim, 1.0, rng);
    (&g * &g.transpose())
        .scale(scale / dim.max(1) as f64)
        .symmetrize()
}

/// Direct sum of independent random symplectics, one per party.
pub fn random_local_symplectic<R: Rng + ?Sized>(
    partition: &ModePartition,
    scale: f64,
    rng: &mut R,
) -> Result<Matrix> {
    let n = partition.n_modes();
    let mut s = Matrix::identity(2 * n);
    for party in partition.parties() {
        let modes = partition.modes_of(party)?;
        let local = random_symplectic(modes.len(), scale, rng);
        s = &embed_symplectic(&local, &modes, n) * &s;
    }
    Ok(s)
}

/// Places one local matrix per party into a global `2N x 2N` matrix.
pub fn local_direct_sum(partition: &ModePartition, blocks: &[(&str, Matrix)]) -> Result<Matrix> {
    let n = partition.n_modes();
    let mut out = Matrix::zeros(2 * n, 2 * n);
    for (party, m) in blocks {
        let idx = mode_indices(&partition.modes_of(party)?, n);
        if m.rows() != idx.len() || m.cols() != idx.len() {
            return Err(Error::DimensionMismatch {
                expected: idx.len(),
                found: m.rows(),
            });
        }
        out.add_block(&idx, &idx, m);
    }
    Ok(out)
}

/// A random member of a built-in cone. With `pure` set, the sample lies on
/// the cone boundary (vacuum or a product of pure states); otherwise PSD
/// noise is added on top.
pub fn random_member<R: Rng + ?Sized>(
    spec: &FreeConeSpec,
    pure: bool,
    rng: &mut R,
) -> Result<Matrix> {
    let theory = spec
        .theory
        .ok_or_else(|| Error::Unsupported("cannot sample a custom cone".into()))?;
    let dim = spec.dim();
    let base = match theory {
        Theory::Nonclassicality => Matrix::identity(dim),
        _ => {
            let blocks = spec
                .partition
                .parties()
                .into_iter()
                .map(|p| {
                    let k = spec.partition.modes_of(p).map(|m| m.len())?;
                    Ok((p, random_pure(k, 0.3, rng)))
                })
                .collect::<Result<Vec<_>>>()?;
            local_direct_sum(&spec.partition, &blocks)?
        }
    };
    if pure {
        return Ok(base);
    }
    let noise = random_psd(dim, 0.5 * rng.random::<f64>(), rng);
    Ok(&base + &noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{cone_spec, membership, MEMBERSHIP_TOL};
    use crate::symplectic::{symplectic_residual, validate_qcm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_matrices_are_symplectic_and_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            let s = random_symplectic(n, 0.3, &mut rng);
            assert!(symplectic_residual(&s).unwrap() < 1e-12);
            let o = random_passive(n, &mut rng);
            assert!(symplectic_residual(&o).unwrap() < 1e-12);
            assert!((&(&o * &o.transpose()) - &Matrix::identity(2 * n)).max_abs() < 1e-12);
            let v = random_qcm(n, &mut rng);
            assert!(validate_qcm(&v, 1e-9).unwrap().valid);
        }
        let p = ModePartition::new(["A", "B", "A"]).unwrap();
        let s = random_local_symplectic(&p, 0.3, &mut rng).unwrap();
        assert!(symplectic_residual(&s).unwrap() < 1e-12);
        // No coupling between A and B.
        assert_eq!(s[(0, 1)], 0.0);
        assert_eq!(s[(1, 3)], 0.0);
    }

    #[test]
    fn normal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..20000).map(|_| standard_normal(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn members_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModePartition::bipartite(1, 2).unwrap();
        for th in Theory::ALL {
            let spec = cone_spec(th, &p).unwrap();
            for pure in [true, false] {
                let v = random_member(&spec, pure, &mut rng).unwrap();
                assert!(validate_qcm(&v, 1e-9).unwrap().valid);
                assert!(
                    membership(&v, &spec, MEMBERSHIP_TOL).unwrap(),
                    "{th} pure={pure}"
                );
            }
        }
    }
}
