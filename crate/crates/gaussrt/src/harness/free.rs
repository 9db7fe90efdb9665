//! Random free operations for each built-in theory.
//!
//! Nonclassicality: passive symplectics, loss, thermal noise, classical
//! ancillas, beam splitters and discarding. Bipartite theories: anything
//! local (symplectics, loss, beam splitters inside one party, product
//! ancillas, discarding one party's extra modes) plus correlated random
//! displacements. Every family is also offered through a finite-squeezing
//! Choi matrix of a lossy channel.

use gaussrt_core::channels::{ChoiChannel, CmMap, GaussianChannel, NoiseKernel};
use gaussrt_core::cones::Theory;
use gaussrt_core::sample::{random_local_symplectic, random_passive, random_psd, random_pure};
use gaussrt_core::{Matrix, ModePartition, Result};
use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct SampledChannel {
    pub family: &'static str,
    pub channel: GaussianChannel,
}

fn loss_on_subset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CmMap {
    let modes: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.6)).collect();
    CmMap::Loss {
        eta: rng.random_range(0.05..1.0),
        nbar: rng.random_range(0.0..1.5),
        modes: if modes.is_empty() { None } else { Some(modes) },
    }
}

fn choi_loss<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GaussianChannel> {
    let eta: f64 = rng.random_range(0.1..1.0);
    let nbar: f64 = rng.random_range(0.0..1.0);
    let x = Matrix::identity(2 * n).scale(eta.sqrt());
    let y = Matrix::identity(2 * n).scale((1.0 - eta) * (2.0 * nbar + 1.0));
    Ok(GaussianChannel::Choi(ChoiChannel::from_linear_map(
        &x, &y, 2.0,
    )?))
}

/// Pairs of distinct modes that share a party label (any pair when
/// `same_party` is false).
fn mode_pairs(p: &ModePartition, same_party: bool) -> Vec<(usize, usize)> {
    let labels = p.labels();
    let mut out = Vec::new();
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            if !same_party || labels[a] == labels[b] {
                out.push((a, b));
            }
        }
    }
    out
}

/// Modes that can be discarded while leaving every party non-empty.
fn discardable(p: &ModePartition) -> Vec<usize> {
    let labels = p.labels();
    (0..labels.len())
        .filter(|&k| labels.iter().filter(|l| **l == labels[k]).count() > 1)
        .collect()
}

/// Draws one free channel for `theory` acting on states labelled by `p`.
pub fn sample_free_channel<R: Rng + ?Sized>(
    theory: Theory,
    p: &ModePartition,
    rng: &mut R,
) -> Result<SampledChannel> {
    let n = p.n_modes();
    let local = theory.is_bipartite();
    let pairs = mode_pairs(p, local);
    let drop = discardable(p);
    let mut families = vec![
        "symplectic",
        "loss",
        "displacement",
        "ancilla",
        "choi_loss",
        "composite",
    ];
    if !pairs.is_empty() {
        families.push("beam_splitter");
    }
    if !drop.is_empty() {
        families.push("discard");
    }
    let family = *families.choose(rng).expect("non-empty");
    let map = |m: CmMap| GaussianChannel::Map(m);
    let symplectic = |rng: &mut R| -> Result<CmMap> {
        Ok(CmMap::Symplectic(if local {
            random_local_symplectic(p, 0.5, rng)?
        } else {
            random_passive(n, rng)
        }))
    };
    let channel = match family {
        "symplectic" => map(symplectic(rng)?),
        "loss" => map(loss_on_subset(n, rng)),
        "displacement" => map(CmMap::RandomDisplacement(NoiseKernel::new(random_psd(
            2 * n,
            rng.random_range(0.0..1.0),
            rng,
        ))?)),
        "ancilla" => {
            let party = *p.parties().choose(rng).expect("non-empty");
            let w = if local {
                random_pure(1, 0.5, rng)
            } else {
                Matrix::identity(2).scale(1.0 + 2.0 * rng.random_range(0.0..1.0))
            };
            map(CmMap::AddAncilla {
                w,
                labels: ModePartition::new([party])?,
            })
        }
        "choi_loss" => choi_loss(n, rng)?,
        "beam_splitter" => {
            let pair = *pairs.choose(rng).expect("non-empty");
            map(CmMap::BeamSplitter {
                theta: rng.random_range(0.0..std::f64::consts::PI),
                pairs: vec![pair],
            })
        }
        "discard" => {
            let k = *drop.choose(rng).expect("non-empty");
            map(CmMap::Discard {
                keep: (0..n).filter(|&m| m != k).collect(),
            })
        }
        "composite" => GaussianChannel::Sequence(vec![
            map(symplectic(rng)?),
            map(loss_on_subset(n, rng)),
            map(symplectic(rng)?),
        ]),
        _ => unreachable!("family list is fixed"),
    };
    Ok(SampledChannel { family, channel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussrt_core::cones::{cone_spec, membership, MEMBERSHIP_TOL};
    use gaussrt_core::sample::random_member;
    use gaussrt_core::symplectic::validate_qcm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_channels_keep_free_states_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = ModePartition::new(["A", "B", "A"]).unwrap();
        for th in Theory::ALL {
            let spec = cone_spec(th, &p).unwrap();
            for _ in 0..12 {
                let ch = sample_free_channel(th, &p, &mut rng).unwrap();
                let v = random_member(&spec, rng.random_bool(0.5), &mut rng).unwrap();
                let out = ch.channel.apply(&v).unwrap();
                assert!(validate_qcm(&out, 1e-9).unwrap().valid, "{}", ch.family);
                let q = ch.channel.output_partition(&p).unwrap();
                let out_spec = cone_spec(th, &q).unwrap();
                assert!(
                    membership(&out, &out_spec, MEMBERSHIP_TOL).unwrap(),
                    "{th} {}",
                    ch.family
                );
            }
        }
    }
}
