//! Assignment of modes to named parties.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// One party label per mode, in mode order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModePartition {
    labels: Vec<String>,
}

impl ModePartition {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::ZeroModes);
        }
        if let Some(i) = labels.iter().position(|l| l.trim().is_empty()) {
            return Err(Error::InvalidPartition(format!(
                "mode {i} has an empty party label"
            )));
        }
        Ok(Self { labels })
    }

    /// All `n` modes belong to one party.
    pub fn uniform(n: usize, party: &str) -> Result<Self> {
        Self::new(core::iter::repeat_n(party, n))
    }

    /// First `n_a` modes labelled `A`, remaining `n_b` labelled `B`.
    pub fn bipartite(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::InvalidPartition(format!(
                "empty party in {n_a}:{n_b}"
            )));
        }
        Self::new(core::iter::repeat_n("A", n_a).chain(core::iter::repeat_n("B", n_b)))
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Distinct party names in order of first appearance.
    pub fn parties(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for l in &self.labels {
            if !out.contains(&l.as_str()) {
                out.push(l);
            }
        }
        out
    }

    pub fn contains(&self, party: &str) -> bool {
        self.labels.iter().any(|l| l == party)
    }

    /// Mode indices of `party`, ascending.
    pub fn modes_of(&self, party: &str) -> Result<Vec<usize>> {
        let modes: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| *l == party)
            .map(|(i, _)| i)
            .collect();
        if modes.is_empty() {
            return Err(Error::UnknownParty(party.to_string()));
        }
        Ok(modes)
    }

    /// The two parties of a bipartite partition, in order of appearance.
    pub fn bipartition(&self) -> Result<(String, String)> {
        match self.parties().as_slice() {
            [a, b] => Ok((a.to_string(), b.to_string())),
            p => Err(Error::InvalidPartition(format!(
                "expected exactly two parties, found {}",
                p.len()
            ))),
        }
    }

    /// Labels of `self` followed by labels of `other`; equal names merge.
    pub fn concat(&self, other: &ModePartition) -> ModePartition {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        ModePartition { labels }
    }

    /// Keeps the modes of the listed parties; returns the reduced partition
    /// and the kept mode indices.
    pub fn restrict(&self, keep: &[&str]) -> Result<(ModePartition, Vec<usize>)> {
        if keep.is_empty() {
            return Err(Error::InvalidPartition("empty keep set".to_string()));
        }
        for p in keep {
            if !self.contains(p) {
                return Err(Error::UnknownParty(p.to_string()));
            }
        }
        let modes: Vec<usize> = (0..self.labels.len())
            .filter(|&i| keep.contains(&self.labels[i].as_str()))
            .collect();
        let labels = modes.iter().map(|&i| self.labels[i].clone()).collect();
        Ok((ModePartition { labels }, modes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bookkeeping() {
        let p = ModePartition::bipartite(1, 1).unwrap();
        let pp = p.concat(&p);
        assert_eq!(pp.labels(), &["A", "B", "A", "B"]);
        assert_eq!(pp.parties(), vec!["A", "B"]);
        assert_eq!(pp.modes_of("B").unwrap(), vec![1, 3]);
        let (r, m) = pp.restrict(&["A"]).unwrap();
        assert_eq!(r.n_modes(), 2);
        assert_eq!(m, vec![0, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ModePartition::new(Vec::<String>::new()).is_err());
        assert!(ModePartition::new(["A", ""]).is_err());
        assert!(ModePartition::bipartite(0, 2).is_err());
        let p = ModePartition::uniform(2, "A").unwrap();
        assert!(matches!(p.modes_of("B"), Err(Error::UnknownParty(_))));
        assert!(p.bipartition().is_err());
        assert!(p.restrict(&[]).is_err());
    }
}
