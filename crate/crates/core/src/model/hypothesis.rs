use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A membership labeling `y` of `n` nodes.
///
/// Labels `0..r` are community ids, label `r` marks an isolated node. Exactly
/// `k` nodes carry each community id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHypothesis", into = "RawHypothesis")]
pub struct Hypothesis {
    r: usize,
    k: usize,
    labels: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawHypothesis {
    r: usize,
    k: usize,
    labels: Vec<usize>,
}

impl TryFrom<RawHypothesis> for Hypothesis {
    type Error = Error;
    fn try_from(raw: RawHypothesis) -> Result<Self> {
        Hypothesis::new(raw.labels, raw.r, raw.k)
    }
}

impl From<Hypothesis> for RawHypothesis {
    fn from(h: Hypothesis) -> Self {
        RawHypothesis { r: h.r, k: h.k, labels: h.labels }
    }
}

impl Hypothesis {
    pub fn new(labels: Vec<usize>, r: usize, k: usize) -> Result<Self> {
        let mut counts = vec![0usize; r + 1];
        for (i, &l) in labels.iter().enumerate() {
            if l > r {
                return Err(Error::InvalidHypothesis(format!(
                    "node {i} has label {l} > r = {r}"
                )));
            }
            counts[l] += 1;
        }
        if let Some(c) = (0..r).find(|&c| counts[c] != k) {
            return Err(Error::InvalidHypothesis(format!(
                "community {c} has {} nodes, expected {k}",
                counts[c]
            )));
        }
        Ok(Self { r, k, labels })
    }

    /// Builds a hypothesis from explicit community member lists; every node
    /// not listed is isolated.
    pub fn from_communities(n: usize, communities: &[Vec<usize>], k: usize) -> Result<Self> {
        let r = communities.len();
        let mut labels = vec![r; n];
        for (c, members) in communities.iter().enumerate() {
            for &v in members {
                if v >= n {
                    return Err(Error::InvalidHypothesis(format!("node {v} >= n = {n}")));
                }
                if labels[v] != r {
                    return Err(Error::InvalidHypothesis(format!("node {v} listed twice")));
                }
                labels[v] = c;
            }
        }
        Self::new(labels, r, k)
    }

    pub(crate) fn from_labels_unchecked(labels: Vec<usize>, r: usize, k: usize) -> Self {
        debug_assert!(Self::new(labels.clone(), r, k).is_ok());
        Self { r, k, labels }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn isolated_label(&self) -> usize {
        self.r
    }

    /// Sorted member lists `C_0(y), …, C_{r-1}(y)`.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(self.k); self.r];
        for (v, &l) in self.labels.iter().enumerate() {
            if l < self.r {
                out[l].push(v);
            }
        }
        out
    }

    pub fn isolated(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v] == self.r).collect()
    }

    /// Membership indicator of an m-subset: 1 iff all nodes share a community id.
    pub fn membership_indicator(&self, subset: &[usize]) -> Result<bool> {
        validate_subset(subset, self.n())?;
        Ok(self.is_within(subset))
    }

    /// Unchecked variant of [`Self::membership_indicator`].
    #[inline]
    pub fn is_within(&self, subset: &[usize]) -> bool {
        let first = self.labels[subset[0]];
        first < self.r && subset[1..].iter().all(|&v| self.labels[v] == first)
    }

    /// Representative of the tensor class: community ids reassigned in
    /// increasing order of each community's smallest member.
    pub fn canonical(&self) -> Hypothesis {
        let mut map = vec![usize::MAX; self.r + 1];
        map[self.r] = self.r;
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Hypothesis { r: self.r, k: self.k, labels }
    }

    /// Whether both labelings induce the same membership tensor.
    pub fn same_class(&self, other: &Hypothesis) -> bool {
        self.r == other.r
            && self.k == other.k
            && self.n() == other.n()
            && self.canonical().labels == other.canonical().labels
    }

    /// Applies a permutation of community ids; the isolated label is fixed.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Hypothesis> {
        let mut seen = vec![false; self.r];
        if perm.len() != self.r || perm.iter().any(|&c| c >= self.r || std::mem::replace(&mut seen[c], true)) {
            return Err(Error::InvalidHypothesis(format!("{perm:?} is not a permutation of 0..{}", self.r)));
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| if l < self.r { perm[l] } else { l })
            .collect();
        Ok(Hypothesis { r: self.r, k: self.k, labels })
    }

    pub fn check_shape(&self, other: &Hypothesis) -> Result<()> {
        if self.n() != other.n() || self.r != other.r || self.k != other.k {
            return Err(Error::ShapeMismatch(format!(
                "(n,r,k) = ({},{},{}) vs ({},{},{})",
                self.n(),
                self.r,
                self.k,
                other.n(),
                other.r,
                other.k
            )));
        }
        Ok(())
    }
}

/// Checks that `subset` is strictly increasing with entries below `n`.
pub fn validate_subset(subset: &[usize], n: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    for w in subset.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidSubset(format!(
                "{subset:?} is not strictly increasing (duplicate or unsorted ids)"
            )));
        }
    }
    if let Some(&v) = subset.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidSubset(format!("node {v} out of range for n = {n}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_examples() {
        let y = Hypothesis::new(vec![0, 0, 1, 1], 2, 2).unwrap();
        assert!(y.membership_indicator(&[0, 1]).unwrap());
        assert!(!y.membership_indicator(&[0, 2]).unwrap());
        // r = 1: label 1 is the isolated label
        let y = Hypothesis::new(vec![0, 0, 1, 1], 1, 2).unwrap();
        assert!(!y.membership_indicator(&[2, 3]).unwrap());
    }

    #[test]
    fn indicator_rejects_bad_subsets() {
        let y = Hypothesis::new(vec![0, 0, 1, 1], 2, 2).unwrap();
        assert!(matches!(y.membership_indicator(&[1, 1]), Err(Error::InvalidSubset(_))));
        assert!(matches!(y.membership_indicator(&[0, 4]), Err(Error::InvalidSubset(_))));
        assert!(matches!(y.membership_indicator(&[2, 1]), Err(Error::InvalidSubset(_))));
    }

    #[test]
    fn rejects_unbalanced_labels() {
        assert!(Hypothesis::new(vec![0, 0, 0, 1], 1, 2).is_err());
        assert!(Hypothesis::new(vec![0, 3, 1, 1], 2, 1).is_err());
    }

    #[test]
    fn canonical_orders_by_smallest_member() {
        let y = Hypothesis::new(vec![2, 1, 1, 0, 0, 2], 2, 2).unwrap();
        // node 0 is isolated (label 2 = r); community with node 1 comes first
        assert_eq!(y.canonical().labels(), &[2, 0, 0, 1, 1, 2]);
        let z = y.relabeled(&[1, 0]).unwrap();
        assert!(y.same_class(&z));
        assert_ne!(y, z);
    }
}
