//! Disagreement counts between a hypothesis and the truth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::binom::binom_u64;
use super::space::ClassEnumerator;
use crate::error::{Error, Result};
use crate::model::Hypothesis;

/// m-order and pairwise disagreement between `y` and `y*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisagreementStats {
    /// `d`: m-subsets within a community under `y*` but not under `y`.
    pub d: u64,
    /// m-subsets within a community under `y` but not under `y*`.
    pub d_reverse: u64,
    /// Number of m-subsets where the two membership tensors differ.
    pub sym_diff: u64,
    /// Pairwise disagreement `d~` (the `m = 2` count).
    pub d_pair: u64,
}

impl DisagreementStats {
    /// The event index `t` of the union bound; equal to `d`.
    pub fn t(&self) -> u64 {
        self.d
    }

    /// Whether the one-sided count equals half the symmetric difference.
    pub fn one_sided_is_half(&self) -> bool {
        2 * self.d == self.sym_diff
    }
}

/// `overlap[i][j] = |C*_i ∩ C_j|` for true communities `i < r` and `j <= r`
/// (column `r` is the isolated set of `y`).
pub fn overlap_matrix(y: &Hypothesis, y_star: &Hypothesis) -> Result<Vec<Vec<usize>>> {
    y.check_shape(y_star)?;
    let r = y.r();
    let mut o = vec![vec![0usize; r + 1]; r];
    for (&ls, &l) in y_star.labels().iter().zip(y.labels()) {
        if ls < r {
            o[ls][l] += 1;
        }
    }
    Ok(o)
}

fn one_sided(o: &[Vec<usize>], k: usize, m: usize, transpose: bool) -> u64 {
    let r = o.len();
    let cm = binom_u64(k, m);
    (0..r)
        .map(|i| {
            let kept: u64 = (0..r)
                .map(|j| if transpose { o[j][i] } else { o[i][j] })
                .map(|c| binom_u64(c, m))
                .sum();
            cm - kept
        })
        .sum()
}

/// Disagreement statistics of `y` against `y_star` at order `m`.
pub fn disagreement(y: &Hypothesis, y_star: &Hypothesis, m: usize) -> Result<DisagreementStats> {
    if m < 2 || m > y.k() {
        return Err(Error::InvalidConfig(format!("need 2 <= m <= k, got m = {m}")));
    }
    let o = overlap_matrix(y, y_star)?;
    let k = y.k();
    let d = one_sided(&o, k, m, false);
    let d_reverse = one_sided(&o, k, m, true);
    let d_pair = one_sided(&o, k, 2, false);
    Ok(DisagreementStats { d, d_reverse, sym_diff: d + d_reverse, d_pair })
}

/// Per-community misclassification counts after the canonical reordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisclassificationStats {
    /// `M_i`: nodes of true community `i` outside its matched block.
    pub misclassified: Vec<u64>,
    /// `N1(i) = M_i * |C*_i ∩ C~_i|`.
    pub n1: Vec<u64>,
    /// `N2(i) = C(M_i, 2) - sum_{j != i, j < r} C(|C*_i ∩ C~_j|, 2)`.
    pub n2: Vec<u64>,
    /// `reordering[i]` = community id of `y` placed in slot `i`; slot `r` is the isolated set.
    pub reordering: Vec<usize>,
}

impl MisclassificationStats {
    /// `sum_i (N1(i) + N2(i))`, which equals the pairwise disagreement.
    pub fn pair_total(&self) -> u64 {
        self.n1.iter().zip(&self.n2).map(|(a, b)| a + b).sum()
    }
}

/// Reorders the communities of `y` against `y_star` and returns `M`, `N1`, `N2`.
///
/// A community of `y` holding more than `k/2` nodes of true community `i` is
/// placed in slot `i`; the rest fill the free slots in increasing id order.
pub fn misclassification_stats(y: &Hypothesis, y_star: &Hypothesis) -> Result<MisclassificationStats> {
    let o = overlap_matrix(y, y_star)?;
    let (r, k) = (y.r(), y.k());
    let mut slot: Vec<Option<usize>> = vec![None; r];
    let mut used = vec![false; r];
    for i in 0..r {
        if let Some(j) = (0..r).find(|&j| 2 * o[i][j] > k) {
            slot[i] = Some(j);
            used[j] = true;
        }
    }
    let mut free = (0..r).filter(|&j| !used[j]);
    let mut reordering: Vec<usize> = slot
        .into_iter()
        .map(|s| s.unwrap_or_else(|| free.next().expect("as many free communities as free slots")))
        .collect();
    reordering.push(r);

    let mut misclassified = Vec::with_capacity(r);
    let mut n1 = Vec::with_capacity(r);
    let mut n2 = Vec::with_capacity(r);
    for i in 0..r {
        let kept = o[i][reordering[i]];
        let mi = (k - kept) as u64;
        let cross: u64 = (0..r)
            .filter(|&s| s != i)
            .map(|s| binom_u64(o[i][reordering[s]], 2))
            .sum();
        misclassified.push(mi);
        n1.push(mi * kept as u64);
        n2.push(binom_u64(mi as usize, 2) - cross);
    }
    Ok(MisclassificationStats { misclassified, n1, n2, reordering })
}

/// Histogram `t -> D_t` of the disagreement `d` over all tensor classes.
pub fn count_d_t(
    n: usize,
    r: usize,
    k: usize,
    m: usize,
    y_star: &Hypothesis,
    cap: u64,
) -> Result<BTreeMap<u64, u64>> {
    let e = ClassEnumerator::new(n, r, k, cap)?;
    let mut hist = BTreeMap::new();
    for y in e.iter() {
        let t = disagreement(&y, y_star, m)?.d;
        *hist.entry(t).or_insert(0) += 1;
    }
    Ok(hist)
}
