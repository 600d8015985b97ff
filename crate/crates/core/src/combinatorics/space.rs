//! Counting and enumeration of the hypothesis space.
//!
//! A tensor class (unordered choice of `r` disjoint `k`-blocks) is encoded in a
//! mixed radix: digit 0 ranks the set `S` of `r*k` non-isolated nodes among
//! the `C(n, rk)` subsets, and digit `j = 1..=r` picks the `k - 1` companions
//! of the smallest node still unassigned in `S`, among `C((r-j+1)k - 1, k - 1)`
//! options. Blocks are produced in increasing order of their smallest member,
//! which is exactly the canonical labeling.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::binom::{binom_u64, factorial, PascalTable};
use super::subsets::SubsetIndexer;
use crate::error::{Error, Result};
use crate::model::Hypothesis;

/// Default cap on the number of tensor classes an exhaustive routine will visit.
pub const DEFAULT_CLASS_CAP: u64 = 10_000_000;

/// Exact sizes of the hypothesis space `Y` for `(n, r, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSpace {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    /// `|Y| = n! / ((n - rk)! (k!)^r)`.
    #[serde(with = "biguint_str")]
    pub labeled_size: BigUint,
    /// `|Y| / r!`.
    #[serde(with = "biguint_str")]
    pub class_size: BigUint,
}

mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl HypothesisSpace {
    /// `ln |Y|` from the exact integer.
    pub fn ln_labeled_size(&self) -> f64 {
        crate::numeric::ln_biguint(&self.labeled_size)
    }

    pub fn class_size_u64(&self) -> Option<u64> {
        self.class_size.to_u64()
    }
}

fn check_space(n: usize, r: usize, k: usize) -> Result<()> {
    if r == 0 || k == 0 {
        return Err(Error::InvalidConfig("r and k must be positive".into()));
    }
    if r.checked_mul(k).is_none_or(|rk| rk > n) {
        return Err(Error::InvalidConfig(format!("r*k = {}*{} exceeds n = {n}", r, k)));
    }
    Ok(())
}

pub fn space_size(n: usize, r: usize, k: usize) -> Result<HypothesisSpace> {
    check_space(n, r, k)?;
    let n64 = n as u64;
    let rk = (r * k) as u64;
    let kf = factorial(k as u64);
    let denom = factorial(n64 - rk) * kf.pow(r as u32);
    let labeled_size = factorial(n64) / denom;
    let class_size = &labeled_size / factorial(r as u64);
    Ok(HypothesisSpace { n, r, k, labeled_size, class_size })
}

/// `ln |Y|` through log-gamma (independent of the big-integer route).
pub fn ln_space_size_lgamma(n: usize, r: usize, k: usize) -> f64 {
    use super::binom::ln_factorial;
    ln_factorial(n as u64)
        - ln_factorial((n - r * k) as u64)
        - r as f64 * ln_factorial(k as u64)
}

/// Random access to tensor-class representatives by index.
#[derive(Debug, Clone)]
pub struct ClassEnumerator {
    n: usize,
    r: usize,
    k: usize,
    support: SubsetIndexer,
    table: PascalTable,
    /// radix of digits 1..=r
    block_radix: Vec<u64>,
    len: u64,
}

impl ClassEnumerator {
    /// Enumerator over all tensor classes, refusing spaces larger than `cap`.
    pub fn new(n: usize, r: usize, k: usize, cap: u64) -> Result<Self> {
        check_space(n, r, k)?;
        if n > crate::model::config::MAX_NODES {
            return Err(Error::InvalidConfig(format!("n = {n} too large")));
        }
        let space = space_size(n, r, k)?;
        let len = match space.class_size.to_u64() {
            Some(v) if v <= cap => v,
            _ => {
                return Err(Error::GuardExceeded {
                    what: format!("tensor classes of (n={n}, r={r}, k={k})"),
                    needed: space.class_size.to_string(),
                    cap,
                })
            }
        };
        let block_radix = (0..r).map(|j| binom_u64((r - j) * k - 1, k - 1)).collect();
        Ok(Self {
            n,
            r,
            k,
            support: SubsetIndexer::new(n, r * k),
            table: PascalTable::new(r * k),
            block_radix,
            len,
        })
    }

    pub fn with_default_cap(n: usize, r: usize, k: usize) -> Result<Self> {
        Self::new(n, r, k, DEFAULT_CLASS_CAP)
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Canonical representative of class `index`.
    pub fn unrank(&self, index: u64) -> Result<Hypothesis> {
        if index >= self.len {
            return Err(Error::RankOutOfRange { rank: index, n: self.n, m: self.r * self.k, total: self.len });
        }
        let mut labels = vec![self.r; self.n];
        self.fill_labels(index, &mut labels);
        Ok(Hypothesis::from_labels_unchecked(labels, self.r, self.k))
    }

    /// Writes the labels of class `index` into `labels` (length `n`).
    pub fn fill_labels(&self, index: u64, labels: &mut [usize]) {
        let (r, k) = (self.r, self.k);
        let mut digits = vec![0u64; r];
        let mut rest = index;
        for j in (0..r).rev() {
            digits[j] = rest % self.block_radix[j];
            rest /= self.block_radix[j];
        }
        let support = self.support.unrank(rest).expect("support digit in range");
        labels.iter_mut().for_each(|l| *l = r);
        let mut remaining = support;
        let mut companions = Vec::with_capacity(k - 1);
        for (c, &digit) in digits.iter().enumerate() {
            let head = remaining[0];
            let tail_len = remaining.len() - 1;
            unrank_into(&self.table, tail_len, k - 1, digit, &mut companions);
            labels[head] = c;
            for &pos in &companions {
                labels[remaining[1 + pos]] = c;
            }
            let mut taken = vec![false; remaining.len()];
            taken[0] = true;
            for &pos in &companions {
                taken[1 + pos] = true;
            }
            remaining = remaining
                .iter()
                .zip(taken)
                .filter_map(|(&v, t)| (!t).then_some(v))
                .collect();
        }
    }

    /// Index of the tensor class of `y`.
    pub fn rank(&self, y: &Hypothesis) -> Result<u64> {
        if y.n() != self.n || y.r() != self.r || y.k() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "hypothesis (n,r,k)=({},{},{}) vs enumerator ({},{},{})",
                y.n(),
                y.r(),
                y.k(),
                self.n,
                self.r,
                self.k
            )));
        }
        let canon = y.canonical();
        let labels = canon.labels();
        let support: Vec<usize> = (0..self.n).filter(|&v| labels[v] < self.r).collect();
        let mut index = self.support.rank_unchecked(&support);
        let mut remaining = support;
        for c in 0..self.r {
            let tail = &remaining[1..];
            let positions: Vec<usize> =
                (0..tail.len()).filter(|&i| labels[tail[i]] == c).collect();
            let digit = rank_positions(&self.table, tail.len(), self.k - 1, &positions);
            index = index * self.block_radix[c] + digit;
            remaining.retain(|&v| labels[v] != c);
        }
        Ok(index)
    }

    /// Iterator over the canonical representatives with indices in `range`.
    pub fn iter_range(&self, range: Range<u64>) -> ClassIter<'_> {
        let end = range.end.min(self.len);
        ClassIter { e: self, next: range.start.min(end), end }
    }

    pub fn iter(&self) -> ClassIter<'_> {
        self.iter_range(0..self.len)
    }

    /// Splits `0..len` into at most `parts` contiguous, disjoint, non-empty ranges.
    pub fn chunks(&self, parts: usize) -> Vec<Range<u64>> {
        split_range(self.len, parts)
    }
}

pub(crate) fn split_range(len: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = (parts.max(1) as u64).min(len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for i in 0..parts {
        let size = base + u64::from(i < extra);
        if size > 0 {
            out.push(start..start + size);
        }
        start += size;
    }
    out
}

fn unrank_into(table: &PascalTable, n: usize, m: usize, rank: u64, out: &mut Vec<usize>) {
    out.clear();
    if m == 0 {
        return;
    }
    let total = table.get(n, m);
    let mut x = total - 1 - rank;
    let mut upper = n;
    for i in 0..m {
        let j = m - i;
        let mut a = upper - 1;
        while table.get(a, j) > x {
            a -= 1;
        }
        x -= table.get(a, j);
        out.push(n - 1 - a);
        upper = a;
    }
}

fn rank_positions(table: &PascalTable, n: usize, m: usize, subset: &[usize]) -> u64 {
    if m == 0 {
        return 0;
    }
    let total = table.get(n, m);
    let acc: u64 = subset
        .iter()
        .enumerate()
        .map(|(i, &c)| table.get(n - 1 - c, m - i))
        .sum();
    total - 1 - acc
}

/// Iterator over a contiguous index range of tensor classes.
#[derive(Debug, Clone)]
pub struct ClassIter<'a> {
    e: &'a ClassEnumerator,
    next: u64,
    end: u64,
}

impl Iterator for ClassIter<'_> {
    type Item = Hypothesis;

    fn next(&mut self) -> Option<Hypothesis> {
        if self.next >= self.end {
            return None;
        }
        let h = self.e.unrank(self.next).ok();
        self.next += 1;
        h
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for ClassIter<'_> {}

/// All tensor classes of `(n, r, k)`, one canonical representative each.
pub fn enumerate_classes(n: usize, r: usize, k: usize) -> Result<ClassEnumerator> {
    ClassEnumerator::with_default_cap(n, r, k)
}

/// All permutations of `0..r` in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..r).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..r).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Calls `f` on every labeled hypothesis of `Y` (classes times relabelings).
pub fn for_each_labeled<F: FnMut(&Hypothesis)>(
    n: usize,
    r: usize,
    k: usize,
    cap: u64,
    mut f: F,
) -> Result<()> {
    let e = ClassEnumerator::new(n, r, k, cap)?;
    let perms = permutations(r);
    let labeled = e.len().saturating_mul(perms.len() as u64);
    if labeled > cap {
        return Err(Error::GuardExceeded {
            what: format!("labeled hypotheses of (n={n}, r={r}, k={k})"),
            needed: labeled.to_string(),
            cap,
        });
    }
    for y in e.iter() {
        for perm in &perms {
            f(&y.relabeled(perm)?);
        }
    }
    Ok(())
}

/// Draws a labeled hypothesis uniformly from `Y`.
pub fn sample_uniform<R: rand::Rng + ?Sized>(n: usize, r: usize, k: usize, rng: &mut R) -> Result<Hypothesis> {
    check_space(n, r, k)?;
    let mut labels: Vec<usize> = (0..n).map(|i| if i < r * k { i / k } else { r }).collect();
    labels.shuffle(rng);
    Ok(Hypothesis::from_labels_unchecked(labels, r, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute force: all label vectors in [r+1]^n with k of each community id.
    fn brute_labeled(n: usize, r: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let total = (r + 1).pow(n as u32);
        for mut code in 0..total {
            let mut labels = vec![0; n];
            for l in labels.iter_mut() {
                *l = code % (r + 1);
                code /= r + 1;
            }
            if (0..r).all(|c| labels.iter().filter(|&&l| l == c).count() == k) {
                out.push(labels);
            }
        }
        out
    }

    #[test]
    fn space_size_examples() {
        let s = space_size(4, 1, 2).unwrap();
        assert_eq!(s.labeled_size, BigUint::from(6u32));
        assert_eq!(s.class_size, BigUint::from(6u32));
        let s = space_size(6, 2, 2).unwrap();
        assert_eq!(s.labeled_size, BigUint::from(90u32));
        assert_eq!(s.class_size, BigUint::from(45u32));
        let s = space_size(5, 1, 5).unwrap();
        assert_eq!(s.labeled_size, BigUint::from(1u32));
        assert!(space_size(5, 2, 3).is_err());
    }

    #[test]
    fn space_size_matches_brute_force() {
        for n in 2..=7 {
            for r in 1..=2 {
                for k in 2..=4 {
                    if r * k > n {
                        continue;
                    }
                    let s = space_size(n, r, k).unwrap();
                    let brute = brute_labeled(n, r, k).len();
                    assert_eq!(s.labeled_size, BigUint::from(brute), "({n},{r},{k})");
                    let lg = ln_space_size_lgamma(n, r, k);
                    assert!((lg - s.ln_labeled_size()).abs() <= 1e-9 * lg.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn enumerate_small_examples() {
        let e = enumerate_classes(4, 1, 2).unwrap();
        let got: Vec<Vec<usize>> = e.iter().map(|y| y.communities()[0].clone()).collect();
        let mut expected = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                expected.push(vec![a, b]);
            }
        }
        assert_eq!(got, expected);
        assert_eq!(enumerate_classes(6, 2, 2).unwrap().len(), 45);
        let single: Vec<_> = enumerate_classes(3, 1, 3).unwrap().iter().collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].labels(), &[0, 0, 0]);
    }

    #[test]
    fn classes_are_distinct_canonical_and_complete() {
        for (n, r, k) in [(6, 2, 2), (7, 2, 3), (8, 2, 4), (8, 1, 3), (7, 3, 2)] {
            let e = ClassEnumerator::with_default_cap(n, r, k).unwrap();
            let mut seen = HashSet::new();
            for (i, y) in e.iter().enumerate() {
                assert_eq!(y.canonical(), y, "not canonical");
                assert_eq!(e.rank(&y).unwrap(), i as u64);
                assert!(seen.insert(y.labels().to_vec()));
            }
            let brute: HashSet<Vec<usize>> = brute_labeled(n, r, k)
                .into_iter()
                .map(|l| Hypothesis::new(l, r, k).unwrap().canonical().labels().to_vec())
                .collect();
            assert_eq!(seen, brute);
        }
    }

    #[test]
    fn chunks_partition_the_range() {
        let e = ClassEnumerator::with_default_cap(8, 2, 3).unwrap();
        for parts in [1, 3, 7, 1000] {
            let chunks = e.chunks(parts);
            let joined: Vec<_> = chunks.iter().flat_map(|c| e.iter_range(c.clone())).collect();
            let all: Vec<_> = e.iter().collect();
            assert_eq!(joined, all);
        }
    }

    #[test]
    fn guard_refuses_large_spaces() {
        let err = ClassEnumerator::new(30, 3, 5, DEFAULT_CLASS_CAP).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn labeled_enumeration_covers_y() {
        let mut all = HashSet::new();
        for_each_labeled(6, 2, 2, DEFAULT_CLASS_CAP, |y| {
            all.insert(y.labels().to_vec());
        })
        .unwrap();
        assert_eq!(all.len(), 90);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn uniform_sampler_is_valid() {
        let mut rng = crate::rng::rng_from_seed(5);
        for _ in 0..100 {
            let y = sample_uniform(9, 2, 3, &mut rng).unwrap();
            assert_eq!(y.isolated().len(), 3);
        }
    }
}
