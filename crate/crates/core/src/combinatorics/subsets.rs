//! Lexicographic ranking of sorted m-subsets of `0..n` (combinadic indexing).

use super::binom::PascalTable;
use crate::error::{Error, Result};
use crate::model::hypothesis::validate_subset;

/// Ranks and unranks m-subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct SubsetIndexer {
    n: usize,
    m: usize,
    total: u64,
    table: PascalTable,
}

impl SubsetIndexer {
    pub fn new(n: usize, m: usize) -> Self {
        let table = PascalTable::new(n);
        let total = table.get(n, m);
        Self { n, m, total, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// C(n, m).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Rank of a strictly increasing subset. No validation.
    ///
    /// Uses `rank = C(n,m) - 1 - sum_i C(n - 1 - c_i, m - i)`.
    #[inline]
    pub fn rank_unchecked(&self, subset: &[usize]) -> u64 {
        let mut acc = 0u64;
        for (i, &c) in subset.iter().enumerate() {
            acc += self.table.get(self.n - 1 - c, self.m - i);
        }
        self.total - 1 - acc
    }

    pub fn rank(&self, subset: &[usize]) -> Result<u64> {
        if subset.len() != self.m {
            return Err(Error::InvalidSubset(format!(
                "expected {} nodes, got {}",
                self.m,
                subset.len()
            )));
        }
        validate_subset(subset, self.n)?;
        Ok(self.rank_unchecked(subset))
    }

    pub fn unrank(&self, rank: u64) -> Result<Vec<usize>> {
        if rank >= self.total {
            return Err(Error::RankOutOfRange { rank, n: self.n, m: self.m, total: self.total });
        }
        let mut x = self.total - 1 - rank;
        let mut out = Vec::with_capacity(self.m);
        // a runs over n-1-c_i, strictly decreasing
        let mut upper = self.n;
        for i in 0..self.m {
            let j = self.m - i;
            let mut a = upper - 1;
            while self.table.get(a, j) > x {
                a -= 1;
            }
            x -= self.table.get(a, j);
            out.push(self.n - 1 - a);
            upper = a;
        }
        Ok(out)
    }
}

/// Rank of `subset` among all m-subsets of `0..n` in lexicographic order.
pub fn subset_rank(subset: &[usize], n: usize, m: usize) -> Result<u64> {
    SubsetIndexer::new(n, m).rank(subset)
}

/// Inverse of [`subset_rank`].
pub fn subset_unrank(rank: u64, n: usize, m: usize) -> Result<Vec<usize>> {
    SubsetIndexer::new(n, m).unrank(rank)
}

/// Calls `f` on every m-subset of `items` (in lexicographic order of positions).
pub fn for_each_subset<F: FnMut(&[usize])>(items: &[usize], m: usize, mut f: F) {
    let len = items.len();
    if m > len {
        return;
    }
    if m == 0 {
        f(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let mut buf: Vec<usize> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        // rightmost position that can advance
        let mut i = m;
        while i > 0 && idx[i - 1] == len - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        buf[i - 1] = items[idx[i - 1]];
        for j in i..m {
            idx[j] = idx[j - 1] + 1;
            buf[j] = items[idx[j]];
        }
    }
}
