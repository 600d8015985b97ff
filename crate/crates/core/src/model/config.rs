use serde::{Deserialize, Serialize};

use crate::combinatorics::binom_u64;
use crate::error::{Error, Result};

/// Parameters `(n, r, k, m, p, q)` of an m-uniform sub-hypergraph block model.
///
/// `r` communities of `k` nodes each are planted among `n` nodes; the other
/// `n - r*k` nodes are isolated. Each m-subset gets a weight with mean `p` when
/// all of its nodes share a community and mean `q` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ModelConfig {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    n: usize,
    r: usize,
    k: usize,
    m: usize,
    p: f64,
    q: f64,
}

impl TryFrom<RawConfig> for ModelConfig {
    type Error = Error;
    fn try_from(c: RawConfig) -> Result<Self> {
        ModelConfig::new(c.n, c.r, c.k, c.m, c.p, c.q)
    }
}

impl From<ModelConfig> for RawConfig {
    fn from(c: ModelConfig) -> Self {
        RawConfig { n: c.n, r: c.r, k: c.k, m: c.m, p: c.p, q: c.q }
    }
}

/// Largest node count supported; subset ranks must fit in `u64`.
pub const MAX_NODES: usize = 64;

impl ModelConfig {
    pub fn new(n: usize, r: usize, k: usize, m: usize, p: f64, q: f64) -> Result<Self> {
        check_shape(n, r, k, m)?;
        for (name, v) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} = {v} not in [0,1]")));
            }
        }
        if p == q {
            return Err(Error::InvalidConfig(format!("p = q = {p}")));
        }
        Ok(Self { n, r, k, m, p, q })
    }

    pub fn isolated_count(&self) -> usize {
        self.n - self.r * self.k
    }

    /// C(k, m): within-community m-subsets per community.
    pub fn within_per_community(&self) -> u64 {
        binom_u64(self.k, self.m)
    }

    /// r * C(k, m).
    pub fn within_total(&self) -> u64 {
        self.r as u64 * self.within_per_community()
    }

    /// C(n, m): number of hyperedge slots.
    pub fn subset_count(&self) -> u64 {
        binom_u64(self.n, self.m)
    }

    pub fn with_means(&self, p: f64, q: f64) -> Result<Self> {
        Self::new(self.n, self.r, self.k, self.m, p, q)
    }
}

/// Validates `(n, r, k, m)` independently of the means.
pub fn check_shape(n: usize, r: usize, k: usize, m: usize) -> Result<()> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidConfig(format!("n = {n} must be in 1..={MAX_NODES}")));
    }
    if r < 1 {
        return Err(Error::InvalidConfig("r must be >= 1".into()));
    }
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k = {k} must be >= 2")));
    }
    if m < 2 || m > k {
        return Err(Error::InvalidConfig(format!("need 2 <= m <= k, got m = {m}, k = {k}")));
    }
    if r.checked_mul(k).is_none_or(|rk| rk > n) {
        return Err(Error::InvalidConfig(format!("r*k = {}*{} exceeds n = {n}", r, k)));
    }
    Ok(())
}
