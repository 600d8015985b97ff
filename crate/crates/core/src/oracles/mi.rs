//! Exact mutual information between a uniformly drawn labeling and a binary tensor.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_labeled, for_each_subset, space_size};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::numeric::{ln_biguint, NeumaierSum};
use crate::thresholds::mi_upper_bound;

/// Largest `C(n,m)` for which all `2^C(n,m)` outcomes are enumerated.
pub const MAX_OUTCOME_BITS: u64 = 20;
/// Largest labeled hypothesis space accepted by [`exact_mi`].
pub const MAX_LABELED: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MIResult {
    /// `I(y*; A)` in nats.
    pub exact_mi: f64,
    pub upper_bound: f64,
    /// `upper_bound - exact_mi`.
    pub slack: f64,
    pub ln_space_size: f64,
}

/// `I(y*; A)` for Bernoulli weights with means `p` and `q`, with `y*` uniform
/// over the labeled hypotheses.
///
/// Every labeled hypothesis is visited; labelings inducing the same
/// membership tensor share a likelihood and are merged with multiplicity.
pub fn exact_mi(config: &ModelConfig) -> Result<MIResult> {
    let (n, r, k, m) = (config.n, config.r, config.k, config.m);
    let entries = config.subset_count();
    if entries > MAX_OUTCOME_BITS {
        return Err(Error::GuardExceeded {
            what: "binary outcomes 2^C(n,m)".into(),
            needed: format!("2^{entries}"),
            cap: 1 << MAX_OUTCOME_BITS,
        });
    }
    let space = space_size(n, r, k)?;
    let nodes: Vec<usize> = (0..n).collect();
    let mut masks: BTreeMap<u32, u64> = BTreeMap::new();
    let mut labeled = 0u64;
    for_each_labeled(n, r, k, MAX_LABELED, |y| {
        let mut mask = 0u32;
        let mut bit = 0;
        for_each_subset(&nodes, m, |s| {
            if y.is_within(s) {
                mask |= 1 << bit;
            }
            bit += 1;
        });
        *masks.entry(mask).or_insert(0) += 1;
        labeled += 1;
    })?;
    let groups: Vec<(u32, f64)> = masks.into_iter().map(|(mk, c)| (mk, c as f64)).collect();
    let total = labeled as f64;
    let (p, q) = (config.p, config.q);
    let lp = [(1.0 - p).ln(), p.ln()];
    let lq = [(1.0 - q).ln(), q.ln()];
    let width = entries as u32;

    // log P(a | y) from the four cell counts; 0 * ln 0 is treated as 0
    let log_lik = |a: u32, mask: u32| -> f64 {
        let n11 = (a & mask).count_ones();
        let n10 = mask.count_ones() - n11;
        let n01 = (a & !mask).count_ones();
        let n00 = width - n11 - n10 - n01;
        let term = |count: u32, l: f64| if count == 0 { 0.0 } else { count as f64 * l };
        term(n11, lp[1]) + term(n10, lp[0]) + term(n01, lq[1]) + term(n00, lq[0])
    };

    let outcomes = 1u64 << entries;
    let chunk = 1024u64;
    let parts: Vec<f64> = (0..outcomes.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = NeumaierSum::new();
            let mut lls = vec![0.0; groups.len()];
            for a in c * chunk..((c + 1) * chunk).min(outcomes) {
                let a = a as u32;
                let mut pa = 0.0;
                for (g, &(mask, mult)) in groups.iter().enumerate() {
                    lls[g] = log_lik(a, mask);
                    pa += mult / total * lls[g].exp();
                }
                if pa == 0.0 {
                    continue;
                }
                let lpa = pa.ln();
                for (g, &(_, mult)) in groups.iter().enumerate() {
                    if lls[g] == f64::NEG_INFINITY {
                        continue;
                    }
                    acc.add(mult / total * lls[g].exp() * (lls[g] - lpa));
                }
            }
            acc.value()
        })
        .collect();
    let exact = parts.into_iter().collect::<NeumaierSum>().value().max(0.0);
    let bound = mi_upper_bound(config)?;
    Ok(MIResult { exact_mi: exact, upper_bound: bound, slack: bound - exact, ln_space_size: ln_biguint(&space.labeled_size) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(n: usize, r: usize, k: usize, p: f64, q: f64) -> MIResult {
        exact_mi(&ModelConfig::new(n, r, k, 2, p, q).unwrap()).unwrap()
    }

    #[test]
    fn frozen_values() {
        let a = mi(3, 1, 2, 0.8, 0.3);
        assert!((a.exact_mi - 0.3277556715863092).abs() < 1e-10);
        assert!((a.upper_bound - 0.7445307405023648).abs() < 1e-12);
        let grid = [
            (0.2, 0.5, 0.1618549216682447),
            (0.2, 0.8, 0.6384941889565343),
            (0.5, 0.2, 0.17738537097347934),
            (0.5, 0.8, 0.1773853709734795),
            (0.8, 0.2, 0.6384941889565332),
            (0.8, 0.5, 0.1618549216682447),
        ];
        for (p, q, want) in grid {
            let res = mi(4, 1, 2, p, q);
            assert!((res.exact_mi - want).abs() < 1e-10, "{p} {q}: {}", res.exact_mi);
            assert!(res.slack >= 0.0);
        }
        let b = mi(4, 2, 2, 0.8, 0.2);
        assert!((b.exact_mi - 0.7207725375166408).abs() < 1e-10);
        assert!((b.upper_bound - 2.2180709777918253).abs() < 1e-12);
    }

    #[test]
    fn vanishes_with_divergence() {
        let res = mi(4, 1, 2, 0.5 + 1e-4, 0.5 - 1e-4);
        assert!(res.exact_mi < 1e-7 && res.upper_bound < 1e-6);
        assert!(res.slack >= 0.0);
    }

    #[test]
    fn outcome_flip_symmetry_and_entropy_cap() {
        for &(p, q) in &[(0.8, 0.3), (0.6, 0.1), (0.2, 0.9)] {
            let a = mi(5, 1, 3, p, q);
            let b = mi(5, 1, 3, 1.0 - p, 1.0 - q);
            assert!((a.exact_mi - b.exact_mi).abs() < 1e-12);
            assert!(a.exact_mi <= a.ln_space_size + 1e-12);
        }
        let sep = mi(4, 1, 2, 1.0, 0.0);
        assert!((sep.exact_mi - 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let big = ModelConfig::new(7, 1, 2, 2, 0.8, 0.3).unwrap();
        assert!(matches!(exact_mi(&big), Err(Error::GuardExceeded { .. })));
    }
}
