//! Exhaustive checks of the counting lemmas and identities behind the bounds.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binom_u64, disagreement, factorial, for_each_subset, misclassification_stats, sample_uniform, space_size,
    ClassEnumerator,
};
use crate::error::{Error, Result};
use crate::mle::{decompose, score};
use crate::model::{Hypothesis, ModelConfig, WeightDistribution};
use crate::numeric::{ext_f64, ln_biguint, NeumaierSum};
use crate::rng::{derive_seed, rng_from_seed};
use crate::thresholds::{bernoulli_d, signal_ratio_max, signal_ratio_min};

pub const IDENTITY_TOL: f64 = 1e-12;
const WORST_KEPT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    #[serde(rename = "signal_identity")]
    SignalIdentity,
    #[serde(rename = "d_range")]
    DRange,
    #[serde(rename = "pair_relation")]
    PairRelation,
    #[serde(rename = "D_t_bound")]
    DtBound,
    #[serde(rename = "labeled_count_bound")]
    LabeledCountBound,
    #[serde(rename = "decomposition")]
    Decomposition,
    #[serde(rename = "kl_chain")]
    KlChain,
    #[serde(rename = "bhatia_davis")]
    BhatiaDavis,
    #[serde(rename = "count_formula")]
    CountFormula,
}

impl LemmaId {
    pub const ALL: [LemmaId; 9] = [
        LemmaId::SignalIdentity,
        LemmaId::DRange,
        LemmaId::PairRelation,
        LemmaId::DtBound,
        LemmaId::LabeledCountBound,
        LemmaId::Decomposition,
        LemmaId::KlChain,
        LemmaId::BhatiaDavis,
        LemmaId::CountFormula,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::SignalIdentity => "signal_identity",
            LemmaId::DRange => "d_range",
            LemmaId::PairRelation => "pair_relation",
            LemmaId::DtBound => "D_t_bound",
            LemmaId::LabeledCountBound => "labeled_count_bound",
            LemmaId::Decomposition => "decomposition",
            LemmaId::KlChain => "kl_chain",
            LemmaId::BhatiaDavis => "bhatia_davis",
            LemmaId::CountFormula => "count_formula",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Size limits for the exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyCaps {
    pub max_n: usize,
    /// Community-count limit for the pairwise combinatorial checks.
    pub max_r: usize,
    /// Community-size limit for the pairwise combinatorial checks.
    pub max_k: usize,
    /// Largest class count of any instance.
    pub class_cap: u64,
    pub seed: u64,
}

impl Default for VerifyCaps {
    fn default() -> Self {
        Self { max_n: 8, max_r: 2, max_k: 4, class_cap: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub instance: String,
    #[serde(with = "ext_f64")]
    pub violation: f64,
}

/// Outcome of one lemma check. A violation is `lhs - rhs` for inequalities and
/// `|error| - tolerance` for identities, so a passing report has
/// `max_violation <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub passed: bool,
    pub instances_checked: u64,
    #[serde(with = "ext_f64")]
    pub max_violation: f64,
    pub violations: u64,
    /// Instances with the largest violation (or smallest slack).
    pub details: Vec<Detail>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct Tally {
    checked: u64,
    max_violation: f64,
    violations: u64,
    worst: Vec<Detail>,
}

impl Tally {
    pub(crate) fn new() -> Self {
        Self { checked: 0, max_violation: f64::NEG_INFINITY, violations: 0, worst: Vec::new() }
    }

    pub(crate) fn record<F: FnOnce() -> String>(&mut self, violation: f64, instance: F) {
        self.checked += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > 0.0 {
            self.violations += 1;
        }
        self.max_violation = self.max_violation.max(v);
        if self.worst.len() < WORST_KEPT || v > self.worst.last().map_or(f64::NEG_INFINITY, |d| d.violation) {
            self.insert(Detail { instance: instance(), violation: v });
        }
    }

    fn insert(&mut self, d: Detail) {
        let at = self.worst.partition_point(|w| w.violation >= d.violation);
        self.worst.insert(at, d);
        self.worst.truncate(WORST_KEPT);
    }

    pub(crate) fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violations += other.violations;
        self.max_violation = self.max_violation.max(other.max_violation);
        for d in other.worst {
            if self.worst.len() < WORST_KEPT || d.violation > self.worst.last().unwrap().violation {
                self.insert(d);
            }
        }
        self
    }

    pub(crate) fn into_report(self, id: &str, notes: Vec<String>) -> LemmaReport {
        LemmaReport {
            lemma_id: id.to_string(),
            passed: self.checked > 0 && self.violations == 0,
            instances_checked: self.checked,
            max_violation: self.max_violation,
            violations: self.violations,
            details: self.worst,
            notes,
        }
    }
}

/// `(n, r, k)` with `r k <= n`, `k >= 2`, and at most `class_cap` classes.
fn shapes(max_n: usize, max_r: usize, max_k: usize, class_cap: u64) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for r in 1..=max_r.min(n / 2) {
            for k in 2..=max_k.min(n / r) {
                let fits = space_size(n, r, k)
                    .ok()
                    .and_then(|s| s.class_size_u64())
                    .is_some_and(|c| c <= class_cap);
                if fits {
                    out.push((n, r, k));
                }
            }
        }
    }
    out
}

fn pair_shapes(caps: &VerifyCaps) -> Vec<(usize, usize, usize)> {
    shapes(caps.max_n, caps.max_r, caps.max_k, caps.class_cap)
}

fn all_shapes(caps: &VerifyCaps) -> Vec<(usize, usize, usize)> {
    shapes(caps.max_n, caps.max_n, caps.max_n, caps.class_cap)
}

fn classes(n: usize, r: usize, k: usize, cap: u64) -> Result<Vec<Hypothesis>> {
    Ok(ClassEnumerator::new(n, r, k, cap)?.iter().collect())
}

/// Membership tensor of `y` as a bitset over subset ranks.
fn membership_bits(y: &Hypothesis, m: usize) -> Vec<u64> {
    let nodes: Vec<usize> = (0..y.n()).collect();
    let mut bits = Vec::new();
    let mut i = 0usize;
    for_each_subset(&nodes, m, |s| {
        if i.is_multiple_of(64) {
            bits.push(0u64);
        }
        if y.is_within(s) {
            bits[i / 64] |= 1 << (i % 64);
        }
        i += 1;
    });
    bits
}

fn popcount_and_not(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones() as u64).sum()
}

fn popcount_xor(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as u64).sum()
}

fn run_shapes<F>(shapes: Vec<(usize, usize, usize)>, f: F) -> Result<Tally>
where
    F: Fn(usize, usize, usize) -> Result<Tally> + Sync + Send,
{
    let parts: Vec<Result<Tally>> = shapes.into_par_iter().map(|(n, r, k)| f(n, r, k)).collect();
    parts.into_iter().try_fold(Tally::new(), |acc, t| Ok(acc.merge(t?)))
}

const IDENTITY_GRID: [(f64, f64); 3] = [(0.8, 0.3), (0.3, 0.8), (0.55, 0.45)];

fn check_signal_identity(caps: &VerifyCaps) -> Result<LemmaReport> {
    let shapes = all_shapes(caps);
    let seed = caps.seed;
    let tally = run_shapes(shapes, |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        let nodes: Vec<usize> = (0..n).collect();
        for m in 2..=k {
            let case_seed = derive_seed(seed, (n * 10_000 + r * 100 + k) as u64 * 16 + m as u64);
            let mut rng = rng_from_seed(case_seed);
            let ys = sample_uniform(n, r, k, &mut rng)?;
            let ys_within: Vec<bool> = {
                let mut v = Vec::new();
                for_each_subset(&nodes, m, |s| v.push(ys.is_within(s)));
                v
            };
            for &(p, q) in &IDENTITY_GRID {
                let config = ModelConfig::new(n, r, k, m, p, q)?;
                for y in &cls {
                    let mut signal = NeumaierSum::new();
                    let mut i = 0;
                    for_each_subset(&nodes, m, |s| {
                        let (a, b) = (y.is_within(s), ys_within[i]);
                        if a != b {
                            let mean = if b { p } else { q };
                            signal.add(if a { mean } else { -mean });
                        }
                        i += 1;
                    });
                    let d = disagreement(y, &ys, m)?.d;
                    let err = (signal.value() + (p - q) * d as f64).abs();
                    t.record(err - IDENTITY_TOL, || {
                        format!("n={n} r={r} k={k} m={m} p={p} q={q} y={:?} |err|={err:e}", y.labels())
                    });
                }
                // (I) + (II) against the score difference on a random tensor
                let din = WeightDistribution::beta_mean(p, 2.0)?;
                let dout = WeightDistribution::beta_mean(q, 2.0)?;
                let a = crate::model::tensor::sample_weights_with(&config, &ys, &din, &dout, &mut rng)?;
                for _ in 0..3 {
                    let y = sample_uniform(n, r, k, &mut rng)?;
                    let err = match decompose(&a, &config, &y, &ys) {
                        Ok(dec) => (dec.noise + dec.signal - (score(&a, &y)? - score(&a, &ys)?)).abs(),
                        Err(Error::IdentityViolation(_)) => f64::INFINITY,
                        Err(e) => return Err(e),
                    };
                    t.record(err - IDENTITY_TOL, || {
                        format!("n={n} r={r} k={k} m={m} p={p} q={q} (I)+(II) y={:?} |err|={err:e}", y.labels())
                    });
                }
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::SignalIdentity.as_str(),
        vec![format!("tolerance {IDENTITY_TOL:e}; p,q grid {IDENTITY_GRID:?}")],
    ))
}

fn check_d_range(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(pair_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        for m in 2..=k {
            let bits: Vec<Vec<u64>> = cls.iter().map(|y| membership_bits(y, m)).collect();
            let lo = binom_u64(k - 1, m - 1) as i64;
            let hi = (r as u64 * binom_u64(k, m)) as i64;
            for (a, ys) in cls.iter().enumerate() {
                for (b, y) in cls.iter().enumerate() {
                    let s = disagreement(y, ys, m)?;
                    let brute = popcount_and_not(&bits[a], &bits[b]) as i64;
                    let sym = popcount_xor(&bits[a], &bits[b]) as i64;
                    let d = s.d as i64;
                    let mut v = (d - brute).abs().max((s.sym_diff as i64 - sym).abs()).max((2 * d - sym).abs());
                    v = if a == b { v.max(d) } else { v.max(lo - d).max(d - hi) };
                    // integral quantities: a non-positive margin means the check holds
                    let violation = if v > 0 { v as f64 } else { (v.min(0)) as f64 };
                    t.record(violation, || format!("n={n} r={r} k={k} m={m} y*={:?} y={:?} d={d}", ys.labels(), y.labels()));
                }
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::DRange.as_str(),
        vec!["C(k-1,m-1) <= d <= r C(k,m) for distinct classes, d = 0 on equal ones, d = brute force = sym_diff/2".into()],
    ))
}

fn check_pair_relation(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(pair_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        for m in 2..=k {
            let ckm = binom_u64(k, m) as i64;
            let ck2 = binom_u64(k, 2) as i64;
            for ys in &cls {
                for y in &cls {
                    let s = disagreement(y, ys, m)?;
                    let lhs = s.d_pair as i64 * ckm;
                    let rhs = ck2 * s.d as i64;
                    t.record((lhs - rhs) as f64 / ckm as f64, || {
                        format!("n={n} r={r} k={k} m={m} y*={:?} y={:?}", ys.labels(), y.labels())
                    });
                }
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(LemmaId::PairRelation.as_str(), vec!["d~ C(k,m) <= C(k,2) d, exact integers".into()]))
}

fn pow_le(base: &BigUint, exp_base: u64, n: u64, exp_n: u64) -> bool {
    num_traits::pow(base.clone(), exp_base as usize) <= num_traits::pow(BigUint::from(n), exp_n as usize)
}

/// Signed log-margin that agrees in sign with the exact comparison.
fn signed(holds: bool, log_margin: f64) -> f64 {
    match (holds, log_margin > 0.0) {
        (true, true) => 0.0,
        (false, false) => f64::EPSILON,
        _ => log_margin,
    }
}

fn check_dt_bound(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(pair_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        let r_fact = factorial(r as u64);
        for m in 2..=k {
            let ckm = binom_u64(k, m);
            for ys in &cls {
                let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
                for y in &cls {
                    *hist.entry(disagreement(y, ys, m)?.d).or_insert(0) += 1;
                }
                for (&tt, &count) in &hist {
                    if tt == 0 {
                        t.record(count as f64 - 1.0, || format!("n={n} r={r} k={k} m={m} D_0={count}"));
                        continue;
                    }
                    let labeled = &r_fact * BigUint::from(count);
                    let holds = pow_le(&labeled, ckm, n as u64, 8 * k as u64 * tt);
                    let margin = ln_biguint(&labeled) - 8.0 * k as f64 * tt as f64 * (n as f64).ln() / ckm as f64;
                    t.record(signed(holds, margin), || {
                        format!("n={n} r={r} k={k} m={m} t={tt} r!D_t={labeled} y*={:?}", ys.labels())
                    });
                }
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::DtBound.as_str(),
        vec![
            "t >= 1: (r! D_t)^C(k,m) <= n^(8kt) in exact integers; violation reported as ln(r! D_t) - 8kt ln(n)/C(k,m)".into(),
            "t = 0 checked per tensor class (D_0 = 1); the labeled count r! exceeds n^0 for r >= 2".into(),
        ],
    ))
}

fn check_labeled_count(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(pair_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        let r_fact = factorial(r as u64);
        for ys in &cls {
            let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
            for y in &cls {
                *hist.entry(disagreement(y, ys, 2)?.d_pair).or_insert(0) += 1;
            }
            let max = *hist.keys().next_back().unwrap_or(&0);
            let mut cum = 0u64;
            for tt in 0..=max {
                cum += hist.get(&tt).copied().unwrap_or(0);
                if tt == 0 {
                    t.record(cum as f64 - 1.0, || format!("n={n} r={r} k={k} t~=0 classes={cum}"));
                    continue;
                }
                let labeled = &r_fact * BigUint::from(cum);
                let holds = pow_le(&labeled, k as u64, n as u64, 16 * tt);
                let margin = ln_biguint(&labeled) - 16.0 * tt as f64 * (n as f64).ln() / k as f64;
                t.record(signed(holds, margin), || {
                    format!("n={n} r={r} k={k} t~={tt} labeled={labeled} y*={:?}", ys.labels())
                });
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::LabeledCountBound.as_str(),
        vec![
            "t~ >= 1: (r! #{d~ <= t~})^k <= n^(16 t~) in exact integers".into(),
            "t~ = 0 checked per tensor class, where only the truth qualifies".into(),
        ],
    ))
}

fn check_decomposition(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(pair_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let cls = classes(n, r, k, caps.class_cap)?;
        for ys in &cls {
            for y in &cls {
                let s = misclassification_stats(y, ys)?;
                let d_pair = disagreement(y, ys, 2)?.d_pair;
                let mut v = (s.pair_total() as f64 - d_pair as f64).abs();
                if v == 0.0 {
                    v = f64::NEG_INFINITY;
                }
                for i in 0..r {
                    let lhs = (k as u64 * s.misclassified[i]) as f64;
                    let rhs = 4.0 * (s.n1[i] + s.n2[i]) as f64;
                    v = v.max((lhs - rhs) / 4.0);
                }
                t.record(v, || format!("n={n} r={r} k={k} y*={:?} y={:?}", ys.labels(), y.labels()));
            }
        }
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::Decomposition.as_str(),
        vec!["d~ = sum_i (N1 + N2) exactly and k M_i / 4 <= N1(i) + N2(i)".into()],
    ))
}

/// The 0.05 grid on [0.05, 0.95].
pub fn probability_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

fn check_kl_chain() -> LemmaReport {
    let mut t = Tally::new();
    let mut max_form_failures = 0;
    for &p in &probability_grid() {
        for &q in &probability_grid() {
            if p == q {
                continue;
            }
            let d = bernoulli_d(p, q);
            t.record(d - signal_ratio_min(p, q), || format!("p={p} q={q} min form"));
            // case split: ln x <= x - 1 applied to the larger-over-smaller odds ratio
            let split = if p > q { (p - q).powi(2) / (q * (1.0 - p)) } else { (p - q).powi(2) / (p * (1.0 - q)) };
            t.record(d - split, || format!("p={p} q={q} case split"));
            if d > signal_ratio_max(p, q) {
                max_form_failures += 1;
            }
        }
    }
    t.into_report(
        LemmaId::KlChain.as_str(),
        vec![format!(
            "d(p,q) > (p-q)^2/((p∨q)(1-p∧q)) at {max_form_failures} of 342 grid points; that form is not used for pass/fail"
        )],
    )
}

fn check_bhatia_davis() -> Result<LemmaReport> {
    let mut t = Tally::new();
    let means: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for &mu in &means {
        let mut dists = vec![WeightDistribution::bernoulli(mu)?, WeightDistribution::point_mass(mu)?];
        if mu > 0.0 && mu < 1.0 {
            for phi in [0.1, 0.5, 1.0, 5.0, 50.0] {
                dists.push(WeightDistribution::beta_mean(mu, phi)?);
            }
        }
        for d in dists {
            let bd = mu * (1.0 - mu);
            t.record(d.variance() - bd, || format!("{:?} variance vs mean(1-mean)", d));
            t.record(d.sub_gaussian_sq() - 0.25, || format!("{:?} proxy vs 1/4", d));
        }
    }
    let beta = WeightDistribution::beta_mean(0.3, 5.0)?;
    let analytic = 0.3 * 0.7 / 6.0;
    t.record((beta.variance() - analytic).abs() - IDENTITY_TOL, || "BetaMean(0.3, 5) variance vs 0.035".into());
    Ok(t.into_report(LemmaId::BhatiaDavis.as_str(), vec![]))
}

fn brute_counts(n: usize, r: usize, k: usize) -> (u64, u64) {
    let mut labeled = 0;
    let mut canon = HashSet::new();
    let mut labels = vec![0usize; n];
    let total = ((r + 1) as u64).pow(n as u32);
    for mut code in 0..total {
        for l in labels.iter_mut() {
            *l = (code % (r + 1) as u64) as usize;
            code /= (r + 1) as u64;
        }
        let mut sizes = vec![0usize; r + 1];
        labels.iter().for_each(|&l| sizes[l] += 1);
        if sizes[..r].iter().all(|&s| s == k) {
            labeled += 1;
            canon.insert(Hypothesis::new(labels.clone(), r, k).expect("valid").canonical().labels().to_vec());
        }
    }
    (labeled, canon.len() as u64)
}

fn check_count_formula(caps: &VerifyCaps) -> Result<LemmaReport> {
    let tally = run_shapes(all_shapes(caps), |n, r, k| {
        let mut t = Tally::new();
        let e = ClassEnumerator::new(n, r, k, caps.class_cap)?;
        let mut seen = HashSet::new();
        let mut bad = 0u64;
        for y in e.iter() {
            if y != y.canonical() || !seen.insert(y.labels().to_vec()) {
                bad += 1;
            }
        }
        let listed = BigUint::from(seen.len() as u64);
        let formula = factorial(n as u64)
            / (factorial((n - r * k) as u64) * num_traits::pow(factorial(k as u64), r));
        let from_listing = &listed * factorial(r as u64);
        let mut v = if from_listing == formula && bad == 0 { 0.0 } else { 1.0 + bad as f64 };
        if ((r + 1) as u64).pow(n as u32) <= 2_000_000 {
            let (labeled, cls) = brute_counts(n, r, k);
            if BigUint::from(labeled) != formula || BigUint::from(cls) != listed {
                v = v.max(1.0);
            }
        }
        t.record(v, || format!("n={n} r={r} k={k} classes={listed} |Y|={formula}"));
        Ok(t)
    })?;
    Ok(tally.into_report(
        LemmaId::CountFormula.as_str(),
        vec!["listed classes times r! = n!/((n-rk)!(k!)^r) = brute-force count over [r+1]^n when (r+1)^n <= 2e6".into()],
    ))
}

/// Runs one named check.
pub fn verify_lemma(id: LemmaId, caps: &VerifyCaps) -> Result<LemmaReport> {
    match id {
        LemmaId::SignalIdentity => check_signal_identity(caps),
        LemmaId::DRange => check_d_range(caps),
        LemmaId::PairRelation => check_pair_relation(caps),
        LemmaId::DtBound => check_dt_bound(caps),
        LemmaId::LabeledCountBound => check_labeled_count(caps),
        LemmaId::Decomposition => check_decomposition(caps),
        LemmaId::KlChain => Ok(check_kl_chain()),
        LemmaId::BhatiaDavis => check_bhatia_davis(),
        LemmaId::CountFormula => check_count_formula(caps),
    }
}

/// Finite-size comparison of `ln |Y|` with the Stirling-based lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StirlingRow {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub ln_space_size: f64,
    /// Logarithm of the factorial-bound ratio; a true lower bound.
    pub stirling_lower: f64,
    /// `(n-rk) ln(n/(n-rk)) + rk ln(n/k)`, stated up to a `1 + o(1)` factor.
    pub leading_term: f64,
    pub lower_holds: bool,
    pub leading_holds: bool,
}

fn ln_stirling_low(x: f64) -> f64 {
    0.5 * x.ln() + x * (x.ln() - 1.0)
}

fn ln_stirling_high(x: f64) -> f64 {
    1.0 + ln_stirling_low(x)
}

pub fn stirling_row(n: usize, r: usize, k: usize) -> Result<StirlingRow> {
    let exact = ln_biguint(&space_size(n, r, k)?.labeled_size);
    let rest = (n - r * k) as f64;
    let (nf, kf, rf) = (n as f64, k as f64, r as f64);
    let rest_term = if rest > 0.0 { ln_stirling_high(rest) } else { 0.0 };
    let lower = ln_stirling_low(nf) - rest_term - rf * ln_stirling_high(kf);
    let leading = if rest > 0.0 { rest * (nf / rest).ln() } else { 0.0 } + rf * kf * (nf / kf).ln();
    Ok(StirlingRow {
        n,
        r,
        k,
        ln_space_size: exact,
        stirling_lower: lower,
        leading_term: leading,
        lower_holds: lower <= exact + 1e-12,
        leading_holds: leading <= exact + 1e-12,
    })
}

/// Stirling comparison on every shape with `n <= max_n`; report only.
pub fn stirling_report(max_n: usize) -> Result<Vec<StirlingRow>> {
    shapes(max_n, max_n, max_n, u64::MAX).into_iter().map(|(n, r, k)| stirling_row(n, r, k)).collect()
}

pub const SUITE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub caps: VerifyCaps,
    pub passed: bool,
    pub reports: Vec<LemmaReport>,
    /// Report-only rows; they do not affect `passed`.
    pub stirling: Vec<StirlingRow>,
}

/// Runs the given checks in order.
pub fn run_suite(ids: &[LemmaId], caps: &VerifyCaps) -> Result<SuiteReport> {
    let reports = ids.iter().map(|&id| verify_lemma(id, caps)).collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        schema_version: SUITE_SCHEMA_VERSION,
        caps: *caps,
        passed: reports.iter().all(|r| r.passed),
        reports,
        stirling: stirling_report(caps.max_n)?,
    })
}
