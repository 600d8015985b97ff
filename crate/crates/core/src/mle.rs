//! Exact maximum-likelihood recovery by exhaustive search over tensor classes.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{disagreement, for_each_subset, ClassEnumerator, DEFAULT_CLASS_CAP};
use crate::error::{Error, Result};
use crate::model::{Hypothesis, ModelConfig, WeightTensor};
use crate::numeric::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    #[default]
    Maximize,
    Minimize,
}

impl Sense {
    /// Minimize when cross weights are heavier than within weights.
    pub fn for_config(config: &ModelConfig) -> Self {
        if config.q > config.p {
            Sense::Minimize
        } else {
            Sense::Maximize
        }
    }

    /// Maps a score to a key where larger is better. Negation is exact.
    #[inline]
    fn key(self, score: f64) -> f64 {
        match self {
            Sense::Maximize => score,
            Sense::Minimize => -score,
        }
    }
}

/// Sum of weights over the m-subsets inside each community, communities
/// taken in order of their smallest member.
fn score_communities(weights: &WeightTensor, communities: &mut [Vec<usize>]) -> f64 {
    communities.sort_by_key(|c| c.first().copied());
    let m = weights.config().m;
    let mut total = 0.0;
    for c in communities.iter() {
        let mut part = 0.0;
        for_each_subset(c, m, |s| part += weights.get_unchecked(s));
        total += part;
    }
    total
}

/// `<A, Y>`: total weight on within-community m-subsets of `y`.
///
/// Iterates the `r C(k,m)` within subsets only.
pub fn score(weights: &WeightTensor, y: &Hypothesis) -> Result<f64> {
    weights.check_hypothesis(y)?;
    Ok(score_communities(weights, &mut y.communities()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub sense: Sense,
    /// Optimal objective value.
    pub best_score: f64,
    /// Canonical representatives of every optimal tensor class, in enumeration order.
    pub argmax_classes: Vec<Hypothesis>,
    pub unique: bool,
    pub classes_evaluated: u64,
    /// Best objective value strictly worse than `best_score`, if any class attains one.
    pub runner_up: Option<f64>,
}

impl MleResult {
    /// The estimate when the optimum is unique.
    pub fn estimate(&self) -> Option<&Hypothesis> {
        if self.unique {
            self.argmax_classes.first()
        } else {
            None
        }
    }
}

/// Search options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub sense: Sense,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Largest number of tensor classes the search accepts.
    pub cap: u64,
    /// Number of index chunks; defaults to a multiple of the worker count.
    pub chunks: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { sense: Sense::Maximize, jobs: None, cap: DEFAULT_CLASS_CAP, chunks: None }
    }
}

/// Partial optimum over a set of class indices, on the "larger is better" key.
#[derive(Debug, Clone)]
struct Best {
    key: f64,
    ties: Vec<u64>,
    second: f64,
}

impl Best {
    fn empty() -> Self {
        Self { key: f64::NEG_INFINITY, ties: Vec::new(), second: f64::NEG_INFINITY }
    }

    fn push(&mut self, index: u64, key: f64) {
        if self.ties.is_empty() || key > self.key {
            if !self.ties.is_empty() {
                self.second = self.second.max(self.key);
            }
            self.key = key;
            self.ties.clear();
            self.ties.push(index);
        } else if key == self.key {
            self.ties.push(index);
        } else {
            self.second = self.second.max(key);
        }
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.ties.is_empty() {
            return b;
        }
        if b.ties.is_empty() {
            return a;
        }
        if a.key > b.key {
            Self { second: a.second.max(b.key), ..a }
        } else if b.key > a.key {
            Self { second: b.second.max(a.key), ..b }
        } else {
            let mut ties = Vec::with_capacity(a.ties.len() + b.ties.len());
            let (mut i, mut j) = (0, 0);
            while i < a.ties.len() && j < b.ties.len() {
                if a.ties[i] <= b.ties[j] {
                    ties.push(a.ties[i]);
                    i += 1;
                } else {
                    ties.push(b.ties[j]);
                    j += 1;
                }
            }
            ties.extend_from_slice(&a.ties[i..]);
            ties.extend_from_slice(&b.ties[j..]);
            Self { key: a.key, ties, second: a.second.max(b.second) }
        }
    }
}

fn scan(weights: &WeightTensor, e: &ClassEnumerator, range: Range<u64>, sense: Sense) -> Best {
    let (r, k) = (e.r(), e.k());
    let mut labels = vec![r; e.n()];
    let mut comms: Vec<Vec<usize>> = vec![Vec::with_capacity(k); r];
    let mut best = Best::empty();
    for index in range {
        e.fill_labels(index, &mut labels);
        comms.iter_mut().for_each(Vec::clear);
        for (v, &l) in labels.iter().enumerate() {
            if l < r {
                comms[l].push(v);
            }
        }
        best.push(index, sense.key(score_communities(weights, &mut comms)));
    }
    best
}

fn finish(e: &ClassEnumerator, best: Best, sense: Sense) -> Result<MleResult> {
    let back = |key: f64| sense.key(key);
    let argmax_classes = best.ties.iter().map(|&i| e.unrank(i)).collect::<Result<Vec<_>>>()?;
    Ok(MleResult {
        sense,
        best_score: back(best.key),
        unique: argmax_classes.len() == 1,
        argmax_classes,
        classes_evaluated: e.len(),
        runner_up: (best.second > f64::NEG_INFINITY).then(|| back(best.second)),
    })
}

fn check_search(weights: &WeightTensor, r: usize, k: usize) -> Result<()> {
    let c = weights.config();
    if r == 0 || r * k > c.n || k < c.m {
        return Err(Error::InvalidConfig(format!(
            "cannot search r = {r}, k = {k} on n = {}, m = {}",
            c.n, c.m
        )));
    }
    Ok(())
}

/// Exhaustive search with explicit options.
pub fn solve_with(weights: &WeightTensor, r: usize, k: usize, opts: SolveOptions) -> Result<MleResult> {
    check_search(weights, r, k)?;
    let e = ClassEnumerator::new(weights.config().n, r, k, opts.cap)?;
    let run = || {
        let parts = opts.chunks.unwrap_or_else(|| 8 * rayon::current_num_threads());
        let best = e
            .chunks(parts)
            .into_par_iter()
            .map(|range| scan(weights, &e, range, opts.sense))
            .reduce(Best::empty, Best::merge);
        finish(&e, best, opts.sense)
    };
    match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|err| Error::InvalidConfig(format!("thread pool: {err}")))?
            .install(run),
        None => run(),
    }
}

/// Exact optimum of the objective over all tensor classes of `(n, r, k)`.
pub fn solve(weights: &WeightTensor, r: usize, k: usize, sense: Sense, jobs: Option<usize>) -> Result<MleResult> {
    solve_with(weights, r, k, SolveOptions { sense, jobs, ..SolveOptions::default() })
}

/// Single-threaded search used as a reference.
pub fn solve_serial(weights: &WeightTensor, r: usize, k: usize, sense: Sense, cap: u64) -> Result<MleResult> {
    check_search(weights, r, k)?;
    let e = ClassEnumerator::new(weights.config().n, r, k, cap)?;
    let best = scan(weights, &e, 0..e.len(), sense);
    finish(&e, best, sense)
}

/// Strict dominance: the optimum is unique and is the class of `y_star`.
pub fn recovery_success(result: &MleResult, y_star: &Hypothesis) -> bool {
    result.unique && result.argmax_classes[0].same_class(y_star)
}

/// Split of `<A, Y> - <A, Y*>` into a centered noise part and its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSignalDecomposition {
    /// `<A - E A, Y - Y*>`
    pub noise: f64,
    /// `<E A, Y - Y*>`
    pub signal: f64,
    /// One-sided disagreement `d(Y)`.
    pub d: u64,
}

/// Computes both terms by summing over every m-subset, then checks the signal
/// against `-(p - q) d(Y)`.
pub fn decompose(
    weights: &WeightTensor,
    config: &ModelConfig,
    y: &Hypothesis,
    y_star: &Hypothesis,
) -> Result<NoiseSignalDecomposition> {
    weights.check_hypothesis(y)?;
    y.check_shape(y_star)?;
    if weights.config().m != config.m || weights.config().n != config.n {
        return Err(Error::ShapeMismatch("weights and config disagree on (n, m)".into()));
    }
    let (mut noise, mut signal) = (NeumaierSum::new(), NeumaierSum::new());
    weights.for_each_entry(|s, a| {
        let (yy, ys) = (y.is_within(s), y_star.is_within(s));
        if yy == ys {
            return;
        }
        let diff = if yy { 1.0 } else { -1.0 };
        let mean = if ys { config.p } else { config.q };
        noise.add((a - mean) * diff);
        signal.add(mean * diff);
    });
    let d = disagreement(y, y_star, config.m)?.d;
    let signal = signal.value();
    let expected = -(config.p - config.q) * d as f64;
    if (signal - expected).abs() > 1e-12 * (d as f64).max(1.0) {
        return Err(Error::IdentityViolation(format!("signal {signal} != -(p-q) d = {expected}")));
    }
    Ok(NoiseSignalDecomposition { noise: noise.value(), signal, d })
}
