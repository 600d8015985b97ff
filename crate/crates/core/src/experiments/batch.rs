//! Repeated sample-and-recover trials.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson95;
use crate::combinatorics::{sample_uniform, DEFAULT_CLASS_CAP};
use crate::error::{Error, Result};
use crate::mle::{recovery_success, score, solve_with, Sense, SolveOptions};
use crate::model::tensor::sample_weights_with;
use crate::model::{Hypothesis, ModelConfig, WeightDistribution};
use crate::numeric::ext_f64;
use crate::rng::{derive_seed, rng_from_seed, STREAM_RELABEL, STREAM_TRUTH, STREAM_WEIGHTS};

pub const BATCH_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: u64,
    pub seed: u64,
    /// The optimum is unique and is the true tensor class.
    pub success: bool,
    /// `success` and a uniformly drawn relabeling of the estimate equals the
    /// truth; equal to `success` when `r = 1`.
    pub labeled_success: bool,
    /// Objective of the truth minus the best objective over other classes,
    /// oriented so that larger is better.
    #[serde(with = "ext_f64")]
    pub score_margin: f64,
    pub best_score: f64,
    pub argmax_count: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Inputs of [`run_batch`].
#[derive(Debug, Clone)]
pub struct BatchSpec {
    pub config: ModelConfig,
    pub dist_in: WeightDistribution,
    pub dist_out: WeightDistribution,
    pub trials: u64,
    pub base_seed: u64,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub jobs: Option<usize>,
    /// Plant this labeling in every trial instead of drawing it uniformly.
    pub fixed_truth: Option<Hypothesis>,
    /// Defaults to maximizing when `p > q` and minimizing otherwise.
    pub sense: Option<Sense>,
    pub cap: u64,
    pub keep_trials: bool,
}

impl BatchSpec {
    pub fn new(config: ModelConfig, dist_in: WeightDistribution, dist_out: WeightDistribution, trials: u64, base_seed: u64) -> Self {
        Self {
            config,
            dist_in,
            dist_out,
            trials,
            base_seed,
            jobs: None,
            fixed_truth: None,
            sense: None,
            cap: DEFAULT_CLASS_CAP,
            keep_trials: false,
        }
    }

    pub fn bernoulli(config: ModelConfig, trials: u64, base_seed: u64) -> Result<Self> {
        Ok(Self::new(
            config,
            WeightDistribution::bernoulli(config.p)?,
            WeightDistribution::bernoulli(config.q)?,
            trials,
            base_seed,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub schema_version: u32,
    pub config: ModelConfig,
    pub dist_in: WeightDistribution,
    pub dist_out: WeightDistribution,
    pub base_seed: u64,
    pub fixed_truth: bool,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub labeled_successes: u64,
    pub labeled_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<TrialResult>>,
}

/// One trial: draw the truth, sample weights, solve, and score the outcome.
///
/// Streams are derived from `seed` so that the truth, the weights and the
/// relabeling draw are independent of each other and of `(p, q)`.
pub fn run_trial(spec: &BatchSpec, index: u64) -> Result<TrialResult> {
    let start = Instant::now();
    let c = &spec.config;
    let seed = derive_seed(spec.base_seed, index);
    let truth = match &spec.fixed_truth {
        Some(y) => y.clone(),
        None => sample_uniform(c.n, c.r, c.k, &mut rng_from_seed(derive_seed(seed, STREAM_TRUTH)))?,
    };
    let mut wrng = rng_from_seed(derive_seed(seed, STREAM_WEIGHTS));
    let weights = sample_weights_with(c, &truth, &spec.dist_in, &spec.dist_out, &mut wrng)?;
    let sense = spec.sense.unwrap_or_else(|| Sense::for_config(c));
    let opts = SolveOptions { sense, jobs: None, cap: spec.cap, chunks: Some(1) };
    let res = solve_with(&weights, c.r, c.k, opts)?;
    let success = recovery_success(&res, &truth);
    let oriented = |s: f64| if sense == Sense::Maximize { s } else { -s };
    let score_margin = if success {
        res.runner_up.map_or(f64::INFINITY, |ru| oriented(res.best_score) - oriented(ru))
    } else {
        oriented(score(&weights, &truth)?) - oriented(res.best_score)
    };
    let labeled_success = success && {
        let mut perm: Vec<usize> = (0..c.r).collect();
        perm.shuffle(&mut rng_from_seed(derive_seed(seed, STREAM_RELABEL)));
        res.argmax_classes[0].relabeled(&perm)?.labels() == truth.labels()
    };
    Ok(TrialResult {
        index,
        seed,
        success,
        labeled_success,
        score_margin,
        best_score: res.best_score,
        argmax_count: res.argmax_classes.len(),
        elapsed: start.elapsed(),
    })
}

pub(crate) fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(f)),
        None => Ok(f()),
    }
}

/// Runs `spec.trials` independent trials; output depends only on the spec
/// minus `jobs`.
pub fn run_batch(spec: &BatchSpec) -> Result<BatchResult> {
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if let Some(y) = &spec.fixed_truth {
        let c = &spec.config;
        if y.n() != c.n || y.r() != c.r || y.k() != c.k {
            return Err(Error::ShapeMismatch("fixed truth does not match config".into()));
        }
    }
    // fail fast on the guard before spawning trials
    crate::combinatorics::ClassEnumerator::new(spec.config.n, spec.config.r, spec.config.k, spec.cap)?;
    let trials = with_jobs(spec.jobs, || {
        (0..spec.trials).into_par_iter().map(|i| run_trial(spec, i)).collect::<Result<Vec<_>>>()
    })??;
    let successes = trials.iter().filter(|t| t.success).count() as u64;
    let labeled_successes = trials.iter().filter(|t| t.labeled_success).count() as u64;
    let w = wilson95(successes, spec.trials);
    Ok(BatchResult {
        schema_version: BATCH_SCHEMA_VERSION,
        config: spec.config,
        dist_in: spec.dist_in,
        dist_out: spec.dist_out,
        base_seed: spec.base_seed,
        fixed_truth: spec.fixed_truth.is_some(),
        trials: spec.trials,
        successes,
        rate: successes as f64 / spec.trials as f64,
        wilson_low: w.low,
        wilson_high: w.high,
        labeled_successes,
        labeled_rate: labeled_successes as f64 / spec.trials as f64,
        per_trial: spec.keep_trials.then_some(trials),
    })
}
