//! Monte Carlo checks of the concentration bounds on the noise term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::{LemmaReport, Tally};
use crate::combinatorics::{disagreement, for_each_subset};
use crate::error::{Error, Result};
use crate::experiments::stats::clopper_pearson_upper;
use crate::model::{Hypothesis, ModelConfig, WeightDistribution};
use crate::numeric::ext_f64;
use crate::rng::{derive_seed, rng_from_seed};

pub const MIN_TAIL_SAMPLES: u64 = 10_000;
/// One-sided level of the upper confidence limit.
pub const TAIL_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBound {
    /// `2 exp(-3 (p-q)^2 d / (28 p(1-q)))`, with `q(1-p)` when `q > p`.
    Bernstein,
    /// `2 exp(-(p-q)^2 d / (4 max σ²))` for variance proxies `σ²`.
    Hoeffding,
}

impl TailBound {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bernstein" => Ok(Self::Bernstein),
            "hoeffding" => Ok(Self::Hoeffding),
            _ => Err(Error::InvalidTailCheck(format!("unknown bound `{s}`"))),
        }
    }
}

/// Analytic tail bound at disagreement `d`.
pub fn bernstein_bound(p: f64, q: f64, d: u64) -> f64 {
    let den = if p >= q { p * (1.0 - q) } else { q * (1.0 - p) };
    2.0 * (-3.0 * (p - q).powi(2) * d as f64 / (28.0 * den)).exp()
}

/// Hoeffding bound for a sum of `2d` centered terms, each `σ²`-sub-Gaussian.
pub fn hoeffding_bound(p: f64, q: f64, d: u64, sigma_sq: f64) -> f64 {
    if sigma_sq == 0.0 {
        return 0.0;
    }
    2.0 * (-(p - q).powi(2) * d as f64 / (4.0 * sigma_sq)).exp()
}

/// `2 exp(-(p-q)^2 d / σ²)`, the form without the factor 4.
pub fn hoeffding_bound_unscaled(p: f64, q: f64, d: u64, sigma_sq: f64) -> f64 {
    if sigma_sq == 0.0 {
        return 0.0;
    }
    2.0 * (-(p - q).powi(2) * d as f64 / sigma_sq).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub bound_kind: TailBound,
    pub d: u64,
    pub samples: u64,
    pub events: u64,
    pub estimate: f64,
    /// One-sided 99% upper confidence limit on the event probability.
    pub upper_99: f64,
    pub bound: f64,
    /// Hoeffding only: the bound without the factor 4, for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_f64::option")]
    pub unscaled_bound: Option<f64>,
    /// Weights are deterministic, so the probability is known exactly.
    pub exact: bool,
    pub report: LemmaReport,
}

/// Estimates `P((I) >= (p-q) d(Y))` (sign flipped when `q > p`) and compares
/// its upper confidence limit with the analytic bound.
///
/// Since `(I) = <A, Y - Y*> + (p-q) d`, the event is `<A,Y> >= <A,Y*>`
/// (or `<=` when `q > p`); only the `2d` entries where the membership
/// tensors differ are drawn.
#[allow(clippy::too_many_arguments)]
pub fn tail_check(
    config: &ModelConfig,
    dist_in: &WeightDistribution,
    dist_out: &WeightDistribution,
    y: &Hypothesis,
    y_star: &Hypothesis,
    samples: u64,
    bound_kind: TailBound,
    seed: u64,
) -> Result<TailCheck> {
    if samples < MIN_TAIL_SAMPLES {
        return Err(Error::InvalidTailCheck(format!("need at least {MIN_TAIL_SAMPLES} samples, got {samples}")));
    }
    if y.n() != config.n || y.r() != config.r || y.k() != config.k {
        return Err(Error::ShapeMismatch("hypothesis does not match config".into()));
    }
    y.check_shape(y_star)?;
    if y.same_class(y_star) {
        return Err(Error::NoEvent);
    }
    const TOL: f64 = 1e-12;
    if (dist_in.mean() - config.p).abs() > TOL || (dist_out.mean() - config.q).abs() > TOL {
        return Err(Error::ConfigMismatch("distribution means differ from (p, q)".into()));
    }
    let (p, q) = (config.p, config.q);
    let d = disagreement(y, y_star, config.m)?.d;

    // entries in Y only carry the cross law, entries in Y* only the within law
    let nodes: Vec<usize> = (0..config.n).collect();
    let (mut plus, mut minus) = (0usize, 0usize);
    for_each_subset(&nodes, config.m, |s| match (y.is_within(s), y_star.is_within(s)) {
        (true, false) => plus += 1,
        (false, true) => minus += 1,
        _ => {}
    });
    let (s_out, s_in) = (dist_out.sampler(), dist_in.sampler());
    let event = |i: u64| -> bool {
        let mut rng = rng_from_seed(derive_seed(seed, i));
        let a: f64 = (0..plus).map(|_| s_out.sample(&mut rng)).sum();
        let b: f64 = (0..minus).map(|_| s_in.sample(&mut rng)).sum();
        if p > q {
            a >= b
        } else {
            a <= b
        }
    };
    let events: u64 = (0..samples).into_par_iter().map(|i| u64::from(event(i))).sum();
    let exact = dist_in.is_degenerate() && dist_out.is_degenerate();
    let estimate = events as f64 / samples as f64;
    let upper = if exact { estimate } else { clopper_pearson_upper(events, samples, TAIL_ALPHA) };
    let sigma_sq = dist_in.sub_gaussian_sq().max(dist_out.sub_gaussian_sq());
    let (bound, unscaled) = match bound_kind {
        TailBound::Bernstein => (bernstein_bound(p, q, d), None),
        TailBound::Hoeffding => (hoeffding_bound(p, q, d, sigma_sq), Some(hoeffding_bound_unscaled(p, q, d, sigma_sq))),
    };
    let mut tally = Tally::new();
    tally.record(upper - bound, || {
        format!("d={d} events={events}/{samples} upper99={upper:.6e} bound={bound:.6e}")
    });
    let id = match bound_kind {
        TailBound::Bernstein => "bernstein_tail",
        TailBound::Hoeffding => "hoeffding_tail",
    };
    let mut notes = Vec::new();
    if bound >= 1.0 {
        notes.push("bound >= 1, vacuous".to_string());
    }
    if let Some(u) = unscaled {
        notes.push(format!("unscaled form 2exp(-(p-q)^2 d/σ²) = {u:.6e}; upper99 - unscaled = {:.6e}", upper - u));
    }
    Ok(TailCheck {
        bound_kind,
        d,
        samples,
        events,
        estimate,
        upper_99: upper,
        bound,
        unscaled_bound: unscaled,
        exact,
        report: tally.into_report(id, notes),
    })
}

/// A fixed `(config, dists, y, y*)` used by the acceptance and CLI tail runs.
#[derive(Debug, Clone)]
pub struct TailInstance {
    pub name: &'static str,
    pub config: ModelConfig,
    pub dist_in: WeightDistribution,
    pub dist_out: WeightDistribution,
    pub y: Hypothesis,
    pub y_star: Hypothesis,
}

/// Disjoint supports on 12 nodes with `k = 6, m = 3`, so `d = C(6,3) = 20`.
pub fn documented_instances() -> Result<Vec<TailInstance>> {
    let y_star = Hypothesis::new([vec![0; 6], vec![1; 6]].concat(), 1, 6)?;
    let y = Hypothesis::new([vec![1; 6], vec![0; 6]].concat(), 1, 6)?;
    let mk = |name, p: f64, q: f64, din: WeightDistribution, dout: WeightDistribution| -> Result<TailInstance> {
        Ok(TailInstance {
            name,
            config: ModelConfig::new(12, 1, 6, 3, p, q)?,
            dist_in: din,
            dist_out: dout,
            y: y.clone(),
            y_star: y_star.clone(),
        })
    };
    Ok(vec![
        mk("bernoulli", 0.8, 0.3, WeightDistribution::bernoulli(0.8)?, WeightDistribution::bernoulli(0.3)?)?,
        mk("beta_mean", 0.8, 0.3, WeightDistribution::beta_mean(0.8, 5.0)?, WeightDistribution::beta_mean(0.3, 5.0)?)?,
        mk("point_mass", 1.0, 0.0, WeightDistribution::point_mass(1.0)?, WeightDistribution::point_mass(0.0)?)?,
        mk("bernoulli_reversed", 0.3, 0.8, WeightDistribution::bernoulli(0.3)?, WeightDistribution::bernoulli(0.8)?)?,
    ])
}
