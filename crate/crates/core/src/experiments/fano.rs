//! Empirical error of the MLE against the Fano floor.

use serde::{Deserialize, Serialize};

use super::batch::{run_batch, BatchSpec};
use super::stats::wilson95;
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::thresholds::{fano_floor, mi_upper_bound};

/// Allowed shortfall of the error's Wilson lower bound, in half-widths.
pub const FANO_MARGIN_HALF_WIDTHS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoResult {
    pub config: ModelConfig,
    pub trials: u64,
    pub base_seed: u64,
    pub errors: u64,
    pub empirical_error: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mi_upper: f64,
    pub fano_floor: f64,
    pub margin: f64,
    /// `floor - margin - wilson_low`; positive means the floor was undercut.
    pub shortfall: f64,
    pub pass: bool,
}

/// Runs `trials` uniform-prior MLE trials with Bernoulli weights and checks
/// the error rate against `1 - (mi_upper + ln 2) / ln|Y|`.
pub fn fano_experiment(config: &ModelConfig, trials: u64, base_seed: u64, jobs: Option<usize>) -> Result<FanoResult> {
    if config.r != 1 {
        return Err(Error::PresetMismatch {
            preset: "fano".into(),
            reason: format!("needs r = 1, got r = {}", config.r),
        });
    }
    let floor = fano_floor(config)?;
    let mut spec = BatchSpec::bernoulli(*config, trials, base_seed)?;
    spec.jobs = jobs;
    let res = run_batch(&spec)?;
    let errors = res.trials - res.labeled_successes;
    let w = wilson95(errors, res.trials);
    let margin = FANO_MARGIN_HALF_WIDTHS * w.half_width();
    let shortfall = floor - margin - w.low;
    Ok(FanoResult {
        config: *config,
        trials,
        base_seed,
        errors,
        empirical_error: errors as f64 / trials as f64,
        wilson_low: w.low,
        wilson_high: w.high,
        mi_upper: mi_upper_bound(config)?,
        fano_floor: floor,
        margin,
        shortfall,
        pass: shortfall <= 0.0,
    })
}
