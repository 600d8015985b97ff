//! Closed-form threshold quantities and region classification.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, binom_u64, ln_space_size_lgamma, space_size};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, WeightDistribution};
use crate::numeric::{ext_f64, ln_biguint, ratio_biguint};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// `KL(Ber(p) || Ber(q))` in nats, summed term by term.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    fn term(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    }
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Symmetric Bernoulli KL divergence `d(p,q) = (p-q) ln(p(1-q) / (q(1-p)))`.
///
/// `+inf` when `p != q` and either mean sits on {0, 1}.
pub fn bernoulli_d(p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let boundary = |x: f64| x == 0.0 || x == 1.0;
    if boundary(p) || boundary(q) {
        return f64::INFINITY;
    }
    let (a, b) = if p > q { (p, q) } else { (q, p) };
    (a - b) * ((a * (1.0 - b)) / (b * (1.0 - a))).ln()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `(p-q)^2 / ((p∧q)(1-p∨q))`.
pub fn signal_ratio_min(p: f64, q: f64) -> f64 {
    ratio((p - q).powi(2), p.min(q) * (1.0 - p.max(q)))
}

/// `(p-q)^2 / ((p∨q)(1-p∧q))`.
pub fn signal_ratio_max(p: f64, q: f64) -> f64 {
    ratio((p - q).powi(2), p.max(q) * (1.0 - p.min(q)))
}

/// `(p-q)^2 / max(σp², σq²)`; `+inf` when both proxies are zero.
pub fn signal_ratio_sigma(p: f64, q: f64, sigma_p_sq: f64, sigma_q_sq: f64) -> f64 {
    ratio((p - q).powi(2), sigma_p_sq.max(sigma_q_sq))
}

/// `1 - r C(n-m, k-m) / C(n, k)`, the fraction of the within-tuple mass that
/// a uniformly drawn truth does not fix.
pub fn mi_factor(config: &ModelConfig) -> Result<f64> {
    let (n, r, k, m) = (config.n as u64, config.r as u64, config.k as u64, config.m as i64);
    let total = binom(n, k as i64);
    let fixed = binom(n - m as u64, k as i64 - m) * BigUint::from(r);
    if fixed > total {
        return Err(Error::IdentityViolation(format!(
            "r C(n-m,k-m) exceeds C(n,k) at {config:?}"
        )));
    }
    Ok(ratio_biguint(&(&total - &fixed), &total))
}

/// Upper bound `r d(p,q) C(k,m) (1 - r C(n-m,k-m)/C(n,k))` on `I(y*; A)` for
/// Bernoulli weights with means `p` and `q`.
pub fn mi_upper_bound(config: &ModelConfig) -> Result<f64> {
    let d = bernoulli_d(config.p, config.q);
    let factor = mi_factor(config)?;
    if d == 0.0 || factor == 0.0 {
        return Ok(0.0);
    }
    Ok(config.r as f64 * d * binom_u64(config.k, config.m) as f64 * factor)
}

/// [`mi_upper_bound`] after checking that both families are Bernoulli with the
/// configured means.
pub fn mi_upper_bound_with(
    config: &ModelConfig,
    dist_in: &WeightDistribution,
    dist_out: &WeightDistribution,
) -> Result<f64> {
    for d in [dist_in, dist_out] {
        if d.bernoulli_mean().is_none() {
            return Err(Error::UnsupportedDivergence(format!(
                "closed-form d(p,q) needs Bernoulli weights, got {}",
                d.family().name()
            )));
        }
    }
    mi_upper_bound(config)
}

/// `max(0, 1 - (mi + ln 2) / ln |Y|)`.
pub fn fano_floor_from(mi: f64, ln_space: f64) -> Result<f64> {
    if ln_space <= 0.0 {
        return Err(Error::DegenerateSpace);
    }
    Ok((1.0 - (mi + std::f64::consts::LN_2) / ln_space).max(0.0))
}

/// Fano lower bound on the error of any estimator under the uniform prior.
pub fn fano_floor(config: &ModelConfig) -> Result<f64> {
    let space = space_size(config.n, config.r, config.k)?;
    if space.labeled_size.is_one() {
        return Err(Error::DegenerateSpace);
    }
    fano_floor_from(mi_upper_bound(config)?, ln_biguint(&space.labeled_size))
}

/// Same as [`fano_floor`] but with `ln |Y|` from log-gamma.
pub fn fano_floor_lgamma(config: &ModelConfig) -> Result<f64> {
    let ln_space = ln_space_size_lgamma(config.n, config.r, config.k);
    if ln_space.abs() < 1e-12 {
        return Err(Error::DegenerateSpace);
    }
    fano_floor_from(mi_upper_bound(config)?, ln_space)
}

/// Which denominator a threshold statistic uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorMode {
    /// `(p∧q)(1-p∨q)`
    MinMode,
    /// `(p∨q)(1-p∧q)`
    MaxMode,
    /// `max(σp², σq²)`
    SigmaMode,
}

impl DenominatorMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "min" | "min_mode" => Ok(Self::MinMode),
            "max" | "max_mode" => Ok(Self::MaxMode),
            "sigma" | "sigma_mode" => Ok(Self::SigmaMode),
            _ => Err(Error::InvalidParams(format!("unknown denominator mode `{s}`"))),
        }
    }
}

/// Constants of the lower and upper conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub c0: f64,
    pub c_upper: f64,
    /// Denominator of the impossibility statistic; `sigma_mode` is not allowed.
    pub lower_mode: DenominatorMode,
    pub upper_mode: DenominatorMode,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self { c0: 0.5, c_upper: 1.0, lower_mode: DenominatorMode::MinMode, upper_mode: DenominatorMode::MaxMode }
    }
}

impl ThresholdParams {
    pub fn new(c0: f64, c_upper: f64) -> Result<Self> {
        let p = Self { c0, c_upper, ..Self::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_modes(mut self, lower: DenominatorMode, upper: DenominatorMode) -> Result<Self> {
        self.lower_mode = lower;
        self.upper_mode = upper;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0 < 1.0) {
            return Err(Error::InvalidParams(format!("c0 = {} not in (0,1)", self.c0)));
        }
        if !(self.c_upper > 0.0 && self.c_upper.is_finite()) {
            return Err(Error::InvalidParams(format!("C = {} must be positive", self.c_upper)));
        }
        if self.lower_mode == DenominatorMode::SigmaMode {
            return Err(Error::InvalidParams("sigma_mode only applies to the upper condition".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ImpossibleMinimax,
    PossibleMle,
    IndeterminateGap,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ImpossibleMinimax => "impossible_minimax",
            Self::PossibleMle => "possible_mle",
            Self::IndeterminateGap => "indeterminate_gap",
        }
    }
}

/// Named preset models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    PlantedSbm,
    DensestSub,
    Multipartite,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "planted_sbm" => Ok(Self::PlantedSbm),
            "densest_sub" => Ok(Self::DensestSub),
            "multipartite" => Ok(Self::Multipartite),
            _ => Err(Error::InvalidParams(format!("unknown preset `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PlantedSbm => "planted_sbm",
            Self::DensestSub => "densest_sub",
            Self::Multipartite => "multipartite",
        }
    }
}

/// How a preset's conditions were formed and whether they coincide with the
/// general ones at this `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetInfo {
    pub model: Preset,
    pub lower_log_factor: String,
    pub upper_log_factor: String,
    pub lower_denominator: String,
    pub upper_denominator: String,
    #[serde(with = "ext_f64")]
    pub lower_statistic: f64,
    #[serde(with = "ext_f64")]
    pub upper_statistic: f64,
    /// The preset lower denominator equals the general one selected by `lower_mode`.
    pub lower_matches_general: bool,
    pub upper_matches_general: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub schema_version: u32,
    pub config: ModelConfig,
    pub params: ThresholdParams,
    #[serde(with = "ext_f64")]
    pub d_pq: f64,
    #[serde(with = "ext_f64")]
    pub signal_ratio_min: f64,
    #[serde(with = "ext_f64")]
    pub signal_ratio_max: f64,
    #[serde(with = "ext_f64::option")]
    pub signal_ratio_sigma: Option<f64>,
    #[serde(with = "ext_f64")]
    pub mi_upper: f64,
    pub ln_space_size: f64,
    /// `None` when `|Y| = 1`.
    pub fano_floor: Option<f64>,
    pub lower_rhs: f64,
    pub upper_rhs: f64,
    #[serde(with = "ext_f64")]
    pub lower_statistic: f64,
    #[serde(with = "ext_f64")]
    pub upper_statistic: f64,
    pub classification: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetInfo>,
}

/// `(1 - c0) k ln(n/k) / C(k,m)`.
pub fn lower_rhs(config: &ModelConfig, c0: f64) -> f64 {
    lower_rhs_with_log(config, c0, (config.n as f64 / config.k as f64).ln())
}

/// `C k ln(n) / C(k,m)`.
pub fn upper_rhs(config: &ModelConfig, c_upper: f64) -> f64 {
    upper_rhs_with_log(config, c_upper, (config.n as f64).ln())
}

fn lower_rhs_with_log(config: &ModelConfig, c0: f64, log: f64) -> f64 {
    (1.0 - c0) * config.k as f64 * log / binom_u64(config.k, config.m) as f64
}

fn upper_rhs_with_log(config: &ModelConfig, c_upper: f64, log: f64) -> f64 {
    c_upper * config.k as f64 * log / binom_u64(config.k, config.m) as f64
}

/// The signal statistic compared against a right-hand side under `mode`.
pub fn statistic(config: &ModelConfig, mode: DenominatorMode, sigmas: Option<(f64, f64)>) -> Result<f64> {
    let (p, q) = (config.p, config.q);
    match mode {
        DenominatorMode::MinMode => Ok(signal_ratio_min(p, q)),
        DenominatorMode::MaxMode => Ok(signal_ratio_max(p, q)),
        DenominatorMode::SigmaMode => {
            let (sp, sq) = sigmas.ok_or(Error::MissingSigma)?;
            Ok(signal_ratio_sigma(p, q, sp, sq))
        }
    }
}

fn decide(lower_stat: f64, lower_rhs: f64, upper_stat: f64, upper_rhs: f64) -> Classification {
    if lower_stat <= lower_rhs {
        Classification::ImpossibleMinimax
    } else if upper_stat >= upper_rhs {
        Classification::PossibleMle
    } else {
        Classification::IndeterminateGap
    }
}

/// Evaluates every threshold quantity for `config` and classifies it.
///
/// `sigmas` holds the variance proxies `(σp², σq²)`; they are required when
/// `params.upper_mode` is `sigma_mode`. The impossibility test is applied
/// first.
pub fn classify(config: &ModelConfig, params: &ThresholdParams, sigmas: Option<(f64, f64)>) -> Result<ThresholdReport> {
    params.validate()?;
    let lower_stat = statistic(config, params.lower_mode, sigmas)?;
    let upper_stat = statistic(config, params.upper_mode, sigmas)?;
    let lo = lower_rhs(config, params.c0);
    let hi = upper_rhs(config, params.c_upper);
    let space = space_size(config.n, config.r, config.k)?;
    let ln_space = ln_biguint(&space.labeled_size);
    let mi = mi_upper_bound(config)?;
    let fano = if space.labeled_size.is_one() { None } else { Some(fano_floor_from(mi, ln_space)?) };
    Ok(ThresholdReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: *config,
        params: *params,
        d_pq: bernoulli_d(config.p, config.q),
        signal_ratio_min: signal_ratio_min(config.p, config.q),
        signal_ratio_max: signal_ratio_max(config.p, config.q),
        signal_ratio_sigma: sigmas.map(|(sp, sq)| signal_ratio_sigma(config.p, config.q, sp, sq)),
        mi_upper: mi,
        ln_space_size: ln_space,
        fano_floor: fano,
        lower_rhs: lo,
        upper_rhs: hi,
        lower_statistic: lower_stat,
        upper_statistic: upper_stat,
        classification: decide(lower_stat, lo, upper_stat, hi),
        preset: None,
    })
}

/// [`classify`] with variance proxies taken from the two distributions.
pub fn classify_with(
    config: &ModelConfig,
    params: &ThresholdParams,
    dist_in: &WeightDistribution,
    dist_out: &WeightDistribution,
) -> Result<ThresholdReport> {
    classify(config, params, Some((dist_in.sub_gaussian_sq(), dist_out.sub_gaussian_sq())))
}

fn preset_mismatch(preset: Preset, reason: &str) -> Error {
    Error::PresetMismatch { preset: preset.name().into(), reason: reason.into() }
}

/// Threshold report using a preset model's log factors and denominators.
///
/// | preset | lower log | upper log | lower den. | upper den. |
/// |---|---|---|---|---|
/// | planted_sbm | ln r | ln r | p(1-q) | p(1-q) |
/// | densest_sub | ln(n/k) | ln n | p(1-q) | p(1-q) |
/// | multipartite | ln r | ln(rk) | p(1-q) | q(1-p) |
pub fn preset_thresholds(preset: Preset, config: &ModelConfig, params: &ThresholdParams) -> Result<ThresholdReport> {
    let (n, r, k) = (config.n, config.r, config.k);
    match preset {
        Preset::PlantedSbm if n != r * k => return Err(preset_mismatch(preset, "planted_sbm requires n = rk")),
        Preset::DensestSub if r != 1 => return Err(preset_mismatch(preset, "densest_sub requires r = 1")),
        Preset::Multipartite if n != r * k => return Err(preset_mismatch(preset, "multipartite requires n = rk")),
        Preset::Multipartite if config.q <= config.p => {
            return Err(preset_mismatch(preset, "multipartite requires q > p"))
        }
        _ => {}
    }
    let mut report = classify(config, params, None).or_else(|e| match e {
        Error::MissingSigma => classify(config, &ThresholdParams { upper_mode: DenominatorMode::MaxMode, ..*params }, None),
        e => Err(e),
    })?;
    let (p, q) = (config.p, config.q);
    let (lower_log, lower_log_name, upper_log, upper_log_name) = match preset {
        Preset::PlantedSbm => ((r as f64).ln(), "ln r", (r as f64).ln(), "ln r"),
        Preset::DensestSub => ((n as f64 / k as f64).ln(), "ln(n/k)", (n as f64).ln(), "ln n"),
        Preset::Multipartite => ((r as f64).ln(), "ln r", ((r * k) as f64).ln(), "ln(rk)"),
    };
    let p1q = ratio((p - q).powi(2), p * (1.0 - q));
    let q1p = ratio((p - q).powi(2), q * (1.0 - p));
    let (upper_stat, upper_den) = match preset {
        Preset::Multipartite => (q1p, "q(1-p)"),
        _ => (p1q, "p(1-q)"),
    };
    let lower_stat = p1q;
    let general_den = |mode: DenominatorMode| match mode {
        DenominatorMode::MinMode => p.min(q) * (1.0 - p.max(q)),
        _ => p.max(q) * (1.0 - p.min(q)),
    };
    let upper_den_value = if preset == Preset::Multipartite { q * (1.0 - p) } else { p * (1.0 - q) };
    let lo = lower_rhs_with_log(config, params.c0, lower_log);
    let hi = upper_rhs_with_log(config, params.c_upper, upper_log);
    report.lower_rhs = lo;
    report.upper_rhs = hi;
    report.lower_statistic = lower_stat;
    report.upper_statistic = upper_stat;
    report.classification = decide(lower_stat, lo, upper_stat, hi);
    report.preset = Some(PresetInfo {
        model: preset,
        lower_log_factor: lower_log_name.into(),
        upper_log_factor: upper_log_name.into(),
        lower_denominator: "p(1-q)".into(),
        upper_denominator: upper_den.into(),
        lower_statistic: lower_stat,
        upper_statistic: upper_stat,
        lower_matches_general: p * (1.0 - q) == general_den(params.lower_mode),
        upper_matches_general: upper_den_value == general_den(params.upper_mode),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Vec<f64> {
        (1..=19).map(|i| i as f64 * 0.05).collect()
    }

    #[test]
    fn d_values() {
        assert_eq!(bernoulli_d(0.5, 0.5), 0.0);
        let oracle = bernoulli_kl(0.6, 0.4) + bernoulli_kl(0.4, 0.6);
        assert_abs_diff_eq!(bernoulli_d(0.6, 0.4), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(bernoulli_d(0.6, 0.4), 0.16218604324326563, epsilon = 1e-12);
        assert_eq!(bernoulli_d(1.0, 0.0), f64::INFINITY);
        assert_eq!(bernoulli_d(0.0, 0.5), f64::INFINITY);
        for &p in &grid() {
            for &q in &grid() {
                assert_eq!(bernoulli_d(p, q), bernoulli_d(q, p));
                if p != q {
                    let o = bernoulli_kl(p, q) + bernoulli_kl(q, p);
                    assert!((bernoulli_d(p, q) - o).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ratio_ordering_and_kl_chain() {
        for &p in &grid() {
            for &q in &grid() {
                if p == q {
                    continue;
                }
                assert!(signal_ratio_max(p, q) <= signal_ratio_min(p, q));
                assert!(bernoulli_d(p, q) <= signal_ratio_min(p, q));
            }
        }
    }

    #[test]
    fn mi_bound_small() {
        let c = ModelConfig::new(4, 1, 2, 2, 0.8, 0.3).unwrap();
        let want = 5.0 / 6.0 * bernoulli_d(0.8, 0.3);
        assert_abs_diff_eq!(mi_upper_bound(&c).unwrap(), want, epsilon = 1e-14);
        let close = ModelConfig::new(4, 1, 2, 2, 0.5 + 1e-9, 0.5 - 1e-9).unwrap();
        assert!(mi_upper_bound(&close).unwrap() < 1e-15);
    }

    #[test]
    fn mi_bound_monotone_in_gap() {
        let q = 0.2;
        let mut last = 0.0;
        for i in 1..=15 {
            let p = q + i as f64 * 0.05;
            let c = ModelConfig::new(9, 2, 3, 2, p, q).unwrap();
            let v = mi_upper_bound(&c).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn mi_bound_rejects_beta() {
        let c = ModelConfig::new(4, 1, 2, 2, 0.8, 0.3).unwrap();
        let din = WeightDistribution::beta_mean(0.8, 3.0).unwrap();
        let dout = WeightDistribution::bernoulli(0.3).unwrap();
        assert!(matches!(mi_upper_bound_with(&c, &din, &dout), Err(Error::UnsupportedDivergence(_))));
    }

    #[test]
    fn fano_values() {
        assert_abs_diff_eq!(fano_floor_from(0.0, 6f64.ln()).unwrap(), 0.6131471927654584, epsilon = 1e-12);
        assert_eq!(fano_floor_from(10.0, 6f64.ln()).unwrap(), 0.0);
        let single = ModelConfig::new(3, 1, 3, 2, 0.8, 0.3).unwrap();
        assert!(matches!(fano_floor(&single), Err(Error::DegenerateSpace)));
    }

    #[test]
    fn fano_two_routes_and_base_change() {
        for (n, r, k) in [(4, 1, 2), (6, 1, 3), (9, 2, 3), (12, 3, 4), (30, 2, 5)] {
            for &(p, q) in &[(0.52, 0.48), (0.7, 0.35), (0.2, 0.6)] {
                let c = ModelConfig::new(n, r, k, 2, p, q).unwrap();
                let a = fano_floor(&c).unwrap();
                let b = fano_floor_lgamma(&c).unwrap();
                assert!((a - b).abs() < 1e-9);
                let ln_y = space_size(n, r, k).unwrap().ln_labeled_size();
                let mi = mi_upper_bound(&c).unwrap();
                let base2 = (1.0 - (mi / 2f64.ln() + 1.0) / (ln_y / 2f64.ln())).max(0.0);
                assert!((a - base2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fano_non_increasing_in_d() {
        let q = 0.3;
        let mut last = 1.0;
        for i in 1..=13 {
            let p = q + i as f64 * 0.05;
            let f = fano_floor(&ModelConfig::new(6, 1, 3, 2, p, q).unwrap()).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f <= last);
            last = f;
        }
    }

    #[test]
    fn classify_examples() {
        let params = ThresholdParams::default();
        let c = ModelConfig::new(4, 1, 2, 2, 0.55, 0.45).unwrap();
        let rep = classify(&c, &params, None).unwrap();
        assert_abs_diff_eq!(rep.d_pq, 0.0401341390924303, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.lower_rhs, 2f64.ln(), epsilon = 1e-12);
        assert_eq!(rep.classification, Classification::ImpossibleMinimax);

        let sep = ModelConfig::new(4, 1, 2, 2, 1.0, 0.0).unwrap();
        let rep = classify(&sep, &params, None).unwrap();
        assert_eq!(rep.signal_ratio_min, f64::INFINITY);
        assert_ne!(rep.classification, Classification::ImpossibleMinimax);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains(r#""d_pq":"inf""#), "{json}");
    }

    #[test]
    fn sigma_mode() {
        let params = ThresholdParams::default()
            .with_modes(DenominatorMode::MinMode, DenominatorMode::SigmaMode)
            .unwrap();
        let c = ModelConfig::new(12, 2, 4, 3, 0.8, 0.2).unwrap();
        assert!(matches!(classify(&c, &params, None), Err(Error::MissingSigma)));
        let rep = classify(&c, &params, Some((0.0, 0.0))).unwrap();
        assert_eq!(rep.signal_ratio_sigma, Some(f64::INFINITY));
        assert_eq!(rep.classification, Classification::PossibleMle);
        assert!(ThresholdParams::default()
            .with_modes(DenominatorMode::SigmaMode, DenominatorMode::MaxMode)
            .is_err());
        assert!(ThresholdParams::new(1.0, 1.0).is_err());
        assert!(ThresholdParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn presets() {
        let params = ThresholdParams::default();
        let c = ModelConfig::new(20, 1, 5, 3, 0.6, 0.3).unwrap();
        let rep = preset_thresholds(Preset::DensestSub, &c, &params).unwrap();
        assert_abs_diff_eq!(rep.lower_rhs, 0.5 * 5.0 * 4f64.ln() / 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.upper_rhs, 5.0 * 20f64.ln() / 10.0, epsilon = 1e-12);
        let info = rep.preset.unwrap();
        assert!(!info.lower_matches_general);
        assert!(info.upper_matches_general);

        let single = ModelConfig::new(4, 1, 4, 2, 0.6, 0.3).unwrap();
        let rep = preset_thresholds(Preset::PlantedSbm, &single, &params).unwrap();
        assert_eq!(rep.lower_rhs, 0.0);
        assert_ne!(rep.classification, Classification::ImpossibleMinimax);

        let mp = ModelConfig::new(9, 3, 3, 2, 0.2, 0.6).unwrap();
        let rep = preset_thresholds(Preset::Multipartite, &mp, &params).unwrap();
        assert_abs_diff_eq!(rep.upper_rhs, 3.0 * 9f64.ln() / 3.0, epsilon = 1e-12);
        assert_eq!(rep.preset.as_ref().unwrap().upper_denominator, "q(1-p)");

        assert!(preset_thresholds(Preset::DensestSub, &mp, &params).is_err());
        assert!(preset_thresholds(Preset::PlantedSbm, &c, &params).is_err());
        let wrong_sign = ModelConfig::new(9, 3, 3, 2, 0.6, 0.2).unwrap();
        assert!(matches!(
            preset_thresholds(Preset::Multipartite, &wrong_sign, &params),
            Err(Error::PresetMismatch { .. })
        ));
    }
}
