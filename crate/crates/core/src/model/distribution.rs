use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variance-proxy cap for any distribution supported on `[0,1]` (Hoeffding's lemma).
pub const BOUNDED_SUB_GAUSSIAN_SQ: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Bernoulli,
    /// Beta law parameterised by mean and precision `a + b`.
    BetaMean { precision: f64 },
    PointMass,
}

/// A weight law on `[0,1]` with a known mean and sub-Gaussian variance proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct WeightDistribution {
    family: Family,
    mean: f64,
    sub_gaussian_sq: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    family: String,
    mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sub_gaussian_sq: Option<f64>,
}

impl TryFrom<RawDistribution> for WeightDistribution {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        let family = Family::parse(&raw.family, raw.precision)?;
        let d = WeightDistribution::new(family, raw.mean)?;
        match raw.sub_gaussian_sq {
            Some(s) => d.with_sub_gaussian_sq(s),
            None => Ok(d),
        }
    }
}

impl From<WeightDistribution> for RawDistribution {
    fn from(d: WeightDistribution) -> Self {
        let precision = match d.family {
            Family::BetaMean { precision } => Some(precision),
            _ => None,
        };
        RawDistribution {
            family: d.family.name().to_string(),
            mean: d.mean,
            precision,
            sub_gaussian_sq: Some(d.sub_gaussian_sq),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::BetaMean { .. } => "beta_mean",
            Family::PointMass => "point_mass",
        }
    }

    pub fn parse(name: &str, precision: Option<f64>) -> Result<Self> {
        match name {
            "bernoulli" => Ok(Family::Bernoulli),
            "point_mass" => Ok(Family::PointMass),
            "beta_mean" => {
                let precision = precision.ok_or_else(|| {
                    Error::InvalidDistribution("beta_mean needs a precision".into())
                })?;
                Ok(Family::BetaMean { precision })
            }
            other => Err(Error::InvalidDistribution(format!("unknown family `{other}`"))),
        }
    }
}

impl WeightDistribution {
    pub fn new(family: Family, mean: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidDistribution(format!("mean {mean} not in [0,1]")));
        }
        if let Family::BetaMean { precision } = family {
            if !(precision > 0.0 && precision.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "beta precision must be positive, got {precision}"
                )));
            }
        }
        let sub_gaussian_sq = match family {
            Family::PointMass => 0.0,
            _ => BOUNDED_SUB_GAUSSIAN_SQ,
        };
        Ok(Self { family, mean, sub_gaussian_sq })
    }

    pub fn bernoulli(mean: f64) -> Result<Self> {
        Self::new(Family::Bernoulli, mean)
    }

    pub fn beta_mean(mean: f64, precision: f64) -> Result<Self> {
        Self::new(Family::BetaMean { precision }, mean)
    }

    pub fn point_mass(mean: f64) -> Result<Self> {
        Self::new(Family::PointMass, mean)
    }

    /// Overrides the default variance proxy. Must lie in `[0, 1/4]`.
    pub fn with_sub_gaussian_sq(mut self, s: f64) -> Result<Self> {
        if !(0.0..=BOUNDED_SUB_GAUSSIAN_SQ).contains(&s) {
            return Err(Error::InvalidDistribution(format!(
                "sub_gaussian_sq {s} not in [0, 1/4]"
            )));
        }
        self.sub_gaussian_sq = s;
        Ok(self)
    }

    /// Same family and proxy with a different mean.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        let d = Self::new(self.family, mean)?;
        if self.family == Family::PointMass {
            Ok(d)
        } else {
            d.with_sub_gaussian_sq(self.sub_gaussian_sq)
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sub_gaussian_sq(&self) -> f64 {
        self.sub_gaussian_sq
    }

    /// Analytic variance of the law.
    pub fn variance(&self) -> f64 {
        let mu = self.mean;
        match self.family {
            Family::Bernoulli => mu * (1.0 - mu),
            Family::BetaMean { precision } => mu * (1.0 - mu) / (precision + 1.0),
            Family::PointMass => 0.0,
        }
    }

    /// True when every draw equals the mean.
    pub fn is_degenerate(&self) -> bool {
        match self.family {
            Family::PointMass => true,
            Family::Bernoulli | Family::BetaMean { .. } => self.mean == 0.0 || self.mean == 1.0,
        }
    }

    /// The Bernoulli parameter when the law is Bernoulli (a point mass at 0 or 1 counts).
    pub fn bernoulli_mean(&self) -> Option<f64> {
        match self.family {
            Family::Bernoulli => Some(self.mean),
            Family::PointMass if self.mean == 0.0 || self.mean == 1.0 => Some(self.mean),
            Family::BetaMean { .. } if self.mean == 0.0 || self.mean == 1.0 => Some(self.mean),
            _ => None,
        }
    }

    /// Beta shape parameters `(mean * precision, (1 - mean) * precision)`.
    pub fn beta_shape(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::BetaMean { precision } => Some((self.mean * precision, (1.0 - self.mean) * precision)),
            _ => None,
        }
    }

    pub fn sampler(&self) -> WeightSampler {
        match self.family {
            Family::Bernoulli => WeightSampler::Bernoulli(self.mean),
            Family::PointMass => WeightSampler::Constant(self.mean),
            Family::BetaMean { .. } if self.is_degenerate() => WeightSampler::Constant(self.mean),
            Family::BetaMean { .. } => {
                let (a, b) = self.beta_shape().expect("beta family");
                WeightSampler::Beta(Beta::new(a, b).expect("positive shapes"))
            }
        }
    }
}

/// Prepared sampler for one [`WeightDistribution`].
///
/// Bernoulli draws consume exactly one uniform per call, so tensors sampled
/// from the same seed at different means are coupled entry by entry.
#[derive(Debug, Clone, Copy)]
pub enum WeightSampler {
    Bernoulli(f64),
    Beta(Beta<f64>),
    Constant(f64),
}

impl WeightSampler {
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            WeightSampler::Bernoulli(p) => {
                let u: f64 = rng.random();
                if u < *p {
                    1.0
                } else {
                    0.0
                }
            }
            WeightSampler::Beta(b) => b.sample(rng).clamp(0.0, 1.0),
            WeightSampler::Constant(c) => *c,
        }
    }
}
