use serde::{Deserialize, Serialize};

use super::{Family, ModelConfig, WeightDistribution};
use crate::error::{Error, Result};

/// A model instance as read from a config file: the `(n, r, k, m, p, q)`
/// fields plus the weight laws.
///
/// The laws are either given in full as `dist_in` / `dist_out`, or through a
/// shared `family` (default `bernoulli`) and optional `precision`, with
/// means `p` and `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(flatten)]
    pub config: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_in: Option<WeightDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_out: Option<WeightDistribution>,
}

impl Instance {
    pub fn bernoulli(config: ModelConfig) -> Self {
        Self { config, family: None, precision: None, dist_in: None, dist_out: None }
    }

    /// The within and cross weight laws, checked against `p` and `q`.
    pub fn distributions(&self) -> Result<(WeightDistribution, WeightDistribution)> {
        let family = Family::parse(self.family.as_deref().unwrap_or("bernoulli"), self.precision)?;
        let din = match self.dist_in {
            Some(d) => d,
            None => WeightDistribution::new(family, self.config.p)?,
        };
        let dout = match self.dist_out {
            Some(d) => d,
            None => WeightDistribution::new(family, self.config.q)?,
        };
        const TOL: f64 = 1e-12;
        if (din.mean() - self.config.p).abs() > TOL || (dout.mean() - self.config.q).abs() > TOL {
            return Err(Error::ConfigMismatch(format!(
                "distribution means ({}, {}) differ from (p, q) = ({}, {})",
                din.mean(),
                dout.mean(),
                self.config.p,
                self.config.q
            )));
        }
        Ok((din, dout))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let a: Instance = serde_json::from_str(r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2}"#).unwrap();
        let (din, dout) = a.distributions().unwrap();
        assert_eq!(din, WeightDistribution::bernoulli(0.7).unwrap());
        assert_eq!(dout.mean(), 0.2);
        let b: Instance = serde_json::from_str(
            r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2,"family":"beta_mean","precision":4}"#,
        )
        .unwrap();
        assert_eq!(b.distributions().unwrap().0, WeightDistribution::beta_mean(0.7, 4.0).unwrap());
        let c: Instance = serde_json::from_str(
            r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2,"dist_in":{"family":"bernoulli","mean":0.6}}"#,
        )
        .unwrap();
        assert!(matches!(c.distributions(), Err(Error::ConfigMismatch(_))));
        assert!(serde_json::from_str::<Instance>(r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2,"x":1}"#).is_err());
        assert!(serde_json::from_str::<Instance>(r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.7}"#).is_err());
    }
}
