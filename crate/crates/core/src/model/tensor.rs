use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Hypothesis, ModelConfig, WeightDistribution};
use crate::combinatorics::{for_each_subset, SubsetIndexer};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Hyperedge weights stored densely by lexicographic rank of the m-subset.
#[derive(Debug, Clone)]
pub struct WeightTensor {
    config: ModelConfig,
    values: Vec<f64>,
    indexer: SubsetIndexer,
}

impl PartialEq for WeightTensor {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.values == other.values
    }
}

impl WeightTensor {
    pub fn new(config: ModelConfig, values: Vec<f64>) -> Result<Self> {
        let indexer = SubsetIndexer::new(config.n, config.m);
        if values.len() as u64 != indexer.total() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for C({},{}) = {} subsets",
                values.len(),
                config.n,
                config.m,
                indexer.total()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidConfig(format!("weight {v} at rank {i} not in [0,1]")));
        }
        Ok(Self { config, values, indexer })
    }

    /// Tensor whose entry for each subset (in rank order) is `f(subset)`.
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(config: ModelConfig, mut f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(config.subset_count() as usize);
        let nodes: Vec<usize> = (0..config.n).collect();
        for_each_subset(&nodes, config.m, |s| values.push(f(s)));
        Self::new(config, values)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn indexer(&self) -> &SubsetIndexer {
        &self.indexer
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, subset: &[usize]) -> Result<f64> {
        Ok(self.values[self.indexer.rank(subset)? as usize])
    }

    #[inline]
    pub fn get_unchecked(&self, subset: &[usize]) -> f64 {
        self.values[self.indexer.rank_unchecked(subset) as usize]
    }

    /// Visits `(subset, weight)` in rank order.
    pub fn for_each_entry<F: FnMut(&[usize], f64)>(&self, mut f: F) {
        let nodes: Vec<usize> = (0..self.config.n).collect();
        let mut i = 0;
        for_each_subset(&nodes, self.config.m, |s| {
            f(s, self.values[i]);
            i += 1;
        });
    }

    /// Checks that `y` labels the same node set as this tensor.
    pub fn check_hypothesis(&self, y: &Hypothesis) -> Result<()> {
        if y.n() != self.config.n {
            return Err(Error::ShapeMismatch(format!(
                "hypothesis has {} nodes, tensor has {}",
                y.n(),
                self.config.n
            )));
        }
        Ok(())
    }
}

fn check_truth(config: &ModelConfig, y: &Hypothesis) -> Result<()> {
    if y.n() != config.n || y.r() != config.r || y.k() != config.k {
        return Err(Error::ShapeMismatch(format!(
            "hypothesis (n,r,k) = ({},{},{}) vs config ({},{},{})",
            y.n(),
            y.r(),
            y.k(),
            config.n,
            config.r,
            config.k
        )));
    }
    Ok(())
}

/// The 0/1 membership tensor of `y`.
pub fn membership_tensor(config: &ModelConfig, y: &Hypothesis) -> Result<WeightTensor> {
    check_truth(config, y)?;
    WeightTensor::from_fn(*config, |s| if y.is_within(s) { 1.0 } else { 0.0 })
}

/// `E[A]` under truth `y`: `p` on within-community subsets, `q` elsewhere.
pub fn expected_tensor(config: &ModelConfig, y: &Hypothesis) -> Result<WeightTensor> {
    check_truth(config, y)?;
    WeightTensor::from_fn(*config, |s| if y.is_within(s) { config.p } else { config.q })
}

fn check_means(config: &ModelConfig, dist_in: &WeightDistribution, dist_out: &WeightDistribution) -> Result<()> {
    const TOL: f64 = 1e-12;
    if (dist_in.mean() - config.p).abs() > TOL || (dist_out.mean() - config.q).abs() > TOL {
        return Err(Error::ConfigMismatch(format!(
            "distribution means ({}, {}) differ from (p, q) = ({}, {})",
            dist_in.mean(),
            dist_out.mean(),
            config.p,
            config.q
        )));
    }
    Ok(())
}

/// Draws a weight tensor under truth `y_star`. Entries are drawn in rank
/// order from one stream seeded by `seed`.
pub fn sample_weights(
    config: &ModelConfig,
    y_star: &Hypothesis,
    dist_in: &WeightDistribution,
    dist_out: &WeightDistribution,
    seed: u64,
) -> Result<WeightTensor> {
    let mut rng = rng_from_seed(seed);
    sample_weights_with(config, y_star, dist_in, dist_out, &mut rng)
}

pub fn sample_weights_with(
    config: &ModelConfig,
    y_star: &Hypothesis,
    dist_in: &WeightDistribution,
    dist_out: &WeightDistribution,
    rng: &mut Rng,
) -> Result<WeightTensor> {
    check_truth(config, y_star)?;
    check_means(config, dist_in, dist_out)?;
    let (s_in, s_out) = (dist_in.sampler(), dist_out.sampler());
    WeightTensor::from_fn(*config, |s| {
        if y_star.is_within(s) {
            s_in.sample(rng)
        } else {
            s_out.sample(rng)
        }
    })
}

/// One stored entry: sorted node ids and the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub nodes: Vec<usize>,
    pub weight: f64,
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.nodes.len() + 1))?;
        for v in &self.nodes {
            seq.serialize_element(v)?;
        }
        seq.serialize_element(&self.weight)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Entry;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array [i1, ..., im, w]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Entry, A::Error> {
                let mut items: Vec<serde_json::Number> = Vec::new();
                while let Some(x) = seq.next_element()? {
                    items.push(x);
                }
                let w = items.pop().ok_or_else(|| de::Error::custom("empty entry"))?;
                let weight = w.as_f64().ok_or_else(|| de::Error::custom("bad weight"))?;
                let nodes = items
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|v| v as usize)
                            .ok_or_else(|| de::Error::custom(format!("node id {x} is not a non-negative integer")))
                    })
                    .collect::<std::result::Result<_, _>>()?;
                Ok(Entry { nodes, weight })
            }
        }
        d.deserialize_seq(V)
    }
}

pub const TENSOR_SCHEMA_VERSION: u32 = 1;

/// On-disk JSON form of a [`WeightTensor`].
///
/// Entries equal to `default_weight` may be omitted (sparse form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub config: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_in: Option<WeightDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_out: Option<WeightDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_weight: Option<f64>,
    /// Planted labels, when the file was produced by the sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Vec<usize>>,
    pub entries: Vec<Entry>,
}

fn default_schema() -> u32 {
    TENSOR_SCHEMA_VERSION
}

impl TensorFile {
    /// Dense (or sparse when `default_weight` is set) file body for `tensor`.
    pub fn from_tensor(tensor: &WeightTensor, default_weight: Option<f64>) -> Self {
        let mut entries = Vec::new();
        tensor.for_each_entry(|s, w| {
            if default_weight != Some(w) {
                entries.push(Entry { nodes: s.to_vec(), weight: w });
            }
        });
        Self {
            schema_version: TENSOR_SCHEMA_VERSION,
            config: *tensor.config(),
            dist_in: None,
            dist_out: None,
            seed: None,
            default_weight,
            truth: None,
            entries,
        }
    }

    pub fn to_tensor(&self) -> Result<WeightTensor> {
        let c = self.config;
        let ix = SubsetIndexer::new(c.n, c.m);
        let fill = self.default_weight.unwrap_or(f64::NAN);
        let mut values = vec![fill; ix.total() as usize];
        let mut seen = vec![false; values.len()];
        for e in &self.entries {
            let rank = ix.rank(&e.nodes)? as usize;
            if std::mem::replace(&mut seen[rank], true) {
                return Err(Error::Format(format!("duplicate entry for {:?}", e.nodes)));
            }
            values[rank] = e.weight;
        }
        if self.default_weight.is_none() {
            if let Some(rank) = seen.iter().position(|s| !s) {
                let missing = ix.unrank(rank as u64)?;
                return Err(Error::Format(format!(
                    "entry {missing:?} missing and no default_weight declared"
                )));
            }
        }
        WeightTensor::new(c, values)
    }

    pub fn truth_hypothesis(&self) -> Result<Option<Hypothesis>> {
        self.truth
            .as_ref()
            .map(|l| Hypothesis::new(l.clone(), self.config.r, self.config.k))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, q: f64) -> ModelConfig {
        ModelConfig::new(4, 1, 2, 2, p, q).unwrap()
    }

    #[test]
    fn point_masses_reproduce_membership() {
        let c = cfg(1.0, 0.0);
        let y = Hypothesis::new(vec![1, 0, 1, 0], 1, 2).unwrap();
        let a = sample_weights(
            &c,
            &y,
            &WeightDistribution::point_mass(1.0).unwrap(),
            &WeightDistribution::point_mass(0.0).unwrap(),
            9,
        )
        .unwrap();
        assert_eq!(a, membership_tensor(&c, &y).unwrap());
        assert_eq!(a, expected_tensor(&c, &y).unwrap());
    }

    #[test]
    fn bernoulli_zero_gives_zero_tensor() {
        let c = cfg(0.0, 0.7);
        let y = Hypothesis::new(vec![0, 0, 1, 1], 1, 2).unwrap();
        let a = sample_weights(
            &c,
            &y,
            &WeightDistribution::bernoulli(0.0).unwrap(),
            &WeightDistribution::bernoulli(0.0).unwrap().with_mean(0.7).unwrap(),
            1,
        )
        .unwrap();
        assert_eq!(a.get(&[0, 1]).unwrap(), 0.0);
        let c = cfg(0.0, 1e-300);
        let a = sample_weights(
            &c,
            &y,
            &WeightDistribution::bernoulli(0.0).unwrap(),
            &WeightDistribution::bernoulli(1e-300).unwrap(),
            1,
        )
        .unwrap();
        assert!(a.values().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn expected_tensor_example() {
        let c = cfg(0.8, 0.3);
        let y = Hypothesis::new(vec![0, 0, 1, 1], 1, 2).unwrap();
        let e = expected_tensor(&c, &y).unwrap();
        assert_eq!(e.get(&[0, 1]).unwrap(), 0.8);
        let others: Vec<f64> = e.values()[1..].to_vec();
        assert_eq!(others, vec![0.3; 5]);
        let total: f64 = e.values().iter().sum();
        assert!((total - 2.3).abs() < 1e-12);
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let c = ModelConfig::new(9, 2, 3, 3, 0.6, 0.2).unwrap();
        let y = Hypothesis::new(vec![0, 2, 1, 0, 1, 2, 0, 1, 2], 2, 3).unwrap();
        let din = WeightDistribution::beta_mean(0.6, 4.0).unwrap();
        let dout = WeightDistribution::beta_mean(0.2, 4.0).unwrap();
        let a = sample_weights(&c, &y, &din, &dout, 42).unwrap();
        let b = sample_weights(&c, &y, &din, &dout, 42).unwrap();
        let z = sample_weights(&c, &y, &din, &dout, 43).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), z.values());
    }

    #[test]
    fn empirical_within_mean() {
        let c = cfg(0.8, 0.3);
        let y = Hypothesis::new(vec![0, 0, 1, 1], 1, 2).unwrap();
        let din = WeightDistribution::bernoulli(0.8).unwrap();
        let dout = WeightDistribution::bernoulli(0.3).unwrap();
        let draws = 100_000u64;
        let (mut within, mut cross) = (0.0, 0.0);
        for s in 0..draws {
            let a = sample_weights(&c, &y, &din, &dout, crate::rng::derive_seed(17, s)).unwrap();
            within += a.get(&[0, 1]).unwrap();
            cross += a.get(&[2, 3]).unwrap();
        }
        let (mw, mc) = (within / draws as f64, cross / draws as f64);
        assert!((mw - 0.8).abs() <= 0.01, "{mw}");
        assert!((mw - 0.8).abs() <= 4.0 * (0.16f64 / draws as f64).sqrt());
        assert!((mc - 0.3).abs() <= 4.0 * (0.21f64 / draws as f64).sqrt());
    }

    #[test]
    fn mean_mismatch_is_rejected() {
        let c = cfg(0.8, 0.3);
        let y = Hypothesis::new(vec![0, 0, 1, 1], 1, 2).unwrap();
        let err = sample_weights(
            &c,
            &y,
            &WeightDistribution::bernoulli(0.7).unwrap(),
            &WeightDistribution::bernoulli(0.3).unwrap(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ConfigMismatch(_)));
    }

    #[test]
    fn file_sparse_and_dense() {
        let c = cfg(1.0, 0.0);
        let y = Hypothesis::new(vec![0, 1, 0, 1], 1, 2).unwrap();
        let t = membership_tensor(&c, &y).unwrap();
        let sparse = TensorFile::from_tensor(&t, Some(0.0));
        assert_eq!(sparse.entries.len(), 1);
        let json = serde_json::to_string(&sparse).unwrap();
        assert!(json.contains(r#""entries":[[0,2,1.0]]"#), "{json}");
        let back: TensorFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_tensor().unwrap(), t);
        let dense = TensorFile::from_tensor(&t, None);
        assert_eq!(dense.entries.len(), 6);
        assert_eq!(dense.to_tensor().unwrap(), t);
    }

    #[test]
    fn file_validation() {
        let base = r#"{"config":{"n":4,"r":1,"k":2,"m":2,"p":0.8,"q":0.3},"entries":"#;
        let parse = |entries: &str| {
            let f: TensorFile = serde_json::from_str(&format!("{base}{entries}}}")).unwrap();
            f.to_tensor()
        };
        assert!(parse("[[0,1,0.5]]").is_err()); // missing, no default
        assert!(parse("[[1,0,0.5]]").is_err()); // unsorted
        assert!(parse("[[0,1,0.5],[0,1,0.5]]").is_err());
        let full = "[[0,1,1],[0,2,0],[0,3,0],[1,2,0],[1,3,0],[2,3,1.5]]";
        assert!(parse(full).is_err()); // weight out of range
    }
}
