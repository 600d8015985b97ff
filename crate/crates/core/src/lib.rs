//! Exact community recovery in m-uniform sub-hypergraph stochastic block models.
//!
//! The crate samples the model, solves the maximum-likelihood recovery
//! problem by exhaustive search over tensor classes, evaluates the
//! information-theoretic threshold quantities, and checks the supporting
//! combinatorial and probabilistic bounds by brute force at small sizes.

pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod mle;
pub mod model;
pub mod numeric;
pub mod oracles;
pub mod rng;
pub mod thresholds;

pub use error::{Error, Result};
pub use model::{Hypothesis, ModelConfig, WeightDistribution, WeightTensor};
