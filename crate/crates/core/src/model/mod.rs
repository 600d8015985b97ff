//! Domain types of the m-uniform sub-hypergraph block model and its sampler.

pub mod config;
pub mod distribution;
pub mod hypothesis;
pub mod instance;
pub mod tensor;

pub use config::ModelConfig;
pub use distribution::{Family, WeightDistribution, WeightSampler};
pub use hypothesis::Hypothesis;
pub use instance::Instance;
pub use tensor::{expected_tensor, membership_tensor, sample_weights, TensorFile, WeightTensor};
