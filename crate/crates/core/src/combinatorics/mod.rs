//! Exact combinatorics of the hypothesis space.

pub mod binom;
pub mod disagreement;
pub mod space;
pub mod subsets;

pub use binom::{binom, binom_u64, factorial, ln_factorial, log_binom, PascalTable};
pub use disagreement::{
    count_d_t, disagreement, misclassification_stats, overlap_matrix, DisagreementStats,
    MisclassificationStats,
};
pub use space::{
    enumerate_classes, for_each_labeled, ln_space_size_lgamma, permutations, sample_uniform,
    space_size, ClassEnumerator, ClassIter, HypothesisSpace, DEFAULT_CLASS_CAP,
};
pub use subsets::{for_each_subset, subset_rank, subset_unrank, SubsetIndexer};
