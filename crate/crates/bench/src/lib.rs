//! Criterion benchmarks for the search and enumeration kernels.
