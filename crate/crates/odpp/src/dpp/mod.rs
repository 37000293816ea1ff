//! Determinantal point process kernels, likelihoods, expected cardinality
//! and greedy MAP inference.

mod greedy;
mod kernel;

pub use greedy::{greedy_map, greedy_map_trace, GreedyTrace};
pub use kernel::{
    build_kernel, dpp_log_likelihood, expected_cardinality, FeatureMatrix, ItemSubset,
    KernelError, KernelMatrix, QualityVector, NORM_TOL,
};
