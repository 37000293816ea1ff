//! Unsupervised option discovery on discrete mazes, with diversity and
//! coverage objectives expressed through determinantal point processes over
//! Laplacian-spectral state features.
//!
//! The crate is organized bottom-up:
//!
//! - [`eigen`]: cyclic-Jacobi symmetric eigensolver (deterministic output).
//! - [`dpp`]: DPP kernels, subset likelihood, expected cardinality, and fast
//!   greedy MAP inference.
//! - [`spectral`]: state-transition graphs, Laplacian spectra, Fiedler
//!   vector, normalized state features, and a stochastic feature learner.
//! - [`gridworld`]: room/corridor mazes, deterministic dynamics, rollouts.
//! - [`trainer`]: the option-discovery learning loop (prior, intra-option
//!   policy, variational decoder) plus the downstream option selector.

pub mod dpp;
pub mod eigen;
pub mod gridworld;
pub mod spectral;
pub mod trainer;
