//! The option-discovery learning loop.

mod config;
mod gradients;
mod objectives;
mod policies;
mod selector;
mod train;

pub use config::{AblationMode, OptionConfig};
pub use gradients::{
    estimator_gradients, evaluate_start_batch, gradient_step, q_policy_m, q_prior,
    EstimatorGradients, IterationStats, PairGroup, StartBatch, TrajectoryEval,
};
pub use objectives::{
    entropy_prior, expected_cardinality_with_loo, extract_landmarks, f_coverage, g_consistency,
    h_diversity, kl_to_uniform, state_kl_to_uniform, trajectory_feature, trajectory_kernel,
    visited_state_kernel, TrainError,
};
pub use policies::OptionPolicySet;
pub use selector::{train_selector, SelectorConfig, SelectorOutput};
pub use train::{
    exact_maze_spectrum, fnv1a_hex, train, Checkpoint, ObjectiveReport, TrainOutput,
    CHECKPOINT_VERSION,
};
