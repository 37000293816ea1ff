//! Downstream option selector: a high-level policy choosing among frozen
//! options in a sparse-reward goal task.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gridworld::{MazeSpec, ALL_ACTIONS};
use crate::trainer::objectives::TrainError;
use crate::trainer::policies::OptionPolicySet;

/// Goal-task and selector-training parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectorConfig {
    /// High-level decisions per episode.
    pub decisions_per_episode: usize,
    /// Steps executed per option invocation.
    pub option_horizon: usize,
    pub episodes_per_iter: usize,
    pub iterations: usize,
    pub lr: f64,
    /// Reward on entering a goal cell (ends the episode).
    pub goal_reward: f64,
    /// Penalty per environment step.
    pub step_penalty: f64,
    /// Start the selector from the trained prior instead of uniform.
    pub init_from_prior: bool,
    pub seed: u64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            decisions_per_episode: 4,
            option_horizon: 50,
            episodes_per_iter: 16,
            iterations: 40,
            lr: 1.0,
            goal_reward: 1.0,
            step_penalty: 0.002,
            init_from_prior: false,
            seed: 0,
        }
    }
}

/// Trained selector plus the mean episode return per iteration.
#[derive(Debug, Clone)]
pub struct SelectorOutput {
    pub policies: OptionPolicySet,
    pub mean_returns: Vec<f64>,
}

impl SelectorOutput {
    /// First iteration whose mean return reaches `threshold`.
    pub fn iterations_to_threshold(&self, threshold: f64) -> Option<usize> {
        self.mean_returns.iter().position(|&r| r >= threshold)
    }
}

fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Trains the selector over option-level decisions with the same
/// score-function machinery as the option trainer, options held frozen.
pub fn train_selector(
    policies: &OptionPolicySet,
    maze: &MazeSpec,
    cfg: &SelectorConfig,
) -> Result<SelectorOutput, TrainError> {
    if policies.num_options() == 0 {
        return Err(TrainError::NoOptions);
    }
    if maze.goal_states().is_empty() {
        return Err(TrainError::NoGoal);
    }
    if maze.start_states().is_empty() {
        return Err(TrainError::BadConfig("maze has no start cells".into()));
    }

    let mut trained = policies.clone();
    if cfg.init_from_prior {
        trained.init_selector_from_prior();
    } else {
        trained.reset_selector();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mean_returns = Vec::with_capacity(cfg.iterations);
    let num_options = trained.num_options();

    for _ in 0..cfg.iterations {
        let mut episodes: Vec<(Vec<(usize, usize)>, f64)> =
            Vec::with_capacity(cfg.episodes_per_iter);
        for _ in 0..cfg.episodes_per_iter {
            let mut s = maze.start_states()[rng.gen_range(0..maze.start_states().len())];
            let mut decisions = Vec::with_capacity(cfg.decisions_per_episode);
            let mut ret = 0.0;
            'episode: for _ in 0..cfg.decisions_per_episode {
                let probs = trained.selector_probs(s);
                let option = sample_index(&probs, &mut rng);
                decisions.push((s, option));
                for _ in 0..cfg.option_horizon {
                    let lps = trained.policy_log_probs(s, option);
                    let probs4: Vec<f64> = lps.iter().map(|&l| l.exp()).collect();
                    let a = ALL_ACTIONS[sample_index(&probs4, &mut rng)];
                    s = maze.step(s, a)?;
                    ret -= cfg.step_penalty;
                    if maze.goal_states().contains(&s) {
                        ret += cfg.goal_reward;
                        break 'episode;
                    }
                }
            }
            episodes.push((decisions, ret));
        }

        let mean: f64 =
            episodes.iter().map(|(_, r)| r).sum::<f64>() / episodes.len() as f64;
        mean_returns.push(mean);

        let mut grad =
            ndarray::Array2::<f64>::zeros((trained.num_states(), num_options));
        let scale = 1.0 / episodes.len() as f64;
        for (decisions, ret) in &episodes {
            let advantage = ret - mean;
            if advantage == 0.0 {
                continue;
            }
            for &(s, c) in decisions {
                let probs = trained.selector_probs(s);
                for c2 in 0..num_options {
                    let indicator = if c2 == c { 1.0 } else { 0.0 };
                    grad[[s, c2]] += scale * advantage * (indicator - probs[c2]);
                }
            }
        }
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(TrainError::NonFiniteGradient("selector gradient".into()));
        }
        trained.add_to_selector(&grad, cfg.lr);
    }

    Ok(SelectorOutput { policies: trained, mean_returns })
}
