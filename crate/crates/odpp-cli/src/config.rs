//! Run configuration: a single TOML key/value file with every training
//! default baked in, overridable field by field.
//!
//! ```toml
//! # maze: "four_room" (size) or "corridor" (arm_length, chamber)
//! maze = "four_room"
//! size = 11
//! arm_length = 12
//! chamber = 5
//! # optional cell overrides, e.g. starts = [[2, 2]], goals = [[8, 8]]
//! starts = []
//! goals = []
//!
//! # training
//! num_options = 10
//! horizon = 50
//! rollouts_per_pair = 5
//! starts_per_iter = 2
//! landmark_cap = 10
//! feature_dim = 30
//! beta = 1e-3
//! alpha1 = 1e-4
//! alpha2 = 1e-2
//! alpha3 = 1e-2
//! lr_prior = 0.05
//! lr_policy = 2.0
//! lr_decoder = 0.5
//! iterations = 200
//! spectrum_period = 0
//! seed = 0
//!
//! # evaluation
//! eval_rollouts = 10
//! eval_seed = 1
//! ```

use anyhow::{bail, Context, Result};
use odpp::gridworld::{build_maze, MazeKind, MazeSpec};
use odpp::trainer::OptionConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub maze: String,
    pub size: usize,
    pub arm_length: usize,
    pub chamber: usize,
    pub starts: Vec<(usize, usize)>,
    pub goals: Vec<(usize, usize)>,

    pub num_options: usize,
    pub horizon: usize,
    pub rollouts_per_pair: usize,
    pub starts_per_iter: usize,
    pub landmark_cap: usize,
    pub feature_dim: usize,
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub lr_prior: f64,
    pub lr_policy: f64,
    pub lr_decoder: f64,
    pub iterations: usize,
    pub spectrum_period: usize,
    pub seed: u64,

    pub eval_rollouts: usize,
    pub eval_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = OptionConfig::default();
        Self {
            maze: "four_room".into(),
            size: 11,
            arm_length: 12,
            chamber: 5,
            starts: Vec::new(),
            goals: Vec::new(),
            num_options: train.num_options,
            horizon: train.horizon,
            rollouts_per_pair: train.rollouts_per_pair,
            starts_per_iter: train.starts_per_iter,
            landmark_cap: train.landmark_cap,
            feature_dim: train.feature_dim,
            beta: train.beta,
            alpha1: train.alpha1,
            alpha2: train.alpha2,
            alpha3: train.alpha3,
            lr_prior: train.lr_prior,
            lr_policy: train.lr_policy,
            lr_decoder: train.lr_decoder,
            iterations: train.iterations,
            spectrum_period: train.spectrum_period,
            seed: train.seed,
            eval_rollouts: 10,
            eval_seed: 1,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("config parse failure")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn maze_spec(&self) -> Result<MazeSpec> {
        let kind = match self.maze.as_str() {
            "four_room" => MazeKind::FourRoom { size: self.size },
            "corridor" => MazeKind::Corridor { arm_length: self.arm_length, chamber: self.chamber },
            other => bail!("unknown maze kind {other:?} (expected four_room or corridor)"),
        };
        let mut maze = build_maze(kind).context("maze construction")?;
        if !self.starts.is_empty() {
            maze.set_starts(&self.starts).context("start cells")?;
        }
        if !self.goals.is_empty() {
            maze.set_goals(&self.goals).context("goal cells")?;
        }
        Ok(maze)
    }

    pub fn option_config(&self) -> OptionConfig {
        OptionConfig {
            num_options: self.num_options,
            horizon: self.horizon,
            rollouts_per_pair: self.rollouts_per_pair,
            starts_per_iter: self.starts_per_iter,
            landmark_cap: self.landmark_cap,
            feature_dim: self.feature_dim,
            beta: self.beta,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            alpha3: self.alpha3,
            lr_prior: self.lr_prior,
            lr_policy: self.lr_policy,
            lr_decoder: self.lr_decoder,
            iterations: self.iterations,
            spectrum_period: self.spectrum_period,
            seed: self.seed,
        }
    }

    /// SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
