//! The collect-then-update training loop and its artifacts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gridworld::{rollout, MazeSpec, UniformPolicy};
use crate::spectral::{build_graph, laplacian, spectrum, LaplacianSpectrum, StateFeatureMap};
use crate::trainer::config::OptionConfig;
use crate::trainer::gradients::{evaluate_start_batch, gradient_step, StartBatch};
use crate::trainer::objectives::TrainError;
use crate::trainer::policies::OptionPolicySet;

/// Per-iteration objective summary.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub iteration: usize,
    pub l_ib: f64,
    pub l_dpp1: f64,
    pub l_dpp2: f64,
    pub l_dpp3: f64,
    pub total: f64,
    pub entropy: f64,
    pub kl: f64,
    /// Mean raw `P(G|τ)` weight, kept for inspection.
    pub mean_dpp_weight: f64,
}

impl ObjectiveReport {
    pub const CSV_HEADER: &'static str = "iteration,l_ib,l_dpp1,l_dpp2,l_dpp3,total,entropy,kl";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            self.iteration,
            self.l_ib,
            self.l_dpp1,
            self.l_dpp2,
            self.l_dpp3,
            self.total,
            self.entropy,
            self.kl
        )
    }
}

/// Trained parameters plus the iteration-indexed reports.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub policies: OptionPolicySet,
    pub reports: Vec<ObjectiveReport>,
    pub spectrum_hash: String,
}

/// FNV-1a 64-bit hex digest; used to fingerprint spectra in checkpoints.
pub fn fnv1a_hex(text: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Exact spectrum of the maze's full transition graph.
pub fn exact_maze_spectrum(
    maze: &MazeSpec,
    feature_dim: usize,
) -> Result<LaplacianSpectrum, TrainError> {
    let graph = build_graph(maze.num_states(), maze.exhaustive_transitions())?;
    let l = laplacian(&graph, false)?;
    Ok(spectrum(&l, feature_dim, false)?)
}

fn replay_spectrum(
    maze: &MazeSpec,
    replay: &[(usize, usize)],
    feature_dim: usize,
) -> Result<LaplacianSpectrum, TrainError> {
    let graph = build_graph(maze.num_states(), replay.iter().copied())?;
    let l = laplacian(&graph, false)?;
    Ok(spectrum(&l, feature_dim, false)?)
}

/// Runs the full option-discovery loop on a maze.
///
/// Each iteration samples start states, collects M trajectories per
/// (start, option) pair, evaluates the objective terms, applies one
/// gradient update to the prior, policy and decoder, and clears the buffer.
/// Deterministic for a fixed config and seed.
pub fn train(maze: &MazeSpec, cfg: &OptionConfig) -> Result<TrainOutput, TrainError> {
    cfg.validate().map_err(TrainError::BadConfig)?;
    if maze.start_states().is_empty() {
        return Err(TrainError::BadConfig("maze has no start cells".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut policies = OptionPolicySet::new(maze.num_states(), cfg.num_options, cfg.feature_dim);

    let mut replay: Vec<(usize, usize)> = Vec::new();
    let (mut features, spectrum_hash) = if cfg.spectrum_period == 0 {
        let spec = exact_maze_spectrum(maze, cfg.feature_dim)?;
        let hash = fnv1a_hex(&spec.to_fixture());
        (StateFeatureMap::from_spectrum(&spec), hash)
    } else {
        // Seed the replay buffer with uniform random walks so the first
        // spectrum estimate exists before any option data.
        let warmup = cfg.starts_per_iter * cfg.num_options * cfg.rollouts_per_pair;
        for _ in 0..warmup.max(1) {
            let s0 = maze.start_states()[rng.gen_range(0..maze.start_states().len())];
            let record = rollout(maze, s0, &UniformPolicy, 0, cfg.horizon, &mut rng)?;
            for t in 0..record.horizon() {
                replay.push((record.states[t], record.states[t + 1]));
            }
        }
        let spec = replay_spectrum(maze, &replay, cfg.feature_dim)?;
        let hash = fnv1a_hex(&spec.to_fixture());
        (StateFeatureMap::from_spectrum(&spec), hash)
    };

    let mut reports = Vec::with_capacity(cfg.iterations);
    for iteration in 0..cfg.iterations {
        if cfg.spectrum_period > 0 && iteration > 0 && iteration % cfg.spectrum_period == 0 {
            let spec = replay_spectrum(maze, &replay, cfg.feature_dim)?;
            features = StateFeatureMap::from_spectrum(&spec);
        }

        let mut raw: Vec<(usize, Vec<Vec<crate::gridworld::TrajectoryRecord>>)> =
            Vec::with_capacity(cfg.starts_per_iter);
        let mut visited_invalid = false;
        for _ in 0..cfg.starts_per_iter {
            let s0 = maze.start_states()[rng.gen_range(0..maze.start_states().len())];
            let mut rollouts = Vec::with_capacity(cfg.num_options);
            for option in 0..cfg.num_options {
                let mut group = Vec::with_capacity(cfg.rollouts_per_pair);
                for _ in 0..cfg.rollouts_per_pair {
                    let record = rollout(maze, s0, &policies, option, cfg.horizon, &mut rng)?;
                    if cfg.spectrum_period > 0 {
                        for t in 0..record.horizon() {
                            replay.push((record.states[t], record.states[t + 1]));
                        }
                    }
                    visited_invalid |= record.states.iter().any(|&s| features.get(s).is_err());
                    group.push(record);
                }
                rollouts.push(group);
            }
            raw.push((s0, rollouts));
        }
        // Replay-estimated features cannot cover states first reached this
        // iteration; the trajectories that got there are in the buffer now,
        // so refresh early instead of failing on a zero feature.
        if cfg.spectrum_period > 0 && visited_invalid {
            let spec = replay_spectrum(maze, &replay, cfg.feature_dim)?;
            features = StateFeatureMap::from_spectrum(&spec);
        }

        let mut batches: Vec<StartBatch> = Vec::with_capacity(raw.len());
        for (s0, rollouts) in raw {
            batches.push(evaluate_start_batch(s0, rollouts, &features, &policies, cfg)?);
        }

        let stats = gradient_step(&batches, &mut policies, cfg, maze.start_states())?;
        reports.push(ObjectiveReport {
            iteration,
            l_ib: stats.l_ib,
            l_dpp1: stats.l_dpp1,
            l_dpp2: stats.l_dpp2,
            l_dpp3: stats.l_dpp3,
            total: stats.total,
            entropy: stats.entropy,
            kl: stats.kl,
            mean_dpp_weight: stats.mean_dpp_weight,
        });
    }

    Ok(TrainOutput { policies, reports, spectrum_hash })
}

/// Versioned checkpoint: the four logit tables plus the config and the
/// spectrum fingerprint they were trained against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: OptionConfig,
    pub spectrum_hash: String,
    pub policies: OptionPolicySet,
}

pub const CHECKPOINT_VERSION: u32 = 1;

impl Checkpoint {
    pub fn new(config: OptionConfig, spectrum_hash: String, policies: OptionPolicySet) -> Self {
        Self { version: CHECKPOINT_VERSION, config, spectrum_hash, policies }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TrainError> {
        let parsed: Checkpoint = serde_json::from_str(text)
            .map_err(|e| TrainError::BadCheckpoint(format!("parse failure: {e}")))?;
        if parsed.version != CHECKPOINT_VERSION {
            return Err(TrainError::BadCheckpoint(format!(
                "unsupported version {} (expected {CHECKPOINT_VERSION})",
                parsed.version
            )));
        }
        Ok(parsed)
    }
}
