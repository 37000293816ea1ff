//! Option-set metrics from fresh evaluation rollouts.

use anyhow::{Context, Result};
use odpp::gridworld::{rollout, MazeSpec, TrajectoryRecord};
use odpp::spectral::StateFeatureMap;
use odpp::trainer::{
    extract_landmarks, f_coverage, h_diversity, trajectory_feature, OptionPolicySet,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Metrics over one option set: coverage and diversity as measured by the
/// training objectives themselves, plus final-state displacement statistics
/// in cell units (distances are relative to each trajectory's start cell).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub coverage_score: f64,
    pub diversity_score: f64,
    pub mean_final_distance: f64,
    pub std_final_x: f64,
    pub std_final_y: f64,
    pub seed: u64,
    pub config_hash: String,
}

/// Evaluation rollouts plus their summary numbers.
#[derive(Debug)]
pub struct EvalOutcome {
    pub report: MetricsReport,
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Rolls out every option `rollouts_per_option` times and computes the
/// metric suite. Deterministic for a fixed seed.
pub fn evaluate_options(
    maze: &MazeSpec,
    policies: &OptionPolicySet,
    features: &StateFeatureMap,
    landmark_cap: usize,
    horizon: usize,
    rollouts_per_option: usize,
    seed: u64,
    config_hash: &str,
) -> Result<EvalOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = maze.start_states();
    anyhow::ensure!(!starts.is_empty(), "maze has no start cells");

    let mut trajectories = Vec::new();
    let mut coverage_sum = 0.0;
    let mut dist_sum = 0.0;
    let mut finals_x: Vec<f64> = Vec::new();
    let mut finals_y: Vec<f64> = Vec::new();

    for option in 0..policies.num_options() {
        for _ in 0..rollouts_per_option {
            let s0 = starts[rng.gen_range(0..starts.len())];
            let mut record = rollout(maze, s0, policies, option, horizon, &mut rng)
                .context("evaluation rollout")?;
            coverage_sum += f_coverage(&record, features)?;
            let landmarks = extract_landmarks(&record, features, landmark_cap)?;
            record.landmarks = Some(landmarks);
            let landmark_states = record.landmark_states().expect("landmarks set");
            record.feature = Some(trajectory_feature(&landmark_states, features)?);

            let (x0, y0) = maze.coords(s0)?;
            let (x1, y1) = maze.coords(record.final_state())?;
            let dx = x1 as f64 - x0 as f64;
            let dy = y1 as f64 - y0 as f64;
            dist_sum += (dx * dx + dy * dy).sqrt();
            finals_x.push(x1 as f64);
            finals_y.push(y1 as f64);
            trajectories.push(record);
        }
    }

    let count = trajectories.len() as f64;
    let diversity_score = h_diversity(&trajectories)?;
    let std = |values: &[f64]| -> f64 {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64).sqrt()
    };

    Ok(EvalOutcome {
        report: MetricsReport {
            coverage_score: coverage_sum / count,
            diversity_score,
            mean_final_distance: dist_sum / count,
            std_final_x: std(&finals_x),
            std_final_y: std(&finals_y),
            seed,
            config_hash: config_hash.to_string(),
        },
        trajectories,
    })
}
