//! Option rollouts and the uniform random-walk reference.

use ndarray::Array1;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::maze::{Action, GridError, MazeSpec, ALL_ACTIONS};
use crate::dpp::ItemSubset;

/// `log(1/4)`: per-step log-probability of the uniform policy.
pub const UNIFORM_ACTION_LOGPROB: f64 = -1.3862943611198906; // -ln 4

/// Conditional action distribution over the four grid actions.
pub trait Policy {
    /// Log-probabilities for `[up, down, left, right]` at `(state, option)`.
    fn action_log_probs(&self, state: usize, option: usize) -> [f64; 4];
}

/// The uniform random-walk reference policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformPolicy;

impl Policy for UniformPolicy {
    fn action_log_probs(&self, _state: usize, _option: usize) -> [f64; 4] {
        [UNIFORM_ACTION_LOGPROB; 4]
    }
}

/// One option rollout: `|states| = |actions| + 1`, with the behavior
/// log-probability of every chosen action. Landmarks and the trajectory
/// feature are filled in by the trainer.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub option: usize,
    pub states: Vec<usize>,
    pub actions: Vec<Action>,
    pub log_probs: Vec<f64>,
    /// MAP landmark positions into `states`.
    pub landmarks: Option<ItemSubset>,
    /// Unit trajectory feature from the landmark states.
    pub feature: Option<Array1<f64>>,
}

impl TrajectoryRecord {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn start(&self) -> usize {
        self.states[0]
    }

    pub fn final_state(&self) -> usize {
        *self.states.last().unwrap()
    }

    /// Distinct landmark states, in ascending state order.
    pub fn landmark_states(&self) -> Option<Vec<usize>> {
        self.landmarks.as_ref().map(|subset| {
            let mut states: Vec<usize> =
                subset.indices().iter().map(|&pos| self.states[pos]).collect();
            states.sort_unstable();
            states.dedup();
            states
        })
    }
}

/// Samples one action index from log-probabilities.
fn sample_action(log_probs: &[f64; 4], state: usize, rng: &mut impl Rng) -> Result<usize, GridError> {
    let mut probs = [0.0f64; 4];
    let mut total = 0.0;
    for (i, &lp) in log_probs.iter().enumerate() {
        let p = lp.exp();
        if !p.is_finite() {
            return Err(GridError::NonFinitePolicy { state });
        }
        probs[i] = p;
        total += p;
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(GridError::NonFinitePolicy { state });
    }
    let draw: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return Ok(i);
        }
    }
    Ok(3)
}

/// Runs `policy` for `horizon` steps from `s0` under option `c`.
pub fn rollout(
    maze: &MazeSpec,
    s0: usize,
    policy: &impl Policy,
    option: usize,
    horizon: usize,
    rng: &mut impl Rng,
) -> Result<TrajectoryRecord, GridError> {
    if horizon == 0 {
        return Err(GridError::ZeroHorizon);
    }
    maze.coords(s0)?;
    let mut states = Vec::with_capacity(horizon + 1);
    let mut actions = Vec::with_capacity(horizon);
    let mut log_probs = Vec::with_capacity(horizon);
    states.push(s0);
    let mut s = s0;
    for _ in 0..horizon {
        let lps = policy.action_log_probs(s, option);
        let idx = sample_action(&lps, s, rng)?;
        let action = ALL_ACTIONS[idx];
        let next = maze.step(s, action)?;
        actions.push(action);
        log_probs.push(lps[idx]);
        states.push(next);
        s = next;
    }
    Ok(TrajectoryRecord { option, states, actions, log_probs, landmarks: None, feature: None })
}

/// Log-probability of the whole trajectory under the uniform random walk:
/// `Σ_t log(1/4) = −T·log 4`.
pub fn random_walk_logprob(record: &TrajectoryRecord) -> f64 {
    record.horizon() as f64 * UNIFORM_ACTION_LOGPROB
}

/// JSON-lines record: option id, states as `(x, y)` pairs, action names and
/// behavior log-probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub option: usize,
    pub states: Vec<(usize, usize)>,
    pub actions: Vec<String>,
    pub log_probs: Vec<f64>,
}

/// Serializes one trajectory as a JSON line.
pub fn trajectory_to_json_line(record: &TrajectoryRecord, maze: &MazeSpec) -> Result<String, GridError> {
    let states = record
        .states
        .iter()
        .map(|&s| maze.coords(s))
        .collect::<Result<Vec<_>, _>>()?;
    let json = TrajectoryJson {
        option: record.option,
        states,
        actions: record.actions.iter().map(|a| a.name().to_string()).collect(),
        log_probs: record.log_probs.clone(),
    };
    Ok(serde_json::to_string(&json).expect("trajectory serializes"))
}
