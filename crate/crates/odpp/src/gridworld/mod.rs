//! Discrete maze environments and rollout machinery.

mod maze;
mod rollout;

pub use maze::{build_maze, parse_maze, Action, GridError, MazeKind, MazeSpec, ALL_ACTIONS};
pub use rollout::{
    random_walk_logprob, rollout, trajectory_to_json_line, Policy, TrajectoryJson,
    TrajectoryRecord, UniformPolicy, UNIFORM_ACTION_LOGPROB,
};
