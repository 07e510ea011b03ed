//! The synchronous discrete craft arena: world model, constraint and guidance
//! masks, transition, observations, rewards and tasks.

mod mask;
mod observe;
mod record;
mod rollout;
mod state;
mod step;
mod task;
mod types;

pub use mask::{action_mask, guided_action_mask, legal_action_mask, plan_action, Effect};
pub use observe::{
    observation_len, observe, observe_into, observe_joint, observe_joint_into, Observation,
    OBJECT_FEATURES, ROBOT_FEATURES,
};
pub use record::{
    read_trajectories, state_from_line, state_to_line, write_trajectory, EpisodeOutcome, Source,
    StateRecord, Trajectory, TrajectoryRecord,
};
pub(crate) use record::{read_lines, write_line, Line};
pub use rollout::{run_sync_episode, winner, Controller, RandomController};
pub use state::{init_task, init_task_shared, WorldState};
pub use step::{reward, reward_breakdown, resolve_joint, step_sync, RewardBreakdown, StepInfo, StepOutcome};
pub use task::{Placement, RobotSpawn, TargetPiece, TaskMode, TaskSpec, Territory};
pub use types::{Action, ActionMask, GridPos, Heading, ObjectKind, ObjectState, RobotState};
