use super::mask::{action_mask, apply_effect, plan_action};
use super::state::WorldState;
use super::task::{TaskMode, TaskSpec};
use super::types::{Action, ActionMask};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// Action actually executed per robot.
    pub executed: Vec<Action>,
    /// True where the requested action was masked or lost a conflict and ran as `Stop`.
    pub replaced: Vec<bool>,
    pub progress_delta: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: WorldState,
    pub rewards: Vec<f64>,
    pub done: bool,
    pub info: StepInfo,
}

/// Shaping and terminal parts of a per-team reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardBreakdown {
    pub shaping: Vec<f64>,
    pub terminal: Vec<f64>,
}

impl RewardBreakdown {
    pub fn total(&self) -> Vec<f64> {
        self.shaping
            .iter()
            .zip(&self.terminal)
            .map(|(s, t)| s + t)
            .collect()
    }
}

pub fn reward_breakdown(prev: &WorldState, next: &WorldState, spec: &TaskSpec) -> RewardBreakdown {
    let teams = spec.n_teams();
    let shaping: Vec<f64> = (0..teams)
        .map(|t| spec.r_build * (next.progress[t] as f64 - prev.progress[t] as f64))
        .collect();
    let mut terminal = vec![0.0; teams];
    let newly_complete: Vec<bool> = (0..teams)
        .map(|t| next.team_complete(t) && !prev.team_complete(t))
        .collect();
    match spec.mode {
        TaskMode::Cooperative => {
            for t in 0..teams {
                if newly_complete[t] {
                    terminal[t] = spec.r_completion;
                }
            }
        }
        TaskMode::Competitive => {
            let winners: Vec<usize> = (0..teams).filter(|t| newly_complete[*t]).collect();
            // simultaneous completion is a draw
            if let [w] = winners[..] {
                for (t, r) in terminal.iter_mut().enumerate() {
                    *r = if t == w { spec.r_completion } else { -spec.r_completion };
                }
            }
        }
    }
    RewardBreakdown { shaping, terminal }
}

/// Per-team reward for the transition `prev -> next`.
pub fn reward(prev: &WorldState, next: &WorldState, spec: &TaskSpec) -> Vec<f64> {
    reward_breakdown(prev, next, spec).total()
}

/// Executes one joint action without horizon bookkeeping. Robots are resolved
/// in ascending id order: an action must be allowed by its mask on `state` and
/// still be feasible after lower-id robots have acted, otherwise it runs as
/// `Stop`. `step_count` increments and progress is refreshed.
pub fn resolve_joint(
    state: &WorldState,
    joint: &[Action],
    masks: &[ActionMask],
) -> Result<(WorldState, StepInfo)> {
    if joint.len() != state.robots.len() || masks.len() != state.robots.len() {
        return Err(Error::contract(format!(
            "joint action has {} entries ({} masks) for {} robots",
            joint.len(),
            masks.len(),
            state.robots.len()
        )));
    }
    let mut next = state.clone();
    let mut executed = Vec::with_capacity(joint.len());
    let mut replaced = Vec::with_capacity(joint.len());
    for (agent, (&action, mask)) in joint.iter().zip(masks).enumerate() {
        let effect = if mask.is_allowed(action) {
            plan_action(&next, agent, action)
        } else {
            None
        };
        match effect {
            Some(e) => {
                apply_effect(&mut next, agent, e);
                executed.push(action);
                replaced.push(false);
            }
            None => {
                executed.push(Action::Stop);
                replaced.push(action != Action::Stop);
            }
        }
    }
    next.step_count += 1;
    next.progress = next.compute_progress();
    let progress_delta = next
        .progress
        .iter()
        .zip(&state.progress)
        .map(|(n, p)| *n as i64 - *p as i64)
        .collect();
    Ok((
        next,
        StepInfo {
            executed,
            replaced,
            progress_delta,
        },
    ))
}

/// Synchronous environment step: all robots act on the same state.
pub fn step_sync(state: &WorldState, joint: &[Action], guidance: bool) -> Result<StepOutcome> {
    if joint.len() != state.robots.len() {
        return Err(Error::contract(format!(
            "joint action has {} entries for {} robots",
            joint.len(),
            state.robots.len()
        )));
    }
    let masks = (0..state.robots.len())
        .map(|a| action_mask(state, a, guidance))
        .collect::<Result<Vec<_>>>()?;
    let (next, info) = resolve_joint(state, joint, &masks)?;
    let rewards = reward(state, &next, &state.task);
    let done = next.any_team_complete() || next.step_count >= state.task.horizon;
    Ok(StepOutcome {
        state: next,
        rewards,
        done,
        info,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::state::init_task;
    use crate::arena::task::TaskSpec;
    use crate::arena::types::{GridPos, Heading};

    #[test]
    fn all_stop_only_advances_the_clock() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let s = init_task(&spec, 0).unwrap();
        let out = step_sync(&s, &[Action::Stop, Action::Stop], true).unwrap();
        let mut expected = s.clone();
        expected.step_count += 1;
        assert_eq!(out.state, expected);
        assert_eq!(out.rewards, vec![0.0]);
        assert!(!out.done);
        assert_eq!(out.info.replaced, vec![false, false]);
    }

    #[test]
    fn joint_length_mismatch_is_a_contract_error() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let s = init_task(&spec, 0).unwrap();
        let err = step_sync(&s, &[Action::Stop], false).unwrap_err();
        assert_eq!(err.category(), "contract");
    }

    #[test]
    fn lower_id_wins_a_contested_cell() {
        let mut spec = TaskSpec::preset("build-character-desk").unwrap();
        spec.randomize_spawns = false;
        spec.robots[0].x = 2;
        spec.robots[0].y = 3;
        spec.robots[0].heading = Heading::East;
        spec.robots[1].x = 4;
        spec.robots[1].y = 3;
        spec.robots[1].heading = Heading::West;
        let s = init_task(&spec, 0).unwrap();
        let out = step_sync(&s, &[Action::MoveForward, Action::MoveForward], false).unwrap();
        assert_eq!(out.state.robots[0].pos, GridPos::ground(3, 3));
        assert_eq!(out.state.robots[1].pos, GridPos::ground(4, 3));
        assert_eq!(out.info.replaced, vec![false, true]);
        assert_eq!(out.info.executed[1], Action::Stop);
    }

    #[test]
    fn horizon_ends_the_episode() {
        let mut spec = TaskSpec::preset("fetch-block").unwrap();
        spec.horizon = 2;
        let s = init_task(&spec, 0).unwrap();
        let a = step_sync(&s, &[Action::Stop], false).unwrap();
        assert!(!a.done);
        let b = step_sync(&a.state, &[Action::Stop], false).unwrap();
        assert!(b.done);
    }
}
