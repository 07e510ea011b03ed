//! Event-driven asynchronous episodes.
//!
//! Each robot runs on its own clock: it picks an action, the action takes a
//! duration from the [`DurationModel`], and its effect lands when it
//! completes. Completions that share a timestamp are resolved together with
//! the synchronous joint rule (ascending robot id). Every robot that has just
//! finished then queries the controller on the projected state, in which
//! robots still executing appear at the cell they started from.

use super::duration::{duration_of, DurationModel, MotionContext};
use crate::arena::{
    action_mask, resolve_joint, reward, winner, Action, ActionMask, Controller, EpisodeOutcome,
    GridPos, Source, Trajectory, TrajectoryRecord, WorldState,
};
use crate::error::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TIME_EPS: f64 = 1e-9;

/// An action that has started but not yet completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InFlight {
    pub robot: usize,
    pub action: Action,
    /// Cell the robot occupied when the action started.
    pub origin: GridPos,
    pub started: f64,
    pub finishes: f64,
}

/// Discrete view of a mid-action world: every in-flight robot (and whatever it
/// carries) is shown at the cell it started from.
pub fn project(in_flight: &[InFlight], base: &WorldState) -> WorldState {
    let mut view = base.clone();
    for f in in_flight {
        let Some(robot) = view.robots.get_mut(f.robot) else {
            continue;
        };
        robot.pos = f.origin;
        if let Some(oid) = robot.carrying {
            view.objects[oid].pos = f.origin;
        }
    }
    view
}

/// Options for one asynchronous episode.
#[derive(Debug, Clone)]
pub struct AsyncConfig {
    pub model: DurationModel,
    pub guidance: bool,
    /// Seeds the duration noise.
    pub seed: u64,
}

fn context(state: &WorldState, robot: usize) -> MotionContext {
    let r = &state.robots[robot];
    MotionContext {
        carrying: r.carrying.is_some(),
        on_slope: r.in_slope,
    }
}

/// Runs one asynchronous episode. It ends when a team completes its target
/// or the wall clock reaches `horizon × mean step duration`.
pub fn run_async_episode<C: Controller + ?Sized>(
    controller: &mut C,
    start: WorldState,
    config: &AsyncConfig,
    id: usize,
) -> Result<Trajectory> {
    config.model.validate()?;
    let n = start.robots.len();
    let task = start.task.clone();
    let wall_horizon = task.horizon as f64 * config.model.mean_step_duration();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut state = start;
    let mut in_flight: Vec<Option<InFlight>> = vec![None; n];
    let mut last_executed: Vec<Option<Action>> = vec![None; n];
    let mut returns = vec![0.0; state.n_teams()];
    let mut pending_rewards = vec![0.0; state.n_teams()];
    let mut records = Vec::new();
    let mut steps = 0;
    let mut now = 0.0;

    let mut deciders: Vec<usize> = if state.any_team_complete() {
        Vec::new()
    } else {
        (0..n).collect()
    };

    loop {
        for &robot in &deciders {
            let active: Vec<InFlight> = in_flight.iter().flatten().copied().collect();
            let view = project(&active, &state);
            let mask = action_mask(&view, robot, config.guidance)?;
            let chosen = controller.act(&view, robot, &mask);
            let action = mask.enforce(chosen);
            let dur = duration_of(
                &config.model,
                last_executed[robot],
                action,
                context(&state, robot),
                &mut rng,
            );
            in_flight[robot] = Some(InFlight {
                robot,
                action,
                origin: state.robots[robot].pos,
                started: now,
                finishes: now + dur,
            });
            let mut replaced = vec![false; n];
            replaced[robot] = action != chosen;
            records.push(TrajectoryRecord {
                time: Some(now),
                robot: Some(robot),
                state: view,
                actions: in_flight.iter().map(|f| f.map(|f| f.action)).collect(),
                rewards: std::mem::replace(&mut pending_rewards, vec![0.0; returns.len()]),
                replaced,
            });
        }

        let Some(next_time) = in_flight
            .iter()
            .flatten()
            .map(|f| f.finishes)
            .min_by(f64::total_cmp)
        else {
            break;
        };
        if next_time > wall_horizon + TIME_EPS {
            break;
        }
        now = next_time;
        let finishing: Vec<usize> = in_flight
            .iter()
            .flatten()
            .filter(|f| f.finishes <= now)
            .map(|f| f.robot)
            .collect();

        // Robots still moving contribute Stop to the joint resolution.
        let mut joint = vec![Action::Stop; n];
        let mut masks = vec![ActionMask::stop_only(); n];
        for &r in &finishing {
            joint[r] = in_flight[r].expect("finishing robot is in flight").action;
            masks[r] = action_mask(&state, r, config.guidance)?;
        }
        let (next, info) = resolve_joint(&state, &joint, &masks)?;
        let r = reward(&state, &next, &task);
        for t in 0..r.len() {
            returns[t] += r[t];
            pending_rewards[t] += r[t];
        }
        for &robot in &finishing {
            last_executed[robot] = Some(info.executed[robot]);
            in_flight[robot] = None;
        }
        state = next;
        steps += 1;

        if state.any_team_complete() || now >= wall_horizon - TIME_EPS {
            break;
        }
        deciders = finishing;
    }

    Ok(Trajectory {
        id,
        source: Source::Async,
        task,
        records,
        outcome: EpisodeOutcome {
            winner: winner(&state),
            steps,
            end_time: Some(now),
            returns,
        },
        final_state: state,
    })
}
