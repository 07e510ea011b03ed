use super::mask::action_mask;
use super::record::{EpisodeOutcome, Source, Trajectory, TrajectoryRecord};
use super::state::WorldState;
use super::step::step_sync;
use super::types::{Action, ActionMask};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Chooses an action for one robot given the state it perceives and its mask.
pub trait Controller {
    fn act(&mut self, state: &WorldState, agent: usize, mask: &ActionMask) -> Action;
}

impl<F> Controller for F
where
    F: FnMut(&WorldState, usize, &ActionMask) -> Action,
{
    fn act(&mut self, state: &WorldState, agent: usize, mask: &ActionMask) -> Action {
        self(state, agent, mask)
    }
}

/// Uniform choice among allowed actions.
#[derive(Debug, Clone)]
pub struct RandomController {
    rng: ChaCha8Rng,
}

impl RandomController {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Controller for RandomController {
    fn act(&mut self, _state: &WorldState, _agent: usize, mask: &ActionMask) -> Action {
        let allowed: Vec<Action> = mask.iter_allowed().collect();
        allowed[self.rng.random_range(0..allowed.len())]
    }
}

/// The team that has completed its target in `state`, if exactly one has.
pub fn winner(state: &WorldState) -> Option<usize> {
    let done: Vec<usize> = (0..state.n_teams()).filter(|t| state.team_complete(*t)).collect();
    match done[..] {
        [t] => Some(t),
        _ => None,
    }
}

/// Runs one synchronous episode from `start` until completion or the horizon.
pub fn run_sync_episode<C: Controller + ?Sized>(
    controller: &mut C,
    start: WorldState,
    guidance: bool,
    id: usize,
) -> Result<Trajectory> {
    let n = start.robots.len();
    let task = start.task.clone();
    let mut returns = vec![0.0; start.n_teams()];
    let mut records = Vec::new();
    let mut state = start;
    let mut done = state.any_team_complete() || state.step_count >= task.horizon;
    let mut steps = 0;
    while !done {
        let mut joint = Vec::with_capacity(n);
        let mut replaced = Vec::with_capacity(n);
        for agent in 0..n {
            let mask = action_mask(&state, agent, guidance)?;
            let a = controller.act(&state, agent, &mask);
            replaced.push(!mask.is_allowed(a));
            joint.push(a);
        }
        let out = step_sync(&state, &joint, guidance)?;
        for (r, x) in returns.iter_mut().zip(&out.rewards) {
            *r += x;
        }
        for (flag, lost) in replaced.iter_mut().zip(&out.info.replaced) {
            *flag |= *lost;
        }
        records.push(TrajectoryRecord {
            time: None,
            robot: None,
            state,
            actions: joint.into_iter().map(Some).collect(),
            rewards: out.rewards,
            replaced,
        });
        state = out.state;
        done = out.done;
        steps += 1;
    }
    Ok(Trajectory {
        id,
        source: Source::Sync,
        task,
        records,
        outcome: EpisodeOutcome {
            winner: winner(&state),
            steps,
            end_time: None,
            returns,
        },
        final_state: state,
    })
}
