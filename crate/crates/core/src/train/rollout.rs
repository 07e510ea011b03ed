use super::config::PpoConfig;
use crate::arena::{
    action_mask, init_task_shared, observe_into, observe_joint_into, observation_len, step_sync, winner,
    Action, ActionMask, TaskSpec, WorldState,
};
use crate::error::{Error, Result};
use crate::nn::{MaskedDistribution, PolicyParams};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Replaces `action` with `Stop` with probability `p_stop`.
pub fn dr_wrap<R: Rng + ?Sized>(action: Action, p_stop: f64, rng: &mut R) -> Action {
    if p_stop > 0.0 && rng.random_bool(p_stop.min(1.0)) {
        Action::Stop
    } else {
        action
    }
}

/// Start-state distribution: the task's own initialisation mixed with a pool
/// of extra start states drawn with probability `p_extra`.
#[derive(Debug, Clone)]
pub struct StartDistribution {
    pub task: Arc<TaskSpec>,
    pub extra: Arc<Vec<WorldState>>,
    pub p_extra: f64,
}

impl StartDistribution {
    pub fn task_only(task: Arc<TaskSpec>) -> Self {
        Self { task, extra: Arc::new(Vec::new()), p_extra: 0.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WorldState> {
        if !self.extra.is_empty() && self.p_extra > 0.0 && rng.random_bool(self.p_extra.min(1.0)) {
            let mut s = self.extra[rng.random_range(0..self.extra.len())].clone();
            s.step_count = 0;
            return Ok(s);
        }
        init_task_shared(self.task.clone(), rng.random())
    }
}

/// Summary of one finished training episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStat {
    pub returns: Vec<f64>,
    pub winner: Option<usize>,
    pub steps: usize,
}

/// One environment instance with its running episode.
#[derive(Debug, Clone)]
pub struct TrainEnv {
    pub state: WorldState,
    start: StartDistribution,
    rng: ChaCha8Rng,
    returns: Vec<f64>,
    steps: usize,
}

impl TrainEnv {
    pub fn new(start: StartDistribution, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = start.sample(&mut rng)?;
        let teams = start.task.n_teams();
        Ok(Self { state, start, rng, returns: vec![0.0; teams], steps: 0 })
    }

    fn reset(&mut self) -> Result<()> {
        self.state = self.start.sample(&mut self.rng)?;
        self.returns.iter_mut().for_each(|r| *r = 0.0);
        self.steps = 0;
        Ok(())
    }
}

/// A contiguous run of steps from one environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    /// Value of the state after the last step.
    pub bootstrap: f64,
}

/// Training data for one team. Agent rows are grouped per step:
/// rows `k*t .. k*(t+1)` belong to step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamBatch {
    pub team: usize,
    pub agents: Vec<usize>,
    pub obs_len: usize,
    pub joint_len: usize,
    pub obs: Vec<f64>,
    pub actions: Vec<Action>,
    pub logp: Vec<f64>,
    pub masks: Vec<ActionMask>,
    pub joint: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub segments: Vec<Segment>,
}

impl TeamBatch {
    fn new(team: usize, agents: Vec<usize>, obs_len: usize, joint_len: usize) -> Self {
        Self {
            team,
            agents,
            obs_len,
            joint_len,
            obs: Vec::new(),
            actions: Vec::new(),
            logp: Vec::new(),
            masks: Vec::new(),
            joint: Vec::new(),
            values: Vec::new(),
            rewards: Vec::new(),
            dones: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    pub fn agents_per_step(&self) -> usize {
        self.agents.len()
    }

    pub fn append(&mut self, other: TeamBatch) {
        let offset = self.steps();
        self.obs.extend(other.obs);
        self.actions.extend(other.actions);
        self.logp.extend(other.logp);
        self.masks.extend(other.masks);
        self.joint.extend(other.joint);
        self.values.extend(other.values);
        self.rewards.extend(other.rewards);
        self.dones.extend(other.dones);
        self.segments
            .extend(other.segments.into_iter().map(|s| Segment { start: s.start + offset, ..s }));
    }
}

/// Output of one collection round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RolloutBatch {
    /// Indexed by team; `None` for teams that are not being trained.
    pub teams: Vec<Option<TeamBatch>>,
    pub episodes: Vec<EpisodeStat>,
    pub env_steps: usize,
}

impl RolloutBatch {
    pub fn append(&mut self, other: RolloutBatch) {
        if self.teams.is_empty() {
            *self = other;
            return;
        }
        for (mine, theirs) in self.teams.iter_mut().zip(other.teams) {
            match (mine.as_mut(), theirs) {
                (Some(m), Some(t)) => m.append(t),
                (None, t) => *mine = t,
                (Some(_), None) => {}
            }
        }
        self.episodes.extend(other.episodes);
        self.env_steps += other.env_steps;
    }
}

struct EnvTrace {
    teams: Vec<Option<TeamBatch>>,
}

fn forward_rows(params: &PolicyParams, rows: &[f64], width: usize, critic: bool) -> Result<Array2<f64>> {
    let x = Array2::from_shape_vec((rows.len() / width, width), rows.to_vec())
        .map_err(|e| Error::contract(e.to_string()))?;
    if critic {
        params.critic.forward(x.view())
    } else {
        params.actor.forward(x.view())
    }
}

/// Steps every environment `steps` times. Teams flagged in `trained` sample
/// from their policy and are recorded; the others act from their (frozen)
/// parameters, greedily when `cfg.greedy_opponents`.
pub fn collect_rollouts<R: Rng + ?Sized>(
    envs: &mut [TrainEnv],
    params: &[PolicyParams],
    trained: &[bool],
    steps: usize,
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<RolloutBatch> {
    let Some(first) = envs.first() else {
        return Ok(RolloutBatch::default());
    };
    let task = first.state.task.clone();
    let n_teams = task.n_teams();
    if params.len() != n_teams || trained.len() != n_teams {
        return Err(Error::contract(format!("{} parameter sets for {n_teams} teams", params.len())));
    }
    let obs_len = observation_len(&task);
    let n_robots = task.robots.len();
    let team_agents: Vec<Vec<usize>> = (0..n_teams)
        .map(|t| (0..n_robots).filter(|r| task.robots[*r].team == t).collect())
        .collect();

    let mut traces: Vec<EnvTrace> = envs
        .iter()
        .map(|_| EnvTrace {
            teams: (0..n_teams)
                .map(|t| trained[t].then(|| TeamBatch::new(t, team_agents[t].clone(), obs_len, obs_len)))
                .collect(),
        })
        .collect();
    let mut episodes = Vec::new();
    let mut buf = Vec::with_capacity(obs_len);
    let n_env = envs.len();

    for _ in 0..steps {
        let masks: Vec<Vec<ActionMask>> = envs
            .iter()
            .enumerate()
            .map(|(e, env)| {
                (0..n_robots)
                    .map(|a| action_mask(&env.state, a, cfg.guidance))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|err| Error::in_phase(format!("env {e}"), err))
            })
            .collect::<Result<_>>()?;
        let mut joint_rows = Vec::with_capacity(n_env * obs_len);
        for env in envs.iter() {
            observe_joint_into(&env.state, &mut buf);
            joint_rows.extend_from_slice(&buf);
        }
        let mut chosen = vec![vec![Action::Stop; n_robots]; n_env];

        for t in 0..n_teams {
            let agents = &team_agents[t];
            if agents.is_empty() {
                continue;
            }
            let mut rows = Vec::with_capacity(n_env * agents.len() * obs_len);
            for env in envs.iter() {
                for &a in agents {
                    observe_into(&env.state, a, &mut buf);
                    rows.extend_from_slice(&buf);
                }
            }
            let logits = forward_rows(&params[t], &rows, obs_len, false)?;
            let values = if trained[t] {
                Some(forward_rows(&params[t], &joint_rows, obs_len, true)?)
            } else {
                None
            };
            for e in 0..n_env {
                for (k, &a) in agents.iter().enumerate() {
                    let row = e * agents.len() + k;
                    let dist = MaskedDistribution::new(logits.row(row).as_slice().expect("contiguous"), &masks[e][a])?;
                    let action = if trained[t] || !cfg.greedy_opponents { dist.sample(rng) } else { dist.greedy() };
                    chosen[e][a] = action;
                    if let Some(tb) = traces[e].teams[t].as_mut() {
                        tb.obs.extend_from_slice(&rows[row * obs_len..(row + 1) * obs_len]);
                        tb.actions.push(action);
                        tb.logp.push(dist.log_prob(action));
                        tb.masks.push(masks[e][a]);
                    }
                }
                if let (Some(tb), Some(v)) = (traces[e].teams[t].as_mut(), values.as_ref()) {
                    tb.joint.extend_from_slice(&joint_rows[e * obs_len..(e + 1) * obs_len]);
                    tb.values.push(v[[e, 0]]);
                }
            }
        }

        for (e, env) in envs.iter_mut().enumerate() {
            let executed: Vec<Action> = chosen[e].iter().map(|a| dr_wrap(*a, cfg.dr_p_stop, rng)).collect();
            let out = step_sync(&env.state, &executed, cfg.guidance).map_err(|err| Error::in_phase(format!("env {e}"), err))?;
            env.steps += 1;
            for (r, x) in env.returns.iter_mut().zip(&out.rewards) {
                *r += x;
            }
            for tb in traces[e].teams.iter_mut().flatten() {
                tb.rewards.push(out.rewards[tb.team]);
                tb.dones.push(out.done);
            }
            if out.done {
                episodes.push(EpisodeStat {
                    returns: env.returns.clone(),
                    winner: winner(&out.state),
                    steps: env.steps,
                });
                env.reset()?;
            } else {
                env.state = out.state;
            }
        }
    }

    // bootstrap values for the state each environment is left in
    let mut joint_rows = Vec::with_capacity(n_env * obs_len);
    for env in envs.iter() {
        observe_joint_into(&env.state, &mut buf);
        joint_rows.extend_from_slice(&buf);
    }
    let mut teams: Vec<Option<TeamBatch>> = (0..n_teams)
        .map(|t| trained[t].then(|| TeamBatch::new(t, team_agents[t].clone(), obs_len, obs_len)))
        .collect();
    for t in (0..n_teams).filter(|t| trained[*t]) {
        let boot = forward_rows(&params[t], &joint_rows, obs_len, true)?;
        for (e, trace) in traces.iter_mut().enumerate() {
            let mut tb = trace.teams[t].take().expect("trained team traced");
            tb.segments.push(Segment { start: 0, len: tb.steps(), bootstrap: boot[[e, 0]] });
            teams[t].as_mut().expect("trained team batch").append(tb);
        }
    }
    Ok(RolloutBatch { teams, episodes, env_steps: steps * n_env })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dr_degenerate_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for a in Action::ALL {
            assert_eq!(dr_wrap(a, 0.0, &mut rng), a);
            assert_eq!(dr_wrap(a, 1.0, &mut rng), Action::Stop);
        }
    }

    #[test]
    fn dr_frequency_within_three_standard_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let hits = (0..n).filter(|_| dr_wrap(Action::Lift, 0.3, &mut rng) == Action::Stop).count();
        let se = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.3).abs() < 3.0 * se);
    }
}
