//! Greedy evaluation of trained teams in the synchronous arena or the
//! asynchronous simulator.

use crate::arena::{init_task_shared, observation_len, run_sync_episode, TaskSpec, Trajectory};
use crate::deploy::{run_async_episode, AsyncConfig, DurationModel};
use crate::error::{Error, Result};
use crate::nn::PolicyParams;
use crate::train::TeamPolicy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Sync,
    Async,
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvKind::Sync => "sync",
            EnvKind::Async => "async",
        })
    }
}

impl FromStr for EnvKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sync" => Ok(EnvKind::Sync),
            "async" => Ok(EnvKind::Async),
            other => Err(Error::config(format!("unknown environment `{other}`; expected sync or async"))),
        }
    }
}

/// Where and how episodes are run.
#[derive(Debug, Clone)]
pub struct EvalSettings {
    pub env: EnvKind,
    pub model: DurationModel,
    pub guidance: bool,
    pub episodes: usize,
    pub seed: u64,
}

/// Outcome counts of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub env: EnvKind,
    pub episodes: usize,
    /// Episodes won by each team.
    pub wins: Vec<usize>,
    /// Mean return of team 0.
    pub mean_reward: f64,
}

impl EvalSummary {
    /// Fraction of episodes some team completed: the summed team win rates.
    pub fn success_rate(&self) -> f64 {
        if self.episodes == 0 {
            0.0
        } else {
            self.wins.iter().sum::<usize>() as f64 / self.episodes as f64
        }
    }

    pub fn successes(&self) -> usize {
        self.wins.iter().sum()
    }
}

/// Fails unless `params` has one network per team that reads this task's
/// observations.
pub fn check_params(params: &[PolicyParams], task: &TaskSpec) -> Result<()> {
    let len = observation_len(task);
    if params.len() != task.n_teams() {
        return Err(Error::Checkpoint(format!(
            "{} networks for a task with {} teams",
            params.len(),
            task.n_teams()
        )));
    }
    for p in params {
        let shape = p.shape();
        if shape.obs_len != len || shape.joint_len != len {
            return Err(Error::Checkpoint(format!(
                "network reads {} inputs, task `{}` produces {len}",
                shape.obs_len, task.name
            )));
        }
    }
    Ok(())
}

/// Runs `episodes` greedy episodes, returning each trajectory. Episode `i`
/// starts from the same state in either environment for a given seed.
pub fn run_episodes(params: Arc<Vec<PolicyParams>>, task: Arc<TaskSpec>, s: &EvalSettings) -> Result<Vec<Trajectory>> {
    check_params(&params, &task)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(s.seed);
    let mut out = Vec::with_capacity(s.episodes);
    for ep in 0..s.episodes {
        let (init_seed, dur_seed): (u64, u64) = (seeds.random(), seeds.random());
        let start = init_task_shared(task.clone(), init_seed)?;
        let mut policy = TeamPolicy::greedy(params.clone());
        let traj = match s.env {
            EnvKind::Sync => run_sync_episode(&mut policy, start, s.guidance, ep)?,
            EnvKind::Async => {
                let cfg = AsyncConfig { model: s.model.clone(), guidance: s.guidance, seed: dur_seed };
                run_async_episode(&mut policy, start, &cfg, ep)?
            }
        };
        out.push(traj);
    }
    Ok(out)
}

pub fn summarize(env: EnvKind, n_teams: usize, trajs: &[Trajectory]) -> EvalSummary {
    let mut wins = vec![0; n_teams];
    for t in trajs {
        if let Some(w) = t.outcome.winner {
            wins[w] += 1;
        }
    }
    let mean_reward = if trajs.is_empty() {
        0.0
    } else {
        trajs.iter().map(|t| t.outcome.returns[0]).sum::<f64>() / trajs.len() as f64
    };
    EvalSummary { env, episodes: trajs.len(), wins, mean_reward }
}

pub fn evaluate(params: Arc<Vec<PolicyParams>>, task: Arc<TaskSpec>, s: &EvalSettings) -> Result<EvalSummary> {
    let n_teams = task.n_teams();
    let trajs = run_episodes(params, task, s)?;
    Ok(summarize(s.env, n_teams, &trajs))
}
