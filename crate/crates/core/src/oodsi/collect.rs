use crate::arena::{init_task_shared, run_sync_episode, TaskSpec, Trajectory};
use crate::deploy::{run_async_episode, AsyncConfig, DurationModel, VisitSet};
use crate::error::Result;
use crate::eval::check_params;
use crate::nn::PolicyParams;
use crate::train::TeamPolicy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// How deployment rollouts are gathered.
#[derive(Debug, Clone)]
pub struct CollectSettings {
    pub episodes: usize,
    pub model: DurationModel,
    pub guidance: bool,
    /// Act greedily instead of sampling from the policy.
    pub greedy: bool,
    pub seed: u64,
}

fn policy(params: &Arc<Vec<PolicyParams>>, greedy: bool, seed: u64) -> TeamPolicy {
    if greedy {
        TeamPolicy::greedy(params.clone())
    } else {
        TeamPolicy::sampling(params.clone(), seed)
    }
}

/// Runs `episodes` asynchronous episodes of the trained teams.
pub fn collect_ood_trajectories(
    params: Arc<Vec<PolicyParams>>,
    task: Arc<TaskSpec>,
    s: &CollectSettings,
) -> Result<Vec<Trajectory>> {
    check_params(&params, &task)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(s.seed);
    (0..s.episodes)
        .map(|ep| {
            let (init, act, dur): (u64, u64, u64) = (seeds.random(), seeds.random(), seeds.random());
            let start = init_task_shared(task.clone(), init)?;
            let cfg = AsyncConfig { model: s.model.clone(), guidance: s.guidance, seed: dur };
            run_async_episode(&mut policy(&params, s.greedy, act), start, &cfg, ep)
        })
        .collect()
}

/// States visited by the same teams acting in the synchronous arena.
pub fn sync_visits(params: Arc<Vec<PolicyParams>>, task: Arc<TaskSpec>, s: &CollectSettings) -> Result<VisitSet> {
    check_params(&params, &task)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(s.seed ^ 0x5EED_5EED);
    let mut visits = VisitSet::new();
    for ep in 0..s.episodes {
        let (init, act): (u64, u64) = (seeds.random(), seeds.random());
        let start = init_task_shared(task.clone(), init)?;
        let traj = run_sync_episode(&mut policy(&params, s.greedy, act), start, s.guidance, ep)?;
        visits.extend_from(&traj);
    }
    Ok(visits)
}
