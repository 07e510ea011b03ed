//! Actor-learner training loop.
//!
//! Rollout workers run on their own threads and own their environments.
//! Each iteration the learner publishes an immutable parameter snapshot,
//! every worker collects a batch against it and sends it back over a bounded
//! channel, and the learner merges the batches in worker order before
//! updating. Merging by worker index keeps results independent of thread
//! scheduling.

use super::config::PpoConfig;
use super::league::{selfplay_step, LeagueState};
use super::ppo::{compute_gae, ppo_update, UpdateStats};
use super::rollout::{collect_rollouts, EpisodeStat, RolloutBatch, StartDistribution, TrainEnv};
use crate::arena::{observation_len, TaskMode, TaskSpec};
use crate::error::{Error, Result};
use crate::nn::{NetShape, OptState, PolicyParams};
use crossbeam_channel::{bounded, Receiver, Sender};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::thread::JoinHandle;

struct Job {
    params: Arc<Vec<PolicyParams>>,
    trained: Vec<bool>,
}

struct WorkerPool {
    jobs: Vec<Sender<Job>>,
    results: Receiver<(usize, Result<RolloutBatch>)>,
    handles: Vec<JoinHandle<()>>,
}

impl WorkerPool {
    fn spawn(cfg: &PpoConfig, start: &StartDistribution, seed: u64) -> Result<Self> {
        let (result_tx, results) = bounded(cfg.workers);
        let mut jobs = Vec::with_capacity(cfg.workers);
        let mut handles = Vec::with_capacity(cfg.workers);
        let mut seeder = ChaCha8Rng::seed_from_u64(seed);
        for w in 0..cfg.workers {
            let envs = (0..cfg.envs_per_worker)
                .map(|_| TrainEnv::new(start.clone(), seeder.random()))
                .collect::<Result<Vec<_>>>()?;
            let rng = ChaCha8Rng::seed_from_u64(seeder.random());
            let (tx, rx) = bounded::<Job>(1);
            let out: Sender<(usize, Result<RolloutBatch>)> = result_tx.clone();
            let cfg = cfg.clone();
            let handle = std::thread::Builder::new()
                .name(format!("rollout-{w}"))
                .spawn(move || worker_loop(w, envs, rng, cfg, rx, out))?;
            jobs.push(tx);
            handles.push(handle);
        }
        Ok(Self { jobs, results, handles })
    }

    fn collect(&self, params: Arc<Vec<PolicyParams>>, trained: &[bool]) -> Result<RolloutBatch> {
        for tx in &self.jobs {
            tx.send(Job { params: params.clone(), trained: trained.to_vec() })
                .map_err(|_| Error::contract("rollout worker stopped"))?;
        }
        let mut parts: Vec<Option<Result<RolloutBatch>>> = (0..self.jobs.len()).map(|_| None).collect();
        for _ in 0..self.jobs.len() {
            let (w, batch) = self.results.recv().map_err(|_| Error::contract("rollout worker stopped"))?;
            parts[w] = Some(batch);
        }
        let mut merged = RolloutBatch::default();
        for (w, part) in parts.into_iter().enumerate() {
            let batch = part.expect("every worker replied").map_err(|e| Error::in_phase(format!("worker {w}"), e))?;
            merged.append(batch);
        }
        Ok(merged)
    }
}

impl Drop for WorkerPool {
    fn drop(&mut self) {
        self.jobs.clear();
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}

fn worker_loop(
    id: usize,
    mut envs: Vec<TrainEnv>,
    mut rng: ChaCha8Rng,
    cfg: PpoConfig,
    jobs: Receiver<Job>,
    out: Sender<(usize, Result<RolloutBatch>)>,
) {
    while let Ok(job) = jobs.recv() {
        let batch = collect_rollouts(&mut envs, &job.params, &job.trained, cfg.rollout_len, &cfg, &mut rng);
        if out.send((id, batch)).is_err() {
            break;
        }
    }
}

/// Per-iteration training summary.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: u64,
    /// Environment steps so far.
    pub env_steps: u64,
    pub episodes: usize,
    /// Mean episode return of the first team, over episodes finished this
    /// iteration.
    pub mean_return: f64,
    /// `mean_return` divided by the task's maximum return.
    pub normalized_reward: f64,
    /// Fraction of finished episodes with a winner (summed over teams).
    pub success_rate: f64,
    pub active_team: usize,
    pub update: UpdateStats,
}

pub fn net_shape(task: &TaskSpec, cfg: &PpoConfig) -> NetShape {
    let len = observation_len(task);
    NetShape { obs_len: len, joint_len: len, hidden: cfg.hidden, layers: cfg.layers }
}

/// PPO learner plus its rollout workers.
pub struct Trainer {
    pub cfg: PpoConfig,
    pub task: Arc<TaskSpec>,
    pub params: Vec<PolicyParams>,
    pub opts: Vec<OptState>,
    pub league: Option<LeagueState>,
    pub iteration: u64,
    pub env_steps: u64,
    rng: ChaCha8Rng,
    pool: WorkerPool,
}

impl Trainer {
    /// Fresh networks for every team.
    pub fn new(cfg: PpoConfig, start: StartDistribution, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = net_shape(&start.task, &cfg);
        let params = (0..start.task.n_teams()).map(|_| PolicyParams::new(shape, &mut rng)).collect();
        Self::build(cfg, start, params, rng)
    }

    /// Continues from existing parameters with fresh optimiser state.
    pub fn resume(cfg: PpoConfig, start: StartDistribution, params: Vec<PolicyParams>, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let shape = net_shape(&start.task, &cfg);
        if params.len() != start.task.n_teams() || params.iter().any(|p| p.shape() != shape) {
            return Err(Error::contract("parameters do not fit the task and network settings"));
        }
        Self::build(cfg, start, params, ChaCha8Rng::seed_from_u64(seed))
    }

    fn build(cfg: PpoConfig, start: StartDistribution, params: Vec<PolicyParams>, mut rng: ChaCha8Rng) -> Result<Self> {
        let task = start.task.clone();
        let opts = params.iter().map(|p| OptState::new(p, cfg.lr)).collect();
        let league = (task.mode == TaskMode::Competitive)
            .then(|| LeagueState::new(task.n_teams(), cfg.selfplay_threshold, cfg.selfplay_window));
        let pool = WorkerPool::spawn(&cfg, &start, rng.random())?;
        Ok(Self { cfg, task, params, opts, league, iteration: 0, env_steps: 0, rng, pool })
    }

    pub fn trained_flags(&self) -> Vec<bool> {
        match &self.league {
            Some(l) => l.training_flags(),
            None => vec![true; self.params.len()],
        }
    }

    /// One collection round against the current parameters, without an
    /// update. Advances the workers' environments.
    pub fn collect(&self) -> Result<RolloutBatch> {
        self.pool.collect(Arc::new(self.params.clone()), &self.trained_flags())
    }

    /// Collects one batch, runs a PPO update for every training team and
    /// advances the league.
    pub fn iterate(&mut self) -> Result<IterationStats> {
        let trained = self.trained_flags();
        let snapshot = Arc::new(self.params.clone());
        let batch = self.pool.collect(snapshot, &trained)?;
        let mut update = UpdateStats::default();
        for tb in batch.teams.iter().flatten() {
            let adv = compute_gae(tb, self.cfg.gamma, self.cfg.gae_lambda);
            let t = tb.team;
            update = ppo_update(tb, &adv, &mut self.params[t], &mut self.opts[t], &self.cfg, &mut self.rng)
                .map_err(|e| Error::in_phase(format!("team {t} update"), e))?;
        }
        self.iteration += 1;
        self.env_steps += batch.env_steps as u64;
        if let Some(league) = self.league.take() {
            let mut league = league;
            for ep in &batch.episodes {
                league.record(ep);
            }
            let active = league.active;
            self.league = Some(selfplay_step(league, &self.params[active]));
        }
        Ok(self.summarize(&batch.episodes, update))
    }

    /// Iterates until `budget` environment steps have been collected, calling
    /// `on_iter` after every iteration.
    pub fn train_until<F>(&mut self, budget: u64, mut on_iter: F) -> Result<()>
    where
        F: FnMut(&Trainer, &IterationStats) -> Result<()>,
    {
        while self.env_steps < budget {
            let stats = self.iterate()?;
            on_iter(self, &stats)?;
        }
        Ok(())
    }

    fn summarize(&self, episodes: &[EpisodeStat], update: UpdateStats) -> IterationStats {
        let n = episodes.len();
        let mean_return = if n == 0 {
            0.0
        } else {
            episodes.iter().map(|e| e.returns[0]).sum::<f64>() / n as f64
        };
        let success_rate = if n == 0 {
            0.0
        } else {
            episodes.iter().filter(|e| e.winner.is_some()).count() as f64 / n as f64
        };
        IterationStats {
            iteration: self.iteration,
            env_steps: self.env_steps,
            episodes: n,
            mean_return,
            normalized_reward: mean_return / self.task.max_return(0),
            success_rate,
            active_team: self.league.as_ref().map_or(0, |l| l.active),
            update,
        }
    }
}
