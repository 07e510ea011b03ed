//! Train, deploy, harvest, retrain.
//!
//! Output directory, when one is given:
//!
//! ```text
//! phase1/            run directory of the initial synchronous training
//! trajectories.jsonl asynchronous rollouts of the phase-1 teams
//! startset.jsonl     harvested start states with provenance
//! retrain/           run directory of the retraining phase
//! pipeline.tsv       success of phase-1 and retrained teams in both simulators
//! ```

use super::collect::{collect_ood_trajectories, sync_visits, CollectSettings};
use super::startset::{build_start_state_set, StartStateSet};
use crate::arena::{write_trajectory, TaskSpec, Trajectory};
use crate::deploy::{ood_fraction, DurationModel};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EnvKind, EvalSettings, EvalSummary};
use crate::nn::PolicyParams;
use crate::train::{IterationStats, PpoConfig, RunDir, StartDistribution, Trainer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub ppo: PpoConfig,
    pub model: DurationModel,
    pub phase1_steps: u64,
    /// Budget of the retraining phase; 0 skips it.
    pub retrain_steps: u64,
    /// Mix harvested states into the retraining start distribution. When
    /// false the retraining phase continues on the task's own starts, which
    /// gives an equal-budget baseline.
    pub oodsi: bool,
    pub collect_episodes: usize,
    pub n_traj: usize,
    pub n_segments: usize,
    pub p_ood: f64,
    pub harvest_greedy: bool,
    /// Retrain from fresh weights instead of the phase-1 weights.
    pub from_scratch: bool,
    pub eval_episodes: usize,
    pub checkpoint_every: u64,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(ppo: PpoConfig, phase1_steps: u64, retrain_steps: u64, seed: u64) -> Self {
        Self {
            ppo,
            model: DurationModel::default(),
            phase1_steps,
            retrain_steps,
            oodsi: true,
            collect_episodes: 10,
            n_traj: 3,
            n_segments: 5,
            p_ood: 0.5,
            harvest_greedy: false,
            from_scratch: false,
            eval_episodes: 100,
            checkpoint_every: 0,
            seed,
        }
    }

    fn collect_settings(&self) -> CollectSettings {
        CollectSettings {
            episodes: self.collect_episodes,
            model: self.model.clone(),
            guidance: self.ppo.guidance,
            greedy: self.harvest_greedy,
            seed: self.seed.wrapping_add(0x0C011EC7),
        }
    }

    pub fn eval_settings(&self, env: EnvKind) -> EvalSettings {
        EvalSettings {
            env,
            model: self.model.clone(),
            guidance: self.ppo.guidance,
            episodes: self.eval_episodes,
            seed: self.seed.wrapping_add(1_000_000),
        }
    }
}

/// One row of the pipeline report.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub phase: String,
    pub summary: EvalSummary,
}

pub const REPORT_HEADER: &str = "phase\tenvironment\tepisodes\tsuccess_rate\tmean_reward";

pub fn report_tsv(rows: &[PhaseReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\t{:.4}\n",
            r.phase,
            r.summary.env,
            r.summary.episodes,
            r.summary.success_rate(),
            r.summary.mean_reward
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub phase1: Vec<PolicyParams>,
    pub final_params: Vec<PolicyParams>,
    pub phase1_log: Vec<IterationStats>,
    pub retrain_log: Vec<IterationStats>,
    pub trajectories: Vec<Trajectory>,
    pub start_set: Option<StartStateSet>,
    /// Fraction of harvested decision states never visited by the same teams
    /// in the synchronous arena.
    pub ood_fraction: Option<f64>,
    pub report: Vec<PhaseReport>,
}

/// Trains on `start` for `steps` environment steps, from `init` when given.
pub fn train_phase(
    cfg: &PpoConfig,
    start: StartDistribution,
    init: Option<Vec<PolicyParams>>,
    steps: u64,
    seed: u64,
    mut run: Option<RunDir>,
) -> Result<(Vec<PolicyParams>, Vec<IterationStats>)> {
    let mut trainer = match init {
        Some(params) => Trainer::resume(cfg.clone(), start, params, seed)?,
        None => Trainer::new(cfg.clone(), start, seed)?,
    };
    let mut log = Vec::new();
    trainer.train_until(steps, |t, s| {
        log.push(s.clone());
        match run.as_mut() {
            Some(r) => r.record(t, s),
            None => Ok(()),
        }
    })?;
    if let Some(r) = run {
        r.finish(&trainer)?;
    }
    Ok((trainer.params, log))
}

fn phase<T>(label: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::in_phase(label, e))
}

fn snapshot(cfg: &PipelineConfig, phase: &str) -> String {
    format!(
        "# {phase}\nseed = {}\nsteps = {}\nguidance = {}\ndr_p_stop = {}\n\n[ppo]\n{}",
        cfg.seed,
        if phase == "phase1" { cfg.phase1_steps } else { cfg.retrain_steps },
        cfg.ppo.guidance,
        cfg.ppo.dr_p_stop,
        toml::to_string(&cfg.ppo).expect("config serializes")
    )
}

fn run_dir(out: Option<&Path>, cfg: &PipelineConfig, name: &str) -> Result<Option<RunDir>> {
    out.map(|o| RunDir::create(o.join(name), &snapshot(cfg, name), cfg.checkpoint_every)).transpose()
}

/// Runs the whole pipeline.
pub fn oodsi_pipeline(cfg: &PipelineConfig, task: Arc<TaskSpec>, out: Option<&Path>) -> Result<PipelineOutcome> {
    if let Some(o) = out {
        std::fs::create_dir_all(o)?;
    }
    let (phase1, log) = phase(
        "train",
        train_phase(
            &cfg.ppo,
            StartDistribution::task_only(task.clone()),
            None,
            cfg.phase1_steps,
            cfg.seed,
            run_dir(out, cfg, "phase1")?,
        ),
    )?;
    oodsi_pipeline_from(cfg, task, phase1, log, out)
}

/// Runs the pipeline from already trained phase-1 teams.
pub fn oodsi_pipeline_from(
    cfg: &PipelineConfig,
    task: Arc<TaskSpec>,
    phase1: Vec<PolicyParams>,
    phase1_log: Vec<IterationStats>,
    out: Option<&Path>,
) -> Result<PipelineOutcome> {
    if let Some(o) = out {
        std::fs::create_dir_all(o)?;
    }
    let shared = Arc::new(phase1.clone());
    let (mut trajectories, mut start_set, mut ood) = (Vec::new(), None, None);
    let mut start = StartDistribution::task_only(task.clone());
    if cfg.oodsi && cfg.retrain_steps > 0 {
        let settings = cfg.collect_settings();
        trajectories = phase("collect", collect_ood_trajectories(shared.clone(), task.clone(), &settings))?;
        let visits = phase("collect", sync_visits(shared.clone(), task.clone(), &settings))?;
        ood = Some(ood_fraction(&trajectories, &visits));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5A3F));
        let set = phase(
            "harvest",
            build_start_state_set(&trajectories, cfg.n_traj, cfg.n_segments, cfg.p_ood, &mut rng),
        )?;
        if let Some(o) = out {
            let mut f = std::io::BufWriter::new(std::fs::File::create(o.join("trajectories.jsonl"))?);
            for t in &trajectories {
                write_trajectory(&mut f, t)?;
            }
            f.flush()?;
            set.save(o.join("startset.jsonl"))?;
        }
        start = set.start_distribution();
        start_set = Some(set);
    }

    let (final_params, retrain_log) = if cfg.retrain_steps > 0 {
        let init = (!cfg.from_scratch).then(|| phase1.clone());
        phase(
            "retrain",
            train_phase(&cfg.ppo, start, init, cfg.retrain_steps, cfg.seed.wrapping_add(1), run_dir(out, cfg, "retrain")?),
        )?
    } else {
        (phase1.clone(), Vec::new())
    };

    let mut report = Vec::new();
    let finals = Arc::new(final_params.clone());
    for (label, params) in [("phase1", &shared), ("retrained", &finals)] {
        for env in [EnvKind::Sync, EnvKind::Async] {
            let summary = phase("evaluate", evaluate(params.clone(), task.clone(), &cfg.eval_settings(env)))?;
            report.push(PhaseReport { phase: label.into(), summary });
        }
    }
    if let Some(o) = out {
        std::fs::write(o.join("pipeline.tsv"), report_tsv(&report))?;
    }
    Ok(PipelineOutcome {
        phase1,
        final_params,
        phase1_log,
        retrain_log,
        trajectories,
        start_set,
        ood_fraction: ood,
        report,
    })
}
