//! Drivers for the method comparison and the guidance ablation.

use super::config::{ExperimentConfig, Method};
use super::report::ResultRow;
use crate::error::{Error, Result};
use crate::eval::{EnvKind, EvalSummary};
use crate::oodsi::{oodsi_pipeline_from, train_phase, PhaseReport};
use crate::train::{IterationStats, StartDistribution};
use std::collections::BTreeMap;

/// One method trained and evaluated with one seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub report: Vec<PhaseReport>,
    pub ood_fraction: Option<f64>,
    pub harvested: usize,
}

impl SeedOutcome {
    fn find(&self, phase: &str, env: EnvKind) -> &EvalSummary {
        &self
            .report
            .iter()
            .find(|r| r.phase == phase && r.summary.env == env)
            .expect("pipeline reports both phases in both environments")
            .summary
    }

    /// Teams at the end of training.
    pub fn final_eval(&self, env: EnvKind) -> &EvalSummary {
        self.find("retrained", env)
    }

    /// Teams after the first phase.
    pub fn phase1_eval(&self, env: EnvKind) -> &EvalSummary {
        self.find("phase1", env)
    }
}

#[derive(Debug, Clone)]
pub struct AblationResult {
    pub task: String,
    pub methods: BTreeMap<Method, Vec<SeedOutcome>>,
}

impl AblationResult {
    /// Per-seed final success rates.
    pub fn rates(&self, method: Method, env: EnvKind) -> Vec<f64> {
        self.methods[&method].iter().map(|s| s.final_eval(env).success_rate()).collect()
    }

    /// Final successes and episodes pooled over seeds.
    pub fn pooled(&self, method: Method, env: EnvKind) -> (usize, usize) {
        self.methods[&method].iter().fold((0, 0), |(k, n), s| {
            let e = s.final_eval(env);
            (k + e.successes(), n + e.episodes)
        })
    }

    pub fn table(&self, episodes: usize) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for &m in self.methods.keys() {
            for env in [EnvKind::Sync, EnvKind::Async] {
                rows.push(ResultRow::from_rates(m.label(), &self.task, env, &self.rates(m, env), episodes));
            }
        }
        rows
    }
}

/// Trains and evaluates each method for every seed in `cfg`. Every method
/// runs the same two-phase schedule (`train_steps` then `retrain_steps`);
/// only the OODSI methods mix harvested states into the second phase. Methods
/// that share a DR setting share their first phase.
pub fn run_ablation(cfg: &ExperimentConfig, methods: &[Method]) -> Result<AblationResult> {
    let task = cfg.task_spec()?;
    let mut out: BTreeMap<Method, Vec<SeedOutcome>> = BTreeMap::new();
    for &seed in &cfg.seeds {
        for dr in [false, true] {
            let group: Vec<Method> = methods.iter().copied().filter(|m| m.dr() == dr).collect();
            if group.is_empty() {
                continue;
            }
            let mut base = cfg.clone();
            base.method.dr = dr;
            let ppo = base.ppo_config();
            let (phase1, log) = train_phase(
                &ppo,
                StartDistribution::task_only(task.clone()),
                None,
                cfg.train_steps,
                seed,
                None,
            )
            .map_err(|e| Error::in_phase(format!("seed {seed} phase 1"), e))?;
            for m in group {
                let mut c = base.clone();
                c.method.oodsi = m.oodsi();
                let outcome = oodsi_pipeline_from(&c.pipeline(seed), task.clone(), phase1.clone(), log.clone(), None)
                    .map_err(|e| Error::in_phase(format!("seed {seed} {}", m.label()), e))?;
                out.entry(m).or_default().push(SeedOutcome {
                    seed,
                    report: outcome.report,
                    ood_fraction: outcome.ood_fraction,
                    harvested: outcome.start_set.map_or(0, |s| s.states.len()),
                });
            }
        }
    }
    Ok(AblationResult { task: task.name.clone(), methods: out })
}

/// Environment steps after which the episode-weighted normalized reward over
/// the trailing `window` iterations first reaches `level`.
pub fn steps_to_reach(log: &[IterationStats], level: f64, window: usize) -> Option<u64> {
    (0..log.len()).find_map(|i| {
        let recent = &log[i.saturating_sub(window.saturating_sub(1))..=i];
        let episodes: usize = recent.iter().map(|s| s.episodes).sum();
        if episodes == 0 {
            return None;
        }
        let mean = recent.iter().map(|s| s.normalized_reward * s.episodes as f64).sum::<f64>() / episodes as f64;
        (mean >= level).then_some(log[i].env_steps)
    })
}

/// Steps to the reward level with guidance on and off, for one seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskingOutcome {
    pub seed: u64,
    pub guided: Option<u64>,
    pub unguided: Option<u64>,
}

/// Trains each seed for `cfg.train_steps` with and without guidance.
pub fn run_masking_ablation(cfg: &ExperimentConfig, level: f64, window: usize) -> Result<Vec<MaskingOutcome>> {
    let task = cfg.task_spec()?;
    let mut out = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let mut reach = [None, None];
        for (k, guidance) in [true, false].into_iter().enumerate() {
            let mut c = cfg.clone();
            c.method.guidance = guidance;
            let (_, log) = train_phase(
                &c.ppo_config(),
                StartDistribution::task_only(task.clone()),
                None,
                cfg.train_steps,
                seed,
                None,
            )?;
            reach[k] = steps_to_reach(&log, level, window);
        }
        out.push(MaskingOutcome { seed, guided: reach[0], unguided: reach[1] });
    }
    Ok(out)
}

/// Median with `None` (never reached) ordered above every step count.
pub fn censored_median(values: &[Option<u64>]) -> Option<f64> {
    let mut v: Vec<Option<u64>> = values.to_vec();
    v.sort_by_key(|x| x.unwrap_or(u64::MAX));
    let n = v.len();
    if n == 0 {
        return None;
    }
    if n % 2 == 1 {
        v[n / 2].map(|x| x as f64)
    } else {
        match (v[n / 2 - 1], v[n / 2]) {
            (Some(a), Some(b)) => Some((a as f64 + b as f64) / 2.0),
            _ => None,
        }
    }
}
