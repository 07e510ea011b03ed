use crate::arena::TaskSpec;
use crate::deploy::DurationModel;
use crate::error::{Error, Result};
use crate::oodsi::PipelineConfig;
use crate::train::PpoConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Which of the four training recipes an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ppo,
    PpoDr,
    PpoOodsi,
    PpoDrOodsi,
}

impl Method {
    /// Report order.
    pub const ALL: [Method; 4] = [Method::Ppo, Method::PpoDr, Method::PpoOodsi, Method::PpoDrOodsi];

    pub fn new(dr: bool, oodsi: bool) -> Self {
        match (dr, oodsi) {
            (false, false) => Method::Ppo,
            (true, false) => Method::PpoDr,
            (false, true) => Method::PpoOodsi,
            (true, true) => Method::PpoDrOodsi,
        }
    }

    pub fn dr(self) -> bool {
        matches!(self, Method::PpoDr | Method::PpoDrOodsi)
    }

    pub fn oodsi(self) -> bool {
        matches!(self, Method::PpoOodsi | Method::PpoDrOodsi)
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Ppo => "PPO",
            Method::PpoDr => "PPO+DR",
            Method::PpoOodsi => "PPO+OODSI",
            Method::PpoDrOodsi => "PPO+DR+OODSI",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    pub guidance: bool,
    pub dr: bool,
    pub p_stop: f64,
    pub oodsi: bool,
    pub n_traj: usize,
    pub n_segments: usize,
    pub p_ood: f64,
    /// Deployment episodes gathered before harvesting.
    pub collect_episodes: usize,
    pub harvest_greedy: bool,
    pub from_scratch: bool,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            guidance: true,
            dr: false,
            p_stop: 0.3,
            oodsi: false,
            n_traj: 3,
            n_segments: 5,
            p_ood: 0.5,
            collect_episodes: 10,
            harvest_greedy: false,
            from_scratch: false,
        }
    }
}

/// Everything a command needs; loads from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Task preset name; ignored when `task_file` is set.
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_file: Option<PathBuf>,
    /// Overrides the task's episode step limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_episode_steps: Option<usize>,
    pub seeds: Vec<u64>,
    /// Environment steps of the first training phase.
    pub train_steps: u64,
    /// Environment steps of the retraining phase; 0 skips it.
    pub retrain_steps: u64,
    pub eval_episodes: usize,
    /// Iterations between periodic checkpoints; 0 disables them.
    pub checkpoint_every: u64,
    pub out: PathBuf,
    pub method: MethodConfig,
    pub ppo: PpoConfig,
    pub duration: DurationModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: "build-character".into(),
            task_file: None,
            max_episode_steps: None,
            seeds: vec![0, 1, 2],
            train_steps: 3_000_000,
            retrain_steps: 0,
            eval_episodes: 100,
            checkpoint_every: 50,
            out: PathBuf::from("runs/experiment"),
            method: MethodConfig::default(),
            ppo: PpoConfig::default(),
            duration: DurationModel::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds must not be empty"));
        }
        if !(0.0..=1.0).contains(&self.method.p_stop) || !(0.0..=1.0).contains(&self.method.p_ood) {
            return Err(Error::config("p_stop and p_ood must lie in [0, 1]"));
        }
        if self.method.n_traj == 0 || self.method.n_segments == 0 {
            return Err(Error::config("n_traj and n_segments must be positive"));
        }
        self.duration.validate()?;
        self.ppo_config().validate()
    }

    pub fn method_kind(&self) -> Method {
        Method::new(self.method.dr, self.method.oodsi)
    }

    /// Report label; unguided runs are marked.
    pub fn method_label(&self) -> String {
        let base = self.method_kind().label();
        if self.method.guidance {
            base.to_string()
        } else {
            format!("{base} (no guidance)")
        }
    }

    /// The task, with the step limit applied.
    pub fn task_spec(&self) -> Result<Arc<TaskSpec>> {
        let mut spec = match &self.task_file {
            Some(path) => TaskSpec::load(path)?,
            None => TaskSpec::preset(&self.task)?,
        };
        if let Some(h) = self.max_episode_steps {
            if h == 0 {
                return Err(Error::config("max_episode_steps must be positive"));
            }
            spec.horizon = h;
        }
        Ok(Arc::new(spec))
    }

    pub fn ppo_config(&self) -> PpoConfig {
        PpoConfig {
            guidance: self.method.guidance,
            dr_p_stop: if self.method.dr { self.method.p_stop } else { 0.0 },
            ..self.ppo.clone()
        }
    }

    pub fn pipeline(&self, seed: u64) -> PipelineConfig {
        let m = &self.method;
        PipelineConfig {
            ppo: self.ppo_config(),
            model: self.duration.clone(),
            phase1_steps: self.train_steps,
            retrain_steps: self.retrain_steps,
            oodsi: m.oodsi,
            collect_episodes: m.collect_episodes,
            n_traj: m.n_traj,
            n_segments: m.n_segments,
            p_ood: m.p_ood,
            harvest_greedy: m.harvest_greedy,
            from_scratch: m.from_scratch,
            eval_episodes: self.eval_episodes,
            checkpoint_every: self.checkpoint_every,
            seed,
        }
    }

    /// Directory holding everything produced for one seed.
    pub fn seed_dir(&self, out: &Path, seed: u64) -> PathBuf {
        out.join(format!("seed-{seed}"))
    }
}
