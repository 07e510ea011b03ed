//! Training run directory:
//!
//! ```text
//! <dir>/config.toml                   configuration snapshot
//! <dir>/metrics.tsv                   one row per iteration
//! <dir>/checkpoints/iter-NNNNNN.ckpt  periodic team checkpoints
//! <dir>/league/team<T>-v<V>.ckpt      snapshot of a team when it is paused
//! <dir>/final.ckpt                    parameters at the end of training
//! ```

use super::trainer::{IterationStats, Trainer};
use crate::error::Result;
use crate::nn::{save_params, save_team_params};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const METRICS_HEADER: &str =
    "iteration\tenv_steps\tepisodes\tmean_reward\tnormalized_reward\tsuccess_rate\tclip_fraction\tentropy\tvalue_loss\tactive_team";

pub fn metrics_row(s: &IterationStats) -> String {
    format!(
        "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}",
        s.iteration,
        s.env_steps,
        s.episodes,
        s.mean_return,
        s.normalized_reward,
        s.success_rate,
        s.update.clip_fraction,
        s.update.entropy,
        s.update.value_loss,
        s.active_team
    )
}

pub struct RunDir {
    root: PathBuf,
    metrics: BufWriter<File>,
    /// Iterations between periodic checkpoints; 0 disables them.
    checkpoint_every: u64,
    switches_seen: usize,
}

impl RunDir {
    pub fn create(root: impl AsRef<Path>, config_snapshot: &str, checkpoint_every: u64) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        std::fs::create_dir_all(root.join("checkpoints"))?;
        std::fs::create_dir_all(root.join("league"))?;
        std::fs::write(root.join("config.toml"), config_snapshot)?;
        let mut metrics = BufWriter::new(File::create(root.join("metrics.tsv"))?);
        writeln!(metrics, "{METRICS_HEADER}")?;
        Ok(Self { root, metrics, checkpoint_every, switches_seen: 0 })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn final_checkpoint(&self) -> PathBuf {
        self.root.join("final.ckpt")
    }

    /// Logs one iteration and writes whatever checkpoints it calls for.
    pub fn record(&mut self, trainer: &Trainer, stats: &IterationStats) -> Result<()> {
        writeln!(self.metrics, "{}", metrics_row(stats))?;
        if self.checkpoint_every > 0 && stats.iteration.is_multiple_of(self.checkpoint_every) {
            let path = self.root.join("checkpoints").join(format!("iter-{:06}.ckpt", stats.iteration));
            save_team_params(path, &trainer.params)?;
        }
        if let Some(league) = &trainer.league {
            if league.switches > self.switches_seen {
                self.switches_seen = league.switches;
                for (team, frozen) in league.frozen.iter().enumerate() {
                    if let Some(p) = frozen {
                        let path = self.root.join("league").join(format!("team{team}-v{}.ckpt", p.version));
                        if !path.exists() {
                            save_params(path, p)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn finish(mut self, trainer: &Trainer) -> Result<PathBuf> {
        self.metrics.flush()?;
        let path = self.final_checkpoint();
        save_team_params(&path, &trainer.params)?;
        Ok(path)
    }
}
