use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// PPO, network and collection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub lr: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_eps: f64,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub epochs: usize,
    /// Environment steps per minibatch.
    pub minibatch: usize,
    pub max_grad_norm: f64,
    pub hidden: usize,
    pub layers: usize,
    /// Rollout workers (threads).
    pub workers: usize,
    /// Environments owned by each worker.
    pub envs_per_worker: usize,
    /// Steps per environment per iteration.
    pub rollout_len: usize,
    /// Set from an experiment's method section, not read from `[ppo]`.
    #[serde(skip)]
    pub guidance: bool,
    /// Probability of replacing an executed action with `Stop`; 0 disables.
    /// Set from an experiment's method section, not read from `[ppo]`.
    #[serde(skip)]
    pub dr_p_stop: f64,
    /// Frozen opponents act greedily instead of sampling.
    pub greedy_opponents: bool,
    pub selfplay_threshold: f64,
    pub selfplay_window: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            lr: 0.00001,
            gamma: 0.95,
            gae_lambda: 0.95,
            clip_eps: 0.2,
            ent_coef: 0.01,
            vf_coef: 0.5,
            epochs: 4,
            minibatch: 4096,
            max_grad_norm: 0.5,
            hidden: 256,
            layers: 4,
            workers: 1,
            envs_per_worker: 8,
            rollout_len: 512,
            guidance: true,
            dr_p_stop: 0.0,
            greedy_opponents: true,
            selfplay_threshold: 0.55,
            selfplay_window: 100,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let checks = [
            (self.lr > 0.0 && self.lr.is_finite(), "lr must be positive"),
            (unit(self.gamma) && unit(self.gae_lambda), "gamma and gae_lambda must lie in [0, 1]"),
            (self.clip_eps >= 0.0, "clip_eps must be non-negative"),
            (self.ent_coef >= 0.0 && self.vf_coef >= 0.0, "loss coefficients must be non-negative"),
            (self.epochs > 0 && self.minibatch > 0, "epochs and minibatch must be positive"),
            (self.max_grad_norm > 0.0, "max_grad_norm must be positive"),
            (self.hidden > 0 && self.layers > 0, "network needs at least one hidden layer"),
            (self.workers > 0 && self.envs_per_worker > 0, "need at least one worker and environment"),
            (unit(self.dr_p_stop), "dr_p_stop must lie in [0, 1]"),
            (unit(self.selfplay_threshold) && self.selfplay_window > 0, "bad self-play settings"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::config(*msg)),
            None => Ok(()),
        }
    }

    pub fn steps_per_iteration(&self) -> usize {
        self.workers * self.envs_per_worker * self.rollout_len
    }
}
