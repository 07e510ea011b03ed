//! PPO with a centralized critic, parallel rollout workers, GAE, the
//! stop-injection action wrapper and the two-team pause league.

mod config;
mod gae;
mod league;
mod policy;
mod ppo;
mod rollout;
mod rundir;
mod trainer;

pub use config::PpoConfig;
pub use gae::{gae, normalize, AdvantageSet};
pub use league::{selfplay_step, LeagueState};
pub use policy::TeamPolicy;
pub use ppo::{compute_gae, ppo_loss, ppo_update, LossCoefs, LossParts, Minibatch, UpdateStats};
pub use rollout::{
    collect_rollouts, dr_wrap, EpisodeStat, RolloutBatch, Segment, StartDistribution, TeamBatch, TrainEnv,
};
pub use rundir::{metrics_row, RunDir, METRICS_HEADER};
pub use trainer::{net_shape, IterationStats, Trainer};
