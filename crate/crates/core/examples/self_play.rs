//! Two teams compete for the same structure. The pause league trains one
//! team at a time and hands over once the active team's win rate passes the
//! threshold; each handover freezes a copy of the leader.

use craft_arena::arena::TaskSpec;
use craft_arena::train::{PpoConfig, StartDistribution, Trainer};
use std::sync::Arc;

fn main() -> craft_arena::Result<()> {
    let budget: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let task = Arc::new(TaskSpec::preset("two-floor-competition")?);
    let cfg = PpoConfig {
        lr: 5e-4,
        hidden: 64,
        layers: 3,
        envs_per_worker: 8,
        rollout_len: 128,
        minibatch: 256,
        selfplay_window: 50,
        ..PpoConfig::default()
    };
    let mut trainer = Trainer::new(cfg, StartDistribution::task_only(task), 0)?;
    let mut active = None;
    trainer.train_until(budget, |t, s| {
        if active != Some(s.active_team) {
            println!("iteration {:4}: team {} now training (flags {:?})", s.iteration, s.active_team, t.trained_flags());
            active = Some(s.active_team);
        }
        if s.iteration % 20 == 0 {
            println!(
                "iteration {:4}  steps {:7}  decided {:5.1}%  team-0 return {:6.2}",
                s.iteration,
                s.env_steps,
                100.0 * s.success_rate,
                s.mean_return
            );
        }
        Ok(())
    })?;
    Ok(())
}
