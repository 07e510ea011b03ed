//! PPO from scratch on the smallest task: one robot fetches one block.
//! Prints the metrics log as it goes and a greedy evaluation at the end.
//!
//! ```text
//! cargo run --release --example train_fetch -- 60000
//! ```

use craft_arena::arena::TaskSpec;
use craft_arena::eval::{evaluate, EnvKind, EvalSettings};
use craft_arena::deploy::DurationModel;
use craft_arena::train::{metrics_row, PpoConfig, StartDistribution, Trainer, METRICS_HEADER};
use std::sync::Arc;

fn main() -> craft_arena::Result<()> {
    let budget: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60_000);
    let task = Arc::new(TaskSpec::preset("fetch-block")?);
    let cfg = PpoConfig {
        lr: 1e-3,
        hidden: 64,
        layers: 2,
        envs_per_worker: 8,
        rollout_len: 64,
        minibatch: 128,
        ..PpoConfig::default()
    };
    let mut trainer = Trainer::new(cfg, StartDistribution::task_only(task.clone()), 0)?;
    println!("{METRICS_HEADER}");
    trainer.train_until(budget, |_, s| {
        if s.iteration % 10 == 0 {
            println!("{}", metrics_row(s));
        }
        Ok(())
    })?;

    let params = Arc::new(trainer.params.clone());
    for env in [EnvKind::Sync, EnvKind::Async] {
        let settings = EvalSettings { env, model: DurationModel::default(), guidance: true, episodes: 100, seed: 1 };
        let summary = evaluate(params.clone(), task.clone(), &settings)?;
        println!("{env}: {:.0}% success, mean reward {:.2}", 100.0 * summary.success_rate(), summary.mean_reward);
    }
    Ok(())
}
