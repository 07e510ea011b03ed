//! Trains PPO, PPO+DR, PPO+OODSI and PPO+DR+OODSI on every seed of an
//! experiment config and prints the success table.
//!
//! ```text
//! cargo run --release --example method_ablation -- configs/desk.toml
//! ```

use craft_arena::eval::EnvKind;
use craft_arena::harness::{make_report, run_ablation, ExperimentConfig, Method};
use std::time::Instant;

fn main() -> craft_arena::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/desk.toml".into());
    let cfg = ExperimentConfig::load(&path)?;
    let started = Instant::now();
    let result = run_ablation(&cfg, &Method::ALL)?;

    for (method, seeds) in &result.methods {
        for s in seeds {
            println!(
                "{:<13} seed {}  phase1 sync {:5.1}% async {:5.1}%  final sync {:5.1}% async {:5.1}%  ood {}",
                method.label(),
                s.seed,
                100.0 * s.phase1_eval(EnvKind::Sync).success_rate(),
                100.0 * s.phase1_eval(EnvKind::Async).success_rate(),
                100.0 * s.final_eval(EnvKind::Sync).success_rate(),
                100.0 * s.final_eval(EnvKind::Async).success_rate(),
                s.ood_fraction.map_or("-".into(), |f| format!("{f:.3}")),
            );
        }
    }
    let (text, _) = make_report(&result.table(cfg.eval_episodes))?;
    println!("\n{text}");
    println!("elapsed {:.0} s", started.elapsed().as_secs_f64());
    Ok(())
}
