//! The full out-of-distribution start-state pipeline for one seed:
//! synchronous training, asynchronous collection, harvesting, retraining on
//! the mixed start distribution, and the before/after report.
//!
//! ```text
//! cargo run --release --example oodsi_pipeline -- configs/desk.toml runs/oodsi-demo
//! ```

use craft_arena::harness::ExperimentConfig;
use craft_arena::oodsi::{oodsi_pipeline, report_tsv};
use std::path::PathBuf;

fn main() -> craft_arena::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = ExperimentConfig::load(args.next().unwrap_or_else(|| "configs/desk.toml".into()))?;
    let out = PathBuf::from(args.next().unwrap_or_else(|| "runs/oodsi-demo".into()));
    let seed = cfg.seeds[0];
    let outcome = oodsi_pipeline(&cfg.pipeline(seed), cfg.task_spec()?, Some(&out))?;

    if let Some(set) = &outcome.start_set {
        println!("harvested {} start states from {} deployment episodes", set.states.len(), outcome.trajectories.len());
        for h in set.states.iter().take(5) {
            println!("  trajectory {} segment {} t={:.2}", h.source_trajectory, h.segment, h.decision_time.unwrap_or(0.0));
        }
    }
    if let Some(f) = outcome.ood_fraction {
        println!("{:.1}% of deployment decision states never occur in the synchronous arena", 100.0 * f);
    }
    print!("{}", report_tsv(&outcome.report));
    println!("artifacts in {}", out.display());
    Ok(())
}
