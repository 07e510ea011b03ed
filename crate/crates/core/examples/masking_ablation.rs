//! Guidance on versus off: environment steps until the smoothed normalized
//! reward first reaches a level, per seed, with the medians.

use craft_arena::harness::{censored_median, run_masking_ablation, ExperimentConfig};

fn main() -> craft_arena::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::load(args.next().unwrap_or_else(|| "configs/desk.toml".into()))?;
    cfg.train_steps = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let level = 0.4;
    let runs = run_masking_ablation(&cfg, level, 10)?;
    let show = |v: Option<u64>| v.map_or("never".to_string(), |s| s.to_string());
    for r in &runs {
        println!("seed {}  guided {:>8}  unguided {:>8}", r.seed, show(r.guided), show(r.unguided));
    }
    let med = |f: fn(&craft_arena::harness::MaskingOutcome) -> Option<u64>| {
        censored_median(&runs.iter().map(f).collect::<Vec<_>>())
    };
    let fmt = |m: Option<f64>| m.map_or("never".to_string(), |x| format!("{x:.0}"));
    println!("median steps to {level}: guided {}  unguided {}", fmt(med(|r| r.guided)), fmt(med(|r| r.unguided)));
    Ok(())
}
