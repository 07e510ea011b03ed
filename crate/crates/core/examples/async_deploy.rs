//! The same controller in both simulators. The synchronous arena moves all
//! robots in lockstep; the asynchronous one gives every action a duration and
//! lets robots decide while others are still moving.

use craft_arena::arena::{init_task_shared, run_sync_episode, Action, RandomController, TaskSpec};
use craft_arena::deploy::{duration_of, run_async_episode, AsyncConfig, DurationModel, MotionContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> craft_arena::Result<()> {
    let model = DurationModel::default();
    println!("mean fresh-start step: {:.3} s", model.mean_step_duration());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (prev, cur) in [(None, Action::MoveForward), (Some(Action::MoveForward), Action::MoveForward), (None, Action::Lift)] {
        let d = duration_of(&model, prev, cur, MotionContext::default(), &mut rng);
        println!("{prev:?} -> {cur:?}: {d:.3} s");
    }

    let task = Arc::new(TaskSpec::preset("build-character-desk")?);
    let start = init_task_shared(task, 3)?;
    let sync = run_sync_episode(&mut RandomController::new(1), start.clone(), true, 0)?;
    let cfg = AsyncConfig { model, guidance: true, seed: 9 };
    let deployed = run_async_episode(&mut RandomController::new(1), start, &cfg, 1)?;

    println!("sync:  {} steps, {} decisions", sync.outcome.steps, sync.records.len());
    println!(
        "async: {} completions, {} decisions, ended at {:.2} s",
        deployed.outcome.steps,
        deployed.records.len(),
        deployed.outcome.end_time.unwrap_or(0.0)
    );
    for rec in deployed.records.iter().take(6) {
        println!(
            "  t={:6.3}  robot {}  in flight {:?}",
            rec.time.unwrap_or(0.0),
            rec.robot.unwrap_or(0),
            rec.actions
        );
    }
    Ok(())
}
