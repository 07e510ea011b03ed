//! Record an episode to line-delimited JSON, read it back and print its
//! frames.

use craft_arena::arena::{init_task_shared, read_trajectories, run_sync_episode, write_trajectory, RandomController, TaskSpec};
use craft_arena::harness::render_trajectory;
use std::sync::Arc;

fn main() -> craft_arena::Result<()> {
    let task = Arc::new(TaskSpec::preset("fetch-block")?);
    let mut traj = run_sync_episode(&mut RandomController::new(5), init_task_shared(task, 5)?, true, 0)?;
    traj.records.truncate(4);

    let mut bytes = Vec::new();
    write_trajectory(&mut bytes, &traj)?;
    let back = read_trajectories(bytes.as_slice())?;
    assert_eq!(back[0].records, traj.records);
    println!("{} bytes, {} records", bytes.len(), back[0].records.len());
    for frame in render_trajectory(&back[0]) {
        println!("{frame}");
    }
    Ok(())
}
