//! A first look at the arena: load a task, inspect the masks of each robot,
//! take a few masked random steps and draw the result.

use craft_arena::arena::{action_mask, init_task_shared, step_sync, Action, RandomController, Controller, TaskSpec};
use craft_arena::harness::render_state;
use std::sync::Arc;

fn main() -> craft_arena::Result<()> {
    let task = Arc::new(TaskSpec::preset("build-character-desk")?);
    let mut state = init_task_shared(task.clone(), 42)?;
    println!("{} ({}x{}, {} robots, horizon {})", task.name, task.width, task.height, task.robots.len(), task.horizon);
    print!("{}", render_state(&state));

    for robot in 0..state.robots.len() {
        let legal = action_mask(&state, robot, false)?;
        let guided = action_mask(&state, robot, true)?;
        let names = |m: &craft_arena::arena::ActionMask| {
            Action::ALL.iter().filter(|a| m.is_allowed(**a)).map(|a| format!("{a:?}")).collect::<Vec<_>>().join(" ")
        };
        println!("robot {robot} legal:  {}", names(&legal));
        println!("robot {robot} guided: {}", names(&guided));
    }

    let mut ctrl = RandomController::new(7);
    for _ in 0..12 {
        let masks: Vec<_> = (0..state.robots.len()).map(|r| action_mask(&state, r, true)).collect::<Result<_, _>>()?;
        let joint: Vec<Action> = masks.iter().enumerate().map(|(r, m)| ctrl.act(&state, r, m)).collect();
        let out = step_sync(&state, &joint, true)?;
        println!("step {:2}: {:?} -> reward {:?}", state.step_count, joint, out.rewards);
        state = out.state;
    }
    print!("{}", render_state(&state));
    Ok(())
}
