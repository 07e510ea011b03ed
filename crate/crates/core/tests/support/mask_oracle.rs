//! Independent reference for the action masks: a raw kinematic model that
//! applies an action with no constraint checks, plus the named real-world
//! rules. An action should be allowed exactly when the raw result exists,
//! satisfies every state invariant, and breaks none of the rules.

use craft_arena::arena::{
    init_task, Action, GridPos, Heading, ObjectKind, ObjectState, Placement, RobotSpawn, RobotState,
    TargetPiece, TaskMode, TaskSpec, WorldState,
};
use std::sync::Arc;

fn direction(action: Action, h: Heading) -> Option<Heading> {
    match action {
        Action::MoveForward => Some(h),
        Action::MoveBack => Some(h.turn_left().turn_left()),
        Action::MoveLeft => Some(h.turn_left()),
        Action::MoveRight => Some(h.turn_right()),
        _ => None,
    }
}

fn resting(s: &WorldState, p: GridPos) -> Option<usize> {
    s.objects
        .iter()
        .position(|o| o.carried_by.is_none() && o.pos == p)
}

fn refresh(s: &mut WorldState, r: usize) {
    let kind = resting(s, s.robots[r].pos).map(|o| s.objects[o].kind);
    s.robots[r].under_block = kind == Some(ObjectKind::Block);
    s.robots[r].in_slope = kind == Some(ObjectKind::Slope);
}

/// Physical effect of an action with no rule checks. `None` when the action
/// has nothing to act on (off the grid, nothing to lift, nothing to drop,
/// no slope to fold, fold state already as requested).
pub fn raw_apply(s: &WorldState, r: usize, action: Action) -> Option<WorldState> {
    let mut n = s.clone();
    let robot = s.robots[r].clone();
    match action {
        Action::Stop => {}
        Action::TurnLeft | Action::TurnRight => {
            let h = if action == Action::TurnLeft {
                robot.heading.turn_left()
            } else {
                robot.heading.turn_right()
            };
            n.robots[r].heading = h;
            if let Some(o) = robot.carrying {
                if n.objects[o].kind == ObjectKind::Slope {
                    n.objects[o].heading = h;
                }
            }
        }
        Action::Lift => {
            if robot.carrying.is_some() {
                return None;
            }
            let o = resting(s, robot.pos)?;
            n.objects[o].carried_by = Some(r);
            n.robots[r].carrying = Some(o);
            n.robots[r].under_block = false;
            n.robots[r].in_slope = false;
        }
        Action::Drop => {
            let o = robot.carrying?;
            n.objects[o].carried_by = None;
            n.objects[o].pos = robot.pos;
            n.robots[r].carrying = None;
            refresh(&mut n, r);
        }
        Action::Fold | Action::Unfold => {
            let o = resting(s, robot.pos)?;
            if s.objects[o].kind != ObjectKind::Slope {
                return None;
            }
            let want = action == Action::Fold;
            if s.objects[o].folded == want {
                return None;
            }
            n.objects[o].folded = want;
        }
        _ => {
            let dir = direction(action, robot.heading).unwrap();
            let (dx, dy) = dir.delta();
            let mut dest = GridPos::new(robot.pos.x + dx, robot.pos.y + dy, robot.pos.level);
            if !s.in_bounds(dest.x, dest.y) {
                return None;
            }
            let under = GridPos::new(dest.x, dest.y, 0);
            if let Some(o) = resting(s, under) {
                let ramp = &s.objects[o];
                if ramp.kind == ObjectKind::Slope && !ramp.folded {
                    let up = robot.pos.level == 0 && ramp.heading == dir;
                    let down = robot.pos.level == 1 && ramp.heading == dir.turn_left().turn_left();
                    if up || down {
                        dest = GridPos::new(dest.x + dx, dest.y + dy, if up { 1 } else { 0 });
                        if !s.in_bounds(dest.x, dest.y) {
                            return None;
                        }
                    }
                }
            }
            n.robots[r].pos = dest;
            if let Some(o) = robot.carrying {
                n.objects[o].pos = dest;
            }
            refresh(&mut n, r);
        }
    }
    n.progress = n.compute_progress();
    Some(n)
}

/// Names the first real-world rule the transition breaks.
pub fn broken_rule(before: &WorldState, r: usize, action: Action, after: &WorldState) -> Option<&'static str> {
    let robot = &before.robots[r];
    if action.is_move() {
        if robot.under_block && matches!(action, Action::MoveLeft | Action::MoveRight) {
            return Some("sideways exit from under a block");
        }
        if robot.in_slope && action != Action::MoveForward {
            return Some("slope left other than through its opening");
        }
        let moved = &after.robots[r];
        if moved.in_slope {
            let slope = &after.objects[resting(after, moved.pos).unwrap()];
            if !(action == Action::MoveBack && robot.heading == slope.heading) {
                return Some("slope entered other than by reversing in while facing out");
            }
        }
        if moved.pos.level != robot.pos.level {
            let (dx, dy) = direction(action, robot.heading).unwrap().delta();
            let ramp = GridPos::new(robot.pos.x + dx, robot.pos.y + dy, 0);
            if before.robots.iter().any(|o| o.pos == ramp) {
                return Some("drove over an occupied ramp");
            }
        }
    }
    if action == Action::Lift {
        let o = after.robots[r].carrying.unwrap();
        if after.objects[o].kind == ObjectKind::Slope && !before.objects[o].folded {
            return Some("lifted an unfolded slope");
        }
    }
    None
}

/// Reference legality of one action.
pub fn oracle_allows(s: &WorldState, r: usize, action: Action) -> bool {
    if action == Action::Stop {
        return true;
    }
    match raw_apply(s, r, action) {
        None => false,
        Some(next) => next.validate().is_ok() && broken_rule(s, r, action, &next).is_none(),
    }
}

/// 4×4 arena task with one robot, one block and one slope.
pub fn small_task() -> Arc<TaskSpec> {
    Arc::new(TaskSpec {
        name: "oracle-4x4".into(),
        mode: TaskMode::Cooperative,
        width: 4,
        height: 4,
        horizon: 50,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: false,
        robots: vec![RobotSpawn { team: 0, x: 0, y: 0, heading: Heading::North }],
        objects: vec![
            Placement { kind: ObjectKind::Block, x: 1, y: 1, heading: Heading::North, folded: false },
            Placement { kind: ObjectKind::Slope, x: 2, y: 2, heading: Heading::East, folded: true },
        ],
        targets: vec![TargetPiece {
            team: 0,
            kind: ObjectKind::Block,
            x: 3,
            y: 3,
            level: 0,
            heading: None,
            folded: None,
        }],
        territories: vec![],
    })
}

/// Every valid state of the 4×4 arena with one robot, one block, one slope.
pub fn enumerate_small_states() -> Vec<WorldState> {
    let task = small_task();
    let template = init_task(&task, 0).unwrap();
    let mut cells = Vec::new();
    for level in 0..2u8 {
        for y in 0..4 {
            for x in 0..4 {
                cells.push(GridPos::new(x, y, level));
            }
        }
    }
    let mut out = Vec::new();
    for &rpos in &cells {
        for rh in Heading::ALL {
            // block: resting anywhere or carried
            let mut block_opts: Vec<Option<GridPos>> = cells.iter().map(|c| Some(*c)).collect();
            block_opts.push(None);
            for bpos in &block_opts {
                // slope: resting with any heading and fold state, or carried
                // (a carried slope faces the way its carrier does)
                let mut slope_opts: Vec<(Option<GridPos>, Heading, bool)> = Vec::new();
                for c in &cells {
                    for h in Heading::ALL {
                        for f in [false, true] {
                            slope_opts.push((Some(*c), h, f));
                        }
                    }
                }
                for f in [false, true] {
                    slope_opts.push((None, rh, f));
                }
                for &(spos, sh, sf) in &slope_opts {
                    let slope_carried = spos.is_none();
                    if bpos.is_none() && slope_carried {
                        continue;
                    }
                    let mut s = template.clone();
                    let carrying = if bpos.is_none() {
                        Some(0)
                    } else if slope_carried {
                        Some(1)
                    } else {
                        None
                    };
                    s.robots[0] = RobotState {
                        id: 0,
                        team: 0,
                        pos: rpos,
                        heading: rh,
                        carrying,
                        under_block: false,
                        in_slope: false,
                    };
                    s.objects[0] = ObjectState {
                        id: 0,
                        kind: ObjectKind::Block,
                        pos: bpos.unwrap_or(rpos),
                        heading: Heading::North,
                        folded: false,
                        carried_by: if bpos.is_none() { Some(0) } else { None },
                    };
                    s.objects[1] = ObjectState {
                        id: 1,
                        kind: ObjectKind::Slope,
                        pos: spos.unwrap_or(rpos),
                        heading: sh,
                        folded: sf,
                        carried_by: if slope_carried { Some(0) } else { None },
                    };
                    refresh(&mut s, 0);
                    s.progress = s.compute_progress();
                    if s.validate().is_ok() {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}
