//! Hand-built arena situations.

use craft_arena::arena::{GridPos, Heading, ObjectKind, WorldState};

pub fn refresh(s: &mut WorldState) {
    for i in 0..s.robots.len() {
        let pos = s.robots[i].pos;
        let kind = s
            .objects
            .iter()
            .find(|o| o.carried_by.is_none() && o.pos == pos)
            .map(|o| o.kind);
        s.robots[i].under_block = kind == Some(ObjectKind::Block);
        s.robots[i].in_slope = kind == Some(ObjectKind::Slope);
    }
    s.progress = s.compute_progress();
}

pub fn put_robot(s: &mut WorldState, robot: usize, pos: GridPos, heading: Heading) {
    s.robots[robot].pos = pos;
    s.robots[robot].heading = heading;
    if let Some(o) = s.robots[robot].carrying {
        s.objects[o].pos = pos;
        if s.objects[o].kind == ObjectKind::Slope {
            s.objects[o].heading = heading;
        }
    }
    refresh(s);
}

pub fn put_object(s: &mut WorldState, obj: usize, pos: GridPos) {
    if let Some(r) = s.objects[obj].carried_by.take() {
        s.robots[r].carrying = None;
    }
    s.objects[obj].pos = pos;
    refresh(s);
}

pub fn give(s: &mut WorldState, robot: usize, obj: usize) {
    s.objects[obj].carried_by = Some(robot);
    s.objects[obj].pos = s.robots[robot].pos;
    if s.objects[obj].kind == ObjectKind::Slope {
        s.objects[obj].heading = s.robots[robot].heading;
    }
    s.robots[robot].carrying = Some(obj);
    refresh(s);
    // a carrier is never engaged
    s.robots[robot].under_block = false;
    s.robots[robot].in_slope = false;
}

/// Moves every robot and object not listed in `keep` onto distinct spare
/// ground cells far from the action (bottom rows, right to left).
pub fn park_others(s: &mut WorldState, keep_robots: &[usize], keep_objects: &[usize]) {
    let (w, h) = (s.width, s.height);
    let mut spare = (0..h).rev().flat_map(move |y| (0..w).rev().map(move |x| GridPos::new(x, y, 0)));
    for r in 0..s.robots.len() {
        if !keep_robots.contains(&r) {
            let p = spare.next().unwrap();
            s.robots[r].pos = p;
        }
    }
    for o in 0..s.objects.len() {
        if !keep_objects.contains(&o) && s.objects[o].carried_by.is_none() {
            s.objects[o].pos = spare.next().unwrap();
        }
    }
    refresh(s);
}
