//! Flat attribute-list observations.
//!
//! Robot group (11): x, y, level, heading one-hot (4), carried kind one-hot
//! (none, block, slope), team index.
//! Object group (11): x, y, level, kind one-hot (block, slope), heading
//! one-hot (4), folded, carried.
//! Coordinates are scaled to [0, 1] by the grid extent.

use super::state::WorldState;
use super::task::TaskSpec;
use super::types::{ObjectKind, ObjectState, RobotState};

pub const ROBOT_FEATURES: usize = 11;
pub const OBJECT_FEATURES: usize = 11;

pub type Observation = Vec<f64>;

/// Observation length for a task; identical for per-agent and joint views.
pub fn observation_len(spec: &TaskSpec) -> usize {
    spec.robots.len() * ROBOT_FEATURES + spec.objects.len() * OBJECT_FEATURES
}

fn scale(v: i32, extent: i32) -> f64 {
    if extent <= 1 {
        0.0
    } else {
        v as f64 / (extent - 1) as f64
    }
}

fn push_robot(out: &mut Observation, state: &WorldState, r: &RobotState) {
    out.push(scale(r.pos.x, state.width));
    out.push(scale(r.pos.y, state.height));
    out.push(r.pos.level as f64);
    let mut heading = [0.0; 4];
    heading[r.heading.index()] = 1.0;
    out.extend_from_slice(&heading);
    let carry = match r.carrying.map(|o| state.objects[o].kind) {
        None => [1.0, 0.0, 0.0],
        Some(ObjectKind::Block) => [0.0, 1.0, 0.0],
        Some(ObjectKind::Slope) => [0.0, 0.0, 1.0],
    };
    out.extend_from_slice(&carry);
    out.push(r.team as f64);
}

fn push_object(out: &mut Observation, state: &WorldState, o: &ObjectState) {
    out.push(scale(o.pos.x, state.width));
    out.push(scale(o.pos.y, state.height));
    out.push(o.pos.level as f64);
    match o.kind {
        ObjectKind::Block => out.extend_from_slice(&[1.0, 0.0]),
        ObjectKind::Slope => out.extend_from_slice(&[0.0, 1.0]),
    }
    let mut heading = [0.0; 4];
    heading[o.heading.index()] = 1.0;
    out.extend_from_slice(&heading);
    out.push(f64::from(u8::from(o.folded)));
    out.push(f64::from(u8::from(o.carried_by.is_some())));
}

/// Per-agent view: the agent's own entry first, other robots in id order,
/// then objects in id order.
pub fn observe(state: &WorldState, agent: usize) -> Observation {
    let mut out = Vec::with_capacity(
        state.robots.len() * ROBOT_FEATURES + state.objects.len() * OBJECT_FEATURES,
    );
    observe_into(state, agent, &mut out);
    out
}

pub fn observe_into(state: &WorldState, agent: usize, out: &mut Observation) {
    out.clear();
    push_robot(out, state, &state.robots[agent]);
    for r in state.robots.iter().filter(|r| r.id != agent) {
        push_robot(out, state, r);
    }
    for o in &state.objects {
        push_object(out, state, o);
    }
}

/// Global-order view for the centralized critic.
pub fn observe_joint(state: &WorldState) -> Observation {
    let mut out = Vec::with_capacity(
        state.robots.len() * ROBOT_FEATURES + state.objects.len() * OBJECT_FEATURES,
    );
    observe_joint_into(state, &mut out);
    out
}

pub fn observe_joint_into(state: &WorldState, out: &mut Observation) {
    out.clear();
    for r in &state.robots {
        push_robot(out, state, r);
    }
    for o in &state.objects {
        push_object(out, state, o);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::state::init_task;
    use crate::arena::types::GridPos;

    #[test]
    fn joint_view_is_deterministic() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let s = init_task(&spec, 4).unwrap();
        let copy = s.clone();
        assert_eq!(observe_joint(&s), observe_joint(&copy));
        assert_eq!(observe_joint(&s).len(), observation_len(&spec));
        assert_eq!(observe(&s, 1).len(), observation_len(&spec));
    }

    #[test]
    fn origin_maps_to_zero_and_far_corner_to_one() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let mut s = init_task(&spec, 0).unwrap();
        s.robots[0].pos = GridPos::ground(0, 0);
        s.robots[1].pos = GridPos::ground(6, 6);
        let obs = observe(&s, 0);
        assert_eq!(&obs[..2], &[0.0, 0.0]);
        assert_eq!(&obs[ROBOT_FEATURES..ROBOT_FEATURES + 2], &[1.0, 1.0]);
        assert!(obs.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
