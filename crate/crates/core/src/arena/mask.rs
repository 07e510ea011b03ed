//! Constraint masks and single-robot action semantics.
//!
//! Hard constraints encoded by [`legal_action_mask`]:
//! - no move off the grid or into a cell held by another robot;
//! - no sideways exit from underneath a block;
//! - a slope is entered only by reversing into its opening while facing out,
//!   and left only forward through the opening; no turning inside a slope;
//! - level 1 is reached only over an unfolded slope whose high end faces a
//!   block, and left the same way or onto a neighbouring roof;
//! - lifting needs an engaged liftable object (a block carrying nothing on its
//!   roof, or a folded slope), dropping needs a carried object and a cell it
//!   can rest on; folding and unfolding need an engaged slope.
//!
//! `Stop` is always allowed.

use super::state::WorldState;
use super::types::{Action, ActionMask, GridPos, Heading, ObjectKind};
use crate::error::Result;

/// What a permitted action does to the acting robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effect {
    Move(GridPos),
    Turn(Heading),
    Lift(usize),
    Drop(usize),
    SetFolded(usize, bool),
    Stop,
}

/// The effect of `action` for robot `agent`, or `None` when a constraint
/// forbids it. Occupancy by other robots is taken from `state`.
pub fn plan_action(state: &WorldState, agent: usize, action: Action) -> Option<Effect> {
    let robot = &state.robots[agent];
    let carrying = robot.carrying;
    match action {
        Action::Stop => Some(Effect::Stop),
        Action::TurnLeft | Action::TurnRight => {
            if robot.in_slope {
                return None;
            }
            let h = if action == Action::TurnLeft {
                robot.heading.turn_left()
            } else {
                robot.heading.turn_right()
            };
            Some(Effect::Turn(h))
        }
        Action::Lift => {
            if carrying.is_some() {
                return None;
            }
            let obj = state.object_at(robot.pos)?;
            let liftable = match obj.kind {
                ObjectKind::Block => {
                    robot.pos.level == 1 || {
                        let roof = robot.pos.with_level(1);
                        state.object_at(roof).is_none() && state.robot_at(roof).is_none()
                    }
                }
                ObjectKind::Slope => obj.folded,
            };
            liftable.then_some(Effect::Lift(obj.id))
        }
        Action::Drop => {
            let oid = carrying?;
            let obj = &state.objects[oid];
            // The carrier's own cell is free of resting objects; a roof cell
            // takes a block but not a slope.
            (obj.kind == ObjectKind::Block || robot.pos.level == 0).then_some(Effect::Drop(oid))
        }
        Action::Fold | Action::Unfold => {
            if !robot.in_slope {
                return None;
            }
            let slope = state.slope_at(robot.pos)?;
            let want_folded = action == Action::Fold;
            (slope.folded != want_folded).then_some(Effect::SetFolded(slope.id, want_folded))
        }
        Action::MoveForward | Action::MoveBack | Action::MoveLeft | Action::MoveRight => {
            plan_move(state, agent, action).map(Effect::Move)
        }
    }
}

fn plan_move(state: &WorldState, agent: usize, action: Action) -> Option<GridPos> {
    let robot = &state.robots[agent];
    if robot.in_slope && action != Action::MoveForward {
        return None;
    }
    if robot.under_block && matches!(action, Action::MoveLeft | Action::MoveRight) {
        return None;
    }
    let dir = action.move_direction(robot.heading)?;
    let d = dir.delta();
    let next = robot.pos.step(d);
    if !state.in_bounds(next.x, next.y) {
        return None;
    }
    let carrying = robot.carrying.is_some();

    // An unfolded slope is a ramp: driving towards its high end lifts the
    // robot onto the roof behind it, driving off a roof onto its high end
    // brings it down to the cell in front of it.
    let ramp = state
        .slope_at(next.with_level(0))
        .filter(|s| !s.folded)
        .filter(|s| {
            (robot.pos.level == 0 && s.heading == dir)
                || (robot.pos.level == 1 && s.heading == dir.opposite())
        });
    let dest = match ramp {
        Some(_) => {
            if state.robot_at(next.with_level(0)).is_some() {
                return None;
            }
            let beyond = next.step(d);
            beyond.with_level(1 - robot.pos.level)
        }
        None => next,
    };
    if !state.in_bounds(dest.x, dest.y) {
        return None;
    }
    if dest.level == 1 && state.block_at(dest.with_level(0)).is_none() {
        return None;
    }
    match state.object_at(dest) {
        None => {}
        Some(_) if carrying => return None,
        Some(o) if o.kind == ObjectKind::Block => {}
        // rear entry: facing out of the opening, reversing in
        Some(slope) if !(action == Action::MoveBack && robot.heading == slope.heading) => return None,
        Some(_) => {}
    }
    if state.robot_at(dest).is_some() {
        return None;
    }
    Some(dest)
}

/// Applies an effect planned for `agent`; progress is not refreshed.
pub(crate) fn apply_effect(state: &mut WorldState, agent: usize, effect: Effect) {
    match effect {
        Effect::Stop => {}
        Effect::Turn(h) => {
            state.robots[agent].heading = h;
            if let Some(oid) = state.robots[agent].carrying {
                if state.objects[oid].kind == ObjectKind::Slope {
                    state.objects[oid].heading = h;
                }
            }
        }
        Effect::Move(dest) => {
            state.robots[agent].pos = dest;
            if let Some(oid) = state.robots[agent].carrying {
                state.objects[oid].pos = dest;
            }
            refresh_engagement(state, agent);
        }
        Effect::Lift(oid) => {
            state.objects[oid].carried_by = Some(agent);
            let r = &mut state.robots[agent];
            r.carrying = Some(oid);
            r.under_block = false;
            r.in_slope = false;
        }
        Effect::Drop(oid) => {
            let pos = state.robots[agent].pos;
            let obj = &mut state.objects[oid];
            obj.carried_by = None;
            obj.pos = pos;
            state.robots[agent].carrying = None;
            refresh_engagement(state, agent);
        }
        Effect::SetFolded(oid, folded) => state.objects[oid].folded = folded,
    }
}

fn refresh_engagement(state: &mut WorldState, agent: usize) {
    let pos = state.robots[agent].pos;
    let kind = state.object_at(pos).map(|o| o.kind);
    let r = &mut state.robots[agent];
    r.under_block = kind == Some(ObjectKind::Block);
    r.in_slope = kind == Some(ObjectKind::Slope);
}

/// Hard-constraint mask for one robot.
pub fn legal_action_mask(state: &WorldState, agent: usize) -> Result<ActionMask> {
    state.robot(agent)?;
    let mut mask = ActionMask::stop_only();
    for action in Action::ALL {
        if plan_action(state, agent, action).is_some() {
            mask.set(action, true);
        }
    }
    Ok(mask)
}

/// Narrows `base` with task guidance when `enabled`:
/// - Fold/Unfold only to bring an own target slope to its required fold state;
/// - Drop only onto an unfinished own target cell of the carried kind (and
///   heading, for slopes);
/// - no Lift of a piece that already completes an own target.
///
/// Never re-enables a base-masked action; `Stop` stays allowed.
pub fn guided_action_mask(
    state: &WorldState,
    agent: usize,
    base: ActionMask,
    enabled: bool,
) -> Result<ActionMask> {
    let robot = state.robot(agent)?;
    if !enabled {
        return Ok(base);
    }
    let mut mask = base;
    let task = &state.task;
    let own_target_at = |pos: GridPos, kind: ObjectKind| {
        task.team_targets(robot.team)
            .find(move |t| t.pos() == pos && t.kind == kind)
    };

    match robot.carrying {
        None => {
            mask.set(Action::Drop, false);
            let engaged = state.object_at(robot.pos);
            let fold_useful = engaged.is_some_and(|slope| {
                slope.kind == ObjectKind::Slope
                    && own_target_at(slope.pos, ObjectKind::Slope).is_some_and(|t| {
                        t.heading.is_none_or(|h| h == slope.heading)
                            && t.folded.is_some_and(|f| f != slope.folded)
                    })
            });
            if !fold_useful {
                mask.set(Action::Fold, false);
                mask.set(Action::Unfold, false);
            }
            if let Some(obj) = engaged {
                let placed = own_target_at(obj.pos, obj.kind)
                    .is_some_and(|t| state.target_satisfied(t));
                if placed {
                    mask.set(Action::Lift, false);
                }
            }
        }
        Some(oid) => {
            let obj = &state.objects[oid];
            let useful_drop = own_target_at(robot.pos, obj.kind).is_some_and(|t| {
                !state.target_satisfied(t) && t.heading.is_none_or(|h| h == robot.heading)
            });
            if !useful_drop {
                mask.set(Action::Drop, false);
            }
            mask.set(Action::Fold, false);
            mask.set(Action::Unfold, false);
        }
    }
    Ok(mask)
}

/// Convenience: legal mask narrowed by guidance.
pub fn action_mask(state: &WorldState, agent: usize, guidance: bool) -> Result<ActionMask> {
    let base = legal_action_mask(state, agent)?;
    guided_action_mask(state, agent, base, guidance)
}
