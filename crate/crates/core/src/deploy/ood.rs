use crate::arena::{Trajectory, WorldState};
use std::collections::HashSet;

/// Signatures of states visited by synchronous rollouts.
#[derive(Debug, Clone, Default)]
pub struct VisitSet {
    seen: HashSet<String>,
}

impl VisitSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, state: &WorldState) {
        self.seen.insert(state.signature());
    }

    pub fn extend_from(&mut self, traj: &Trajectory) {
        for rec in &traj.records {
            self.insert(&rec.state);
        }
        self.insert(&traj.final_state);
    }

    pub fn contains(&self, state: &WorldState) -> bool {
        self.seen.contains(&state.signature())
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// True when `state` was never visited under synchronous dynamics.
pub fn detect_ood(state: &WorldState, sync_visited: &VisitSet) -> bool {
    !sync_visited.contains(state)
}

/// Fraction of decision states in `trajs` that are out of distribution.
pub fn ood_fraction<'a>(trajs: impl IntoIterator<Item = &'a Trajectory>, sync_visited: &VisitSet) -> f64 {
    let (mut ood, mut total) = (0usize, 0usize);
    for t in trajs {
        for rec in &t.records {
            total += 1;
            ood += usize::from(detect_ood(&rec.state, sync_visited));
        }
    }
    if total == 0 {
        0.0
    } else {
        ood as f64 / total as f64
    }
}
