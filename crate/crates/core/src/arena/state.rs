use super::task::{TaskSpec, TargetPiece};
use super::types::{GridPos, Heading, ObjectKind, ObjectState, RobotState};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::sync::Arc;

/// Full discrete arena snapshot. Cheap to clone apart from the entity vectors;
/// the task is shared.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub width: i32,
    pub height: i32,
    pub robots: Vec<RobotState>,
    pub objects: Vec<ObjectState>,
    pub step_count: usize,
    pub task: Arc<TaskSpec>,
    pub progress: Vec<usize>,
}

impl PartialEq for WorldState {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.robots == other.robots
            && self.objects == other.objects
            && self.step_count == other.step_count
            && self.progress == other.progress
            && (Arc::ptr_eq(&self.task, &other.task) || *self.task == *other.task)
    }
}

/// Builds the start state for `spec`. With `randomize_spawns` the seed picks
/// distinct free ground cells for the robots (inside the team territory in
/// competitive tasks); otherwise the seed is ignored.
pub fn init_task(spec: &TaskSpec, seed: u64) -> Result<WorldState> {
    spec.validate()?;
    init_task_shared(Arc::new(spec.clone()), seed)
}

pub fn init_task_shared(spec: Arc<TaskSpec>, seed: u64) -> Result<WorldState> {
    let objects: Vec<ObjectState> = spec
        .objects
        .iter()
        .enumerate()
        .map(|(id, p)| ObjectState {
            id,
            kind: p.kind,
            pos: GridPos::ground(p.x, p.y),
            heading: if p.kind == ObjectKind::Block { Heading::North } else { p.heading },
            folded: p.kind == ObjectKind::Slope && p.folded,
            carried_by: None,
        })
        .collect();

    let mut cells: Vec<(i32, i32)> = spec.robots.iter().map(|r| (r.x, r.y)).collect();
    if spec.randomize_spawns {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free = |x: i32, y: i32| !objects.iter().any(|o| o.pos.x == x && o.pos.y == y);
        let mut taken: Vec<(i32, i32)> = Vec::new();
        for (i, r) in spec.robots.iter().enumerate() {
            let mut pool: Vec<(i32, i32)> = (0..spec.height)
                .flat_map(|y| (0..spec.width).map(move |x| (x, y)))
                .filter(|&(x, y)| free(x, y) && !taken.contains(&(x, y)))
                .filter(|&(x, y)| spec.territory(r.team).is_none_or(|t| t.contains(x, y)))
                .collect();
            pool.shuffle(&mut rng);
            let cell = *pool
                .first()
                .ok_or_else(|| Error::config(format!("robot {i}: no free spawn cell")))?;
            taken.push(cell);
            cells[i] = cell;
        }
    }
    let robots = spec
        .robots
        .iter()
        .zip(cells)
        .enumerate()
        .map(|(id, (r, (x, y)))| RobotState {
            id,
            team: r.team,
            pos: GridPos::ground(x, y),
            heading: r.heading,
            carrying: None,
            under_block: false,
            in_slope: false,
        })
        .collect();

    let mut state = WorldState {
        width: spec.width,
        height: spec.height,
        robots,
        objects,
        step_count: 0,
        progress: vec![0; spec.n_teams()],
        task: spec,
    };
    state.progress = state.compute_progress();
    state.validate().map_err(|e| Error::config(format!("initial state: {e}")))?;
    Ok(state)
}

impl WorldState {
    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width && y < self.height
    }

    pub fn robot(&self, id: usize) -> Result<&RobotState> {
        self.robots.get(id).ok_or(Error::Lookup { kind: "robot", id })
    }

    /// Non-carried object resting at exactly `pos`.
    pub fn object_at(&self, pos: GridPos) -> Option<&ObjectState> {
        self.objects
            .iter()
            .find(|o| o.carried_by.is_none() && o.pos == pos)
    }

    pub fn block_at(&self, pos: GridPos) -> Option<&ObjectState> {
        self.object_at(pos).filter(|o| o.kind == ObjectKind::Block)
    }

    pub fn slope_at(&self, pos: GridPos) -> Option<&ObjectState> {
        self.object_at(pos).filter(|o| o.kind == ObjectKind::Slope)
    }

    pub fn robot_at(&self, pos: GridPos) -> Option<&RobotState> {
        self.robots.iter().find(|r| r.pos == pos)
    }

    pub fn n_teams(&self) -> usize {
        self.progress.len()
    }

    pub fn target_satisfied(&self, target: &TargetPiece) -> bool {
        self.object_at(target.pos()).is_some_and(|o| {
            o.kind == target.kind
                && target.heading.is_none_or(|h| o.heading == h)
                && target.folded.is_none_or(|f| o.folded == f)
        })
    }

    /// Per-team count of correctly placed target pieces.
    pub fn compute_progress(&self) -> Vec<usize> {
        (0..self.task.n_teams())
            .map(|t| {
                self.task
                    .team_targets(t)
                    .filter(|target| self.target_satisfied(target))
                    .count()
            })
            .collect()
    }

    pub fn team_complete(&self, team: usize) -> bool {
        self.progress.get(team).copied() == Some(self.task.target_count(team))
    }

    pub fn any_team_complete(&self) -> bool {
        (0..self.n_teams()).any(|t| self.team_complete(t))
    }

    /// Checks every structural invariant of the arena.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invariant(msg));
        let in_bounds = |p: GridPos| self.in_bounds(p.x, p.y) && p.level <= 1;

        for (i, r) in self.robots.iter().enumerate() {
            if r.id != i {
                return bad(format!("robot slot {i} holds id {}", r.id));
            }
            if !in_bounds(r.pos) {
                return bad(format!("robot {i} out of bounds at {}", r.pos));
            }
            if r.team >= self.n_teams() {
                return bad(format!("robot {i} has team {}", r.team));
            }
        }
        for (i, a) in self.robots.iter().enumerate() {
            for b in &self.robots[i + 1..] {
                if a.pos == b.pos {
                    return bad(format!("robots {} and {} share {}", a.id, b.id, a.pos));
                }
            }
        }

        for (i, o) in self.objects.iter().enumerate() {
            if o.id != i {
                return bad(format!("object slot {i} holds id {}", o.id));
            }
            if !in_bounds(o.pos) {
                return bad(format!("object {i} out of bounds at {}", o.pos));
            }
            if o.kind == ObjectKind::Block && (o.folded || o.heading != Heading::North) {
                return bad(format!("block {i} has slope attributes"));
            }
            match o.carried_by {
                Some(rid) => {
                    let Some(r) = self.robots.get(rid) else {
                        return bad(format!("object {i} carried by missing robot {rid}"));
                    };
                    if r.carrying != Some(i) || r.pos != o.pos {
                        return bad(format!("object {i} and carrier {rid} disagree"));
                    }
                    if o.kind == ObjectKind::Slope && o.heading != r.heading {
                        return bad(format!("carried slope {i} not aligned with robot {rid}"));
                    }
                }
                None => {
                    if o.pos.level == 1 {
                        if o.kind != ObjectKind::Block {
                            return bad(format!("slope {i} above ground"));
                        }
                        if self.block_at(o.pos.with_level(0)).is_none() {
                            return bad(format!("block {i} floats at {}", o.pos));
                        }
                    }
                    if self
                        .objects
                        .iter()
                        .any(|p| p.id != i && p.carried_by.is_none() && p.pos == o.pos)
                    {
                        return bad(format!("two objects rest at {}", o.pos));
                    }
                }
            }
        }

        for r in &self.robots {
            let resting = self.object_at(r.pos);
            let under = resting.is_some_and(|o| o.kind == ObjectKind::Block);
            let in_slope = resting.is_some_and(|o| o.kind == ObjectKind::Slope);
            if let Some(oid) = r.carrying {
                match self.objects.get(oid) {
                    Some(o) if o.carried_by == Some(r.id) => {}
                    _ => return bad(format!("robot {} carries object {oid} inconsistently", r.id)),
                }
                if r.under_block || r.in_slope {
                    return bad(format!("robot {} carries while engaged", r.id));
                }
                if resting.is_some() {
                    return bad(format!("robot {} carries into occupied cell {}", r.id, r.pos));
                }
            }
            if r.under_block != under {
                return bad(format!("robot {} under_block flag wrong at {}", r.id, r.pos));
            }
            if r.in_slope != in_slope {
                return bad(format!("robot {} in_slope flag wrong at {}", r.id, r.pos));
            }
            if r.in_slope && resting.is_some_and(|s| s.heading != r.heading) {
                return bad(format!("robot {} inside slope facing the wrong way", r.id));
            }
            if r.pos.level == 1 && self.block_at(r.pos.with_level(0)).is_none() {
                return bad(format!("robot {} has no roof under it at {}", r.id, r.pos));
            }
        }

        if self.progress != self.compute_progress() {
            return bad(format!("progress {:?} is stale", self.progress));
        }
        for (t, p) in self.progress.iter().enumerate() {
            if *p > self.task.target_count(t) {
                return bad(format!("team {t} progress exceeds target count"));
            }
        }
        Ok(())
    }

    /// Canonical state signature without the step counter; used for
    /// visitation sets.
    pub fn signature(&self) -> String {
        let mut s = String::with_capacity(16 * (self.robots.len() + self.objects.len()));
        for r in &self.robots {
            let _ = write!(
                s,
                "r{},{},{},{}{};",
                r.pos.x,
                r.pos.y,
                r.pos.level,
                r.heading.glyph(),
                r.carrying.map_or(-1, |c| c as i64)
            );
        }
        for o in &self.objects {
            let _ = write!(
                s,
                "o{},{},{},{}{}{};",
                o.pos.x,
                o.pos.y,
                o.pos.level,
                o.heading.glyph(),
                u8::from(o.folded),
                o.carried_by.map_or(-1, |c| c as i64)
            );
        }
        s
    }

    pub fn count_kind(&self, kind: ObjectKind) -> usize {
        self.objects.iter().filter(|o| o.kind == kind).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_state_has_zero_progress() {
        let mut spec = TaskSpec::preset("build-character-desk").unwrap();
        spec.width = 7;
        let s = init_task(&spec, 0).unwrap();
        assert_eq!(s.progress, vec![0]);
        assert_eq!(s.step_count, 0);
        s.validate().unwrap();
    }

    #[test]
    fn seeds_change_only_spawn_cells() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let a = init_task(&spec, 0).unwrap();
        let b = init_task(&spec, 1).unwrap();
        assert_eq!(a.objects, b.objects);
        assert_eq!(a.progress, b.progress);
        assert_ne!(
            a.robots.iter().map(|r| r.pos).collect::<Vec<_>>(),
            b.robots.iter().map(|r| r.pos).collect::<Vec<_>>()
        );
        for (ra, rb) in a.robots.iter().zip(&b.robots) {
            assert_eq!(ra.heading, rb.heading);
            assert_eq!(ra.team, rb.team);
        }
    }

    #[test]
    fn fixed_spawns_ignore_seed() {
        let spec = TaskSpec::preset("two-floor-competition").unwrap();
        assert_eq!(init_task(&spec, 0).unwrap(), init_task(&spec, 9).unwrap());
    }

    #[test]
    fn competitive_spawns_stay_in_territory() {
        let mut spec = TaskSpec::preset("two-floor-competition").unwrap();
        spec.randomize_spawns = true;
        for seed in 0..20 {
            let s = init_task(&spec, seed).unwrap();
            for r in &s.robots {
                assert!(spec.territory(r.team).unwrap().contains(r.pos.x, r.pos.y));
            }
        }
    }

    #[test]
    fn validate_catches_shared_cell() {
        let spec = TaskSpec::preset("build-character-desk").unwrap();
        let mut s = init_task(&spec, 0).unwrap();
        s.robots[1].pos = s.robots[0].pos;
        assert!(s.validate().is_err());
    }

    #[test]
    fn signature_ignores_step_count() {
        let spec = TaskSpec::preset("fetch-block").unwrap();
        let a = init_task(&spec, 3).unwrap();
        let mut b = a.clone();
        b.step_count = 17;
        assert_eq!(a.signature(), b.signature());
        b.robots[0].heading = b.robots[0].heading.turn_left();
        assert_ne!(a.signature(), b.signature());
    }
}
