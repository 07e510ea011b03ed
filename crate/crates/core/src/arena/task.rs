//! Task definitions: arena size, initial placements, target constructions and
//! reward constants. Tasks load from TOML; see `README.md` for the schema.

use super::types::{GridPos, Heading, ObjectKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskMode {
    Cooperative,
    Competitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpawn {
    pub team: usize,
    pub x: i32,
    pub y: i32,
    pub heading: Heading,
}

/// Initial placement of a block or slope (always on the ground).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub kind: ObjectKind,
    pub x: i32,
    pub y: i32,
    #[serde(default = "north")]
    pub heading: Heading,
    #[serde(default)]
    pub folded: bool,
}

/// One piece of a team's target construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPiece {
    pub team: usize,
    pub kind: ObjectKind,
    pub x: i32,
    pub y: i32,
    #[serde(default)]
    pub level: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<Heading>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folded: Option<bool>,
}

impl TargetPiece {
    pub fn pos(&self) -> GridPos {
        GridPos::new(self.x, self.y, self.level)
    }
}

/// Axis-aligned half-open cell rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Territory {
    pub team: usize,
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Territory {
    pub fn contains(&self, x: i32, y: i32) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

fn north() -> Heading {
    Heading::North
}

fn default_r_build() -> f64 {
    1.0
}

fn default_r_completion() -> f64 {
    5.0
}

fn default_horizon() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub mode: TaskMode,
    pub width: i32,
    pub height: i32,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_r_build")]
    pub r_build: f64,
    #[serde(default = "default_r_completion")]
    pub r_completion: f64,
    /// Draw robot spawn cells from the seed instead of using the listed cells.
    #[serde(default)]
    pub randomize_spawns: bool,
    pub robots: Vec<RobotSpawn>,
    #[serde(default)]
    pub objects: Vec<Placement>,
    pub targets: Vec<TargetPiece>,
    #[serde(default)]
    pub territories: Vec<Territory>,
}

impl TaskSpec {
    pub fn n_teams(&self) -> usize {
        match self.mode {
            TaskMode::Cooperative => 1,
            TaskMode::Competitive => 2,
        }
    }

    pub fn team_targets(&self, team: usize) -> impl Iterator<Item = &TargetPiece> {
        self.targets.iter().filter(move |t| t.team == team)
    }

    pub fn target_count(&self, team: usize) -> usize {
        self.team_targets(team).count()
    }

    pub fn robots_of_team(&self, team: usize) -> usize {
        self.robots.iter().filter(|r| r.team == team).count()
    }

    pub fn territory(&self, team: usize) -> Option<&Territory> {
        self.territories.iter().find(|t| t.team == team)
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width && y < self.height
    }

    /// Largest possible episode return for one team: every piece plus completion.
    pub fn max_return(&self, team: usize) -> f64 {
        self.r_build * self.target_count(team) as f64 + self.r_completion
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: TaskSpec =
            toml::from_str(text).map_err(|e| Error::config(format!("task file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("task spec serializes")
    }

    /// Checks internal consistency; errors name the offending entity.
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::config(format!(
                "task {}: grid {}x{} is too small",
                self.name, self.width, self.height
            )));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon must be positive"));
        }
        if !(self.r_build > 0.0 && self.r_completion > self.r_build) {
            return Err(Error::config(format!(
                "r_completion ({}) must exceed r_build ({}) and r_build must be positive",
                self.r_completion, self.r_build
            )));
        }
        if self.robots.is_empty() {
            return Err(Error::config("task has no robots"));
        }
        let teams = self.n_teams();
        for (i, r) in self.robots.iter().enumerate() {
            if r.team >= teams {
                return Err(Error::config(format!("robot {i}: team {} out of range", r.team)));
            }
            if !self.in_bounds(r.x, r.y) {
                return Err(Error::config(format!("robot {i}: spawn ({}, {}) outside grid", r.x, r.y)));
            }
        }
        for t in 0..teams {
            if self.robots_of_team(t) == 0 {
                return Err(Error::config(format!("team {t} has no robots")));
            }
            if self.target_count(t) == 0 {
                return Err(Error::config(format!("team {t} has no targets")));
            }
        }

        let mut occupied: BTreeMap<(i32, i32), String> = BTreeMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if !self.in_bounds(o.x, o.y) {
                return Err(Error::config(format!("object {i}: ({}, {}) outside grid", o.x, o.y)));
            }
            if let Some(prev) = occupied.insert((o.x, o.y), format!("object {i}")) {
                return Err(Error::config(format!(
                    "object {i}: placement ({}, {}) overlaps {prev}",
                    o.x, o.y
                )));
            }
        }
        if !self.randomize_spawns {
            for (i, r) in self.robots.iter().enumerate() {
                if let Some(prev) = occupied.insert((r.x, r.y), format!("robot {i}")) {
                    return Err(Error::config(format!(
                        "robot {i}: spawn ({}, {}) overlaps {prev}",
                        r.x, r.y
                    )));
                }
            }
        }

        let mut target_cells: BTreeMap<GridPos, usize> = BTreeMap::new();
        for (i, t) in self.targets.iter().enumerate() {
            if t.team >= teams {
                return Err(Error::config(format!("target {i}: team {} out of range", t.team)));
            }
            if !self.in_bounds(t.x, t.y) || t.level > 1 {
                return Err(Error::config(format!("target {i}: {} outside grid", t.pos())));
            }
            if target_cells.insert(t.pos(), i).is_some() {
                return Err(Error::config(format!("target {i}: duplicate cell {}", t.pos())));
            }
            if t.level == 1 {
                if t.kind != ObjectKind::Block {
                    return Err(Error::config(format!("target {i}: only blocks may sit on level 1")));
                }
                let supported = self.targets.iter().any(|s| {
                    s.team == t.team && s.kind == ObjectKind::Block && s.level == 0 && s.x == t.x && s.y == t.y
                });
                if !supported {
                    return Err(Error::config(format!(
                        "target {i}: level-1 block at {} has no supporting block",
                        t.pos()
                    )));
                }
            }
            if t.kind == ObjectKind::Block && (t.heading.is_some() || t.folded.is_some()) {
                return Err(Error::config(format!("target {i}: blocks take no heading or fold requirement")));
            }
        }

        let count = |kind: ObjectKind| self.objects.iter().filter(|o| o.kind == kind).count();
        let needed = |kind: ObjectKind| self.targets.iter().filter(|t| t.kind == kind).count();
        let (blocks, slopes) = (count(ObjectKind::Block), count(ObjectKind::Slope));
        match self.mode {
            TaskMode::Cooperative => {
                if blocks < needed(ObjectKind::Block) || slopes < needed(ObjectKind::Slope) {
                    return Err(Error::config(format!(
                        "inventory ({blocks} blocks, {slopes} slopes) cannot cover the target"
                    )));
                }
            }
            TaskMode::Competitive => {
                if self.territories.len() != 2 || (0..2).any(|t| self.territory(t).is_none()) {
                    return Err(Error::config("competitive task needs one territory per team"));
                }
                if blocks + 1 != needed(ObjectKind::Block) {
                    return Err(Error::config(format!(
                        "inventory must be one block short: {blocks} blocks for {} target blocks",
                        needed(ObjectKind::Block)
                    )));
                }
                if slopes < needed(ObjectKind::Slope) {
                    return Err(Error::config(format!(
                        "inventory has {slopes} slopes, targets need {}",
                        needed(ObjectKind::Slope)
                    )));
                }
                if self.randomize_spawns {
                    for t in 0..2 {
                        let terr = self.territory(t).expect("checked");
                        let free = (terr.y0..terr.y1)
                            .flat_map(|y| (terr.x0..terr.x1).map(move |x| (x, y)))
                            .filter(|c| !occupied.contains_key(c))
                            .count();
                        if free < self.robots_of_team(t) {
                            return Err(Error::config(format!("territory of team {t} too small for spawns")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub const PRESETS: [&'static str; 5] = [
        "build-character",
        "build-character-desk",
        "fetch-block",
        "two-floor-competition",
        "tpx",
    ];

    pub fn preset(name: &str) -> Result<Self> {
        let spec = match name {
            "build-character" => build_character(),
            "build-character-desk" => build_character_desk(),
            "fetch-block" => fetch_block(),
            "two-floor-competition" => two_floor_competition(),
            "tpx" => tpx(),
            other => {
                return Err(Error::config(format!(
                    "unknown task preset `{other}`; valid presets: {}",
                    Self::PRESETS.join(", ")
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn block(x: i32, y: i32) -> Placement {
    Placement {
        kind: ObjectKind::Block,
        x,
        y,
        heading: Heading::North,
        folded: false,
    }
}

fn slope(x: i32, y: i32, heading: Heading) -> Placement {
    Placement {
        kind: ObjectKind::Slope,
        x,
        y,
        heading,
        folded: true,
    }
}

fn block_target(team: usize, x: i32, y: i32, level: u8) -> TargetPiece {
    TargetPiece {
        team,
        kind: ObjectKind::Block,
        x,
        y,
        level,
        heading: None,
        folded: None,
    }
}

fn spawn(team: usize, x: i32, y: i32, heading: Heading) -> RobotSpawn {
    RobotSpawn { team, x, y, heading }
}

/// Letter "T" from five blocks on a 9×9 floor, two robots.
fn build_character() -> TaskSpec {
    TaskSpec {
        name: "build-character".into(),
        mode: TaskMode::Cooperative,
        width: 9,
        height: 9,
        horizon: 500,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: true,
        robots: vec![spawn(0, 1, 4, Heading::East), spawn(0, 7, 4, Heading::West)],
        objects: (0..5).map(|i| block(2 + i, 7)).collect(),
        targets: [(3, 1), (4, 1), (5, 1), (4, 2), (4, 3)]
            .into_iter()
            .map(|(x, y)| block_target(0, x, y, 0))
            .collect(),
        territories: vec![],
    }
}

/// Smaller "T" used for the workstation-scale experiments.
fn build_character_desk() -> TaskSpec {
    TaskSpec {
        name: "build-character-desk".into(),
        mode: TaskMode::Cooperative,
        width: 7,
        height: 7,
        horizon: 60,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: true,
        robots: vec![spawn(0, 0, 3, Heading::East), spawn(0, 6, 3, Heading::West)],
        objects: (0..5).map(|i| block(1 + i, 5)).collect(),
        targets: [(2, 1), (3, 1), (4, 1), (3, 2), (3, 3)]
            .into_iter()
            .map(|(x, y)| block_target(0, x, y, 0))
            .collect(),
        territories: vec![],
    }
}

/// One robot carries one block to one target on a 5×5 floor.
fn fetch_block() -> TaskSpec {
    TaskSpec {
        name: "fetch-block".into(),
        mode: TaskMode::Cooperative,
        width: 5,
        height: 5,
        horizon: 40,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: true,
        robots: vec![spawn(0, 0, 0, Heading::East)],
        objects: vec![block(1, 3)],
        targets: vec![block_target(0, 3, 1, 0)],
        territories: vec![],
    }
}

/// Two teams race to build a two-floor structure; one block is missing.
fn two_floor_competition() -> TaskSpec {
    let mut targets = Vec::new();
    for (team, y) in [(0usize, 2), (1usize, 9)] {
        targets.push(block_target(team, 4, y, 0));
        targets.push(block_target(team, 5, y, 0));
        targets.push(block_target(team, 4, y, 1));
        targets.push(TargetPiece {
            team,
            kind: ObjectKind::Slope,
            x: 3,
            y,
            level: 0,
            heading: Some(Heading::East),
            folded: Some(false),
        });
    }
    TaskSpec {
        name: "two-floor-competition".into(),
        mode: TaskMode::Competitive,
        width: 9,
        height: 12,
        horizon: 500,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: false,
        robots: vec![
            spawn(0, 1, 0, Heading::South),
            spawn(0, 7, 0, Heading::South),
            spawn(1, 1, 11, Heading::North),
            spawn(1, 7, 11, Heading::North),
        ],
        objects: vec![
            block(2, 4),
            block(6, 4),
            block(2, 7),
            block(6, 7),
            block(4, 5),
            slope(1, 2, Heading::West),
            slope(1, 9, Heading::West),
        ],
        targets,
        territories: vec![
            Territory { team: 0, x0: 0, y0: 0, x1: 9, y1: 6 },
            Territory { team: 1, x0: 0, y0: 6, x1: 9, y1: 12 },
        ],
    }
}

/// The letters "TPX", fifteen blocks and four robots.
fn tpx() -> TaskSpec {
    let cells = [
        (1, 1), (2, 1), (3, 1), (2, 2), (2, 3),
        (6, 1), (7, 1), (6, 2), (7, 2), (6, 3),
        (10, 1), (12, 1), (11, 2), (10, 3), (12, 3),
    ];
    TaskSpec {
        name: "tpx".into(),
        mode: TaskMode::Cooperative,
        width: 14,
        height: 9,
        horizon: 500,
        r_build: 1.0,
        r_completion: 5.0,
        randomize_spawns: true,
        robots: vec![
            spawn(0, 0, 5, Heading::East),
            spawn(0, 13, 5, Heading::West),
            spawn(0, 4, 8, Heading::North),
            spawn(0, 9, 8, Heading::North),
        ],
        objects: (0..15).map(|i| block(i % 14, 6 + i / 14)).collect(),
        targets: cells.into_iter().map(|(x, y)| block_target(0, x, y, 0)).collect(),
        territories: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in TaskSpec::PRESETS {
            TaskSpec::preset(name).unwrap();
        }
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = TaskSpec::preset("tetris").unwrap_err();
        assert_eq!(err.category(), "config");
        assert!(err.to_string().contains("build-character-desk"));
    }

    #[test]
    fn competitive_inventory_must_be_one_block_short() {
        let mut spec = TaskSpec::preset("two-floor-competition").unwrap();
        let blocks = |s: &TaskSpec| s.objects.iter().filter(|o| o.kind == ObjectKind::Block).count();
        // 3 + 3 target blocks, 5 in the inventory
        assert_eq!(blocks(&spec), 5);
        spec.objects.push(block(8, 5));
        assert_eq!(blocks(&spec), 6);
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("inventory must be one block short"), "{err}");
    }

    #[test]
    fn overlapping_placements_name_the_entity() {
        let mut spec = TaskSpec::preset("build-character").unwrap();
        spec.objects.push(block(2, 7));
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("object 5"), "{err}");
    }

    #[test]
    fn target_outside_grid_is_rejected() {
        let mut spec = TaskSpec::preset("fetch-block").unwrap();
        spec.targets[0].x = 5;
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("target 0"), "{err}");
    }

    #[test]
    fn completion_reward_must_dominate() {
        let mut spec = TaskSpec::preset("fetch-block").unwrap();
        spec.r_completion = 1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        for name in TaskSpec::PRESETS {
            let spec = TaskSpec::preset(name).unwrap();
            let back = TaskSpec::from_toml_str(&spec.to_toml_string()).unwrap();
            assert_eq!(spec, back);
        }
    }
}
