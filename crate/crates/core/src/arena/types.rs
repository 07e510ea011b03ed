use serde::{Deserialize, Serialize};
use std::fmt;

/// A cell of the arena. `level` 0 is the ground, 1 is the roof of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPos {
    pub x: i32,
    pub y: i32,
    pub level: u8,
}

impl GridPos {
    pub const fn new(x: i32, y: i32, level: u8) -> Self {
        Self { x, y, level }
    }

    pub const fn ground(x: i32, y: i32) -> Self {
        Self { x, y, level: 0 }
    }

    /// Horizontal neighbour on the same level.
    pub fn step(self, (dx, dy): (i32, i32)) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
            level: self.level,
        }
    }

    pub fn with_level(self, level: u8) -> Self {
        Self { level, ..self }
    }

    pub fn same_column(self, other: GridPos) -> bool {
        self.x == other.x && self.y == other.y
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.level)
    }
}

/// Facing direction. North is towards row 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heading {
    #[serde(rename = "N")]
    North,
    #[serde(rename = "E")]
    East,
    #[serde(rename = "S")]
    South,
    #[serde(rename = "W")]
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }

    pub fn turn_left(self) -> Self {
        Heading::ALL[(self.index() + 3) % 4]
    }

    pub fn turn_right(self) -> Self {
        Heading::ALL[(self.index() + 1) % 4]
    }

    pub fn opposite(self) -> Self {
        Heading::ALL[(self.index() + 2) % 4]
    }

    pub fn glyph(self) -> char {
        match self {
            Heading::North => '^',
            Heading::East => '>',
            Heading::South => 'v',
            Heading::West => '<',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Block,
    Slope,
}

/// The eleven symbolic robot actions, in mask order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    MoveForward,
    MoveBack,
    MoveLeft,
    MoveRight,
    TurnLeft,
    TurnRight,
    Lift,
    Drop,
    Fold,
    Unfold,
    Stop,
}

impl Action {
    pub const COUNT: usize = 11;

    pub const ALL: [Action; Action::COUNT] = [
        Action::MoveForward,
        Action::MoveBack,
        Action::MoveLeft,
        Action::MoveRight,
        Action::TurnLeft,
        Action::TurnRight,
        Action::Lift,
        Action::Drop,
        Action::Fold,
        Action::Unfold,
        Action::Stop,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }

    pub fn is_move(self) -> bool {
        matches!(
            self,
            Action::MoveForward | Action::MoveBack | Action::MoveLeft | Action::MoveRight
        )
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Action::TurnLeft | Action::TurnRight)
    }

    /// Direction of travel for a move action given the robot heading.
    pub fn move_direction(self, heading: Heading) -> Option<Heading> {
        match self {
            Action::MoveForward => Some(heading),
            Action::MoveBack => Some(heading.opposite()),
            Action::MoveLeft => Some(heading.turn_left()),
            Action::MoveRight => Some(heading.turn_right()),
            _ => None,
        }
    }
}

/// Per-agent validity vector over the eleven actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionMask {
    pub allowed: [bool; Action::COUNT],
}

impl ActionMask {
    pub fn all() -> Self {
        Self {
            allowed: [true; Action::COUNT],
        }
    }

    pub fn stop_only() -> Self {
        let mut allowed = [false; Action::COUNT];
        allowed[Action::Stop.index()] = true;
        Self { allowed }
    }

    pub fn is_allowed(&self, action: Action) -> bool {
        self.allowed[action.index()]
    }

    pub fn set(&mut self, action: Action, allowed: bool) {
        self.allowed[action.index()] = allowed || action == Action::Stop;
    }

    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|a| **a).count()
    }

    pub fn iter_allowed(&self) -> impl Iterator<Item = Action> + '_ {
        Action::ALL.into_iter().filter(|a| self.is_allowed(*a))
    }

    /// Replaces a disallowed action with `Stop`.
    pub fn enforce(&self, action: Action) -> Action {
        if self.is_allowed(action) {
            action
        } else {
            Action::Stop
        }
    }

    pub fn is_subset_of(&self, other: &ActionMask) -> bool {
        self.allowed
            .iter()
            .zip(other.allowed.iter())
            .all(|(a, b)| !*a || *b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: usize,
    pub kind: ObjectKind,
    pub pos: GridPos,
    pub heading: Heading,
    pub folded: bool,
    pub carried_by: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotState {
    pub id: usize,
    pub team: usize,
    pub pos: GridPos,
    pub heading: Heading,
    pub carrying: Option<usize>,
    pub under_block: bool,
    pub in_slope: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_are_inverse() {
        for h in Heading::ALL {
            assert_eq!(h.turn_left().turn_right(), h);
            assert_eq!(h.turn_left().turn_left(), h.opposite());
        }
    }

    #[test]
    fn eleven_distinct_actions() {
        let mut seen = std::collections::BTreeSet::new();
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert!(seen.insert(*a));
        }
        assert_eq!(seen.len(), 11);
    }

    #[test]
    fn stop_cannot_be_masked() {
        let mut m = ActionMask::all();
        m.set(Action::Stop, false);
        assert!(m.is_allowed(Action::Stop));
        assert_eq!(ActionMask::stop_only().enforce(Action::Lift), Action::Stop);
    }
}
