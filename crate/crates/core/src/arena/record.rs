//! Line-delimited JSON trajectory and state records.
//!
//! Every line is one JSON object whose `record` field names its type:
//!
//! ```text
//! {"record":"trajectory","id":..,"source":"sync"|"async","task":{..}}
//! {"record":"step","time":..,"robot":..,"state":{..},"actions":[..],"rewards":[..],"replaced":[..]}
//! ...
//! {"record":"end","outcome":{..},"state":{..}}
//! ```
//!
//! A `state` object lists, in order: `step`, `width`, `height`, `progress`,
//! `robots` (`id`, `team`, `pos` {`x`,`y`,`level`}, `heading`, `carrying`,
//! `under_block`, `in_slope`) and `objects` (`id`, `kind`, `pos`, `heading`,
//! `folded`, `carried_by`). Floats are written in shortest round-trip form,
//! so reading a file back reproduces every value exactly.

use super::state::WorldState;
use super::task::TaskSpec;
use super::types::{Action, ObjectState, RobotState};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub step: usize,
    pub width: i32,
    pub height: i32,
    pub progress: Vec<usize>,
    pub robots: Vec<RobotState>,
    pub objects: Vec<ObjectState>,
}

impl StateRecord {
    pub fn from_state(state: &WorldState) -> Self {
        Self {
            step: state.step_count,
            width: state.width,
            height: state.height,
            progress: state.progress.clone(),
            robots: state.robots.clone(),
            objects: state.objects.clone(),
        }
    }

    pub fn into_state(self, task: Arc<TaskSpec>) -> Result<WorldState> {
        if self.width != task.width || self.height != task.height {
            return Err(Error::config(format!(
                "state grid {}x{} does not match task {}x{}",
                self.width, self.height, task.width, task.height
            )));
        }
        let state = WorldState {
            width: self.width,
            height: self.height,
            robots: self.robots,
            objects: self.objects,
            step_count: self.step,
            task,
            progress: self.progress,
        };
        state.validate()?;
        Ok(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Sync,
    Async,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    /// Team that completed its target, if any.
    pub winner: Option<usize>,
    /// Joint resolutions executed.
    pub steps: usize,
    /// Wall-clock end time for asynchronous episodes.
    pub end_time: Option<f64>,
    pub returns: Vec<f64>,
}

impl EpisodeOutcome {
    pub fn success(&self) -> bool {
        self.winner.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Decision time in seconds (asynchronous episodes only).
    pub time: Option<f64>,
    /// Deciding robot (asynchronous episodes only).
    pub robot: Option<usize>,
    pub state: WorldState,
    /// Joint action (sync) or in-flight actions at the decision (async).
    pub actions: Vec<Option<Action>>,
    pub rewards: Vec<f64>,
    pub replaced: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: usize,
    pub source: Source,
    pub task: Arc<TaskSpec>,
    pub records: Vec<TrajectoryRecord>,
    pub outcome: EpisodeOutcome,
    pub final_state: WorldState,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub(crate) enum Line {
    Trajectory {
        id: usize,
        source: Source,
        task: TaskSpec,
    },
    Step {
        time: Option<f64>,
        robot: Option<usize>,
        state: StateRecord,
        actions: Vec<Option<Action>>,
        rewards: Vec<f64>,
        replaced: Vec<bool>,
    },
    End {
        outcome: EpisodeOutcome,
        state: StateRecord,
    },
    StartStateSet {
        n_traj: usize,
        n_segments: usize,
        p_ood: f64,
        task: TaskSpec,
    },
    StartState {
        source_trajectory: usize,
        segment: usize,
        decision_time: Option<f64>,
        state: StateRecord,
    },
}

pub(crate) fn write_line<W: Write>(w: &mut W, line: &Line) -> Result<()> {
    serde_json::to_writer(&mut *w, line).map_err(|e| Error::contract(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Parses non-empty lines, tagging errors with their 1-based line number.
pub(crate) fn read_lines<R: BufRead>(r: R) -> Result<Vec<(usize, Line)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push((i + 1, parsed));
    }
    Ok(out)
}

pub fn write_trajectory<W: Write>(w: &mut W, traj: &Trajectory) -> Result<()> {
    write_line(
        w,
        &Line::Trajectory {
            id: traj.id,
            source: traj.source,
            task: (*traj.task).clone(),
        },
    )?;
    for rec in &traj.records {
        write_line(
            w,
            &Line::Step {
                time: rec.time,
                robot: rec.robot,
                state: StateRecord::from_state(&rec.state),
                actions: rec.actions.clone(),
                rewards: rec.rewards.clone(),
                replaced: rec.replaced.clone(),
            },
        )?;
    }
    write_line(
        w,
        &Line::End {
            outcome: traj.outcome.clone(),
            state: StateRecord::from_state(&traj.final_state),
        },
    )
}

/// Reads every trajectory in a stream.
pub fn read_trajectories<R: BufRead>(r: R) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    let mut current: Option<(usize, Source, Arc<TaskSpec>, Vec<TrajectoryRecord>)> = None;
    let parse_err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let state_err = |line: usize| move |e: Error| Error::Parse {
        line,
        msg: e.to_string(),
    };
    for (n, line) in read_lines(r)? {
        match line {
            Line::Trajectory { id, source, task } => {
                if current.is_some() {
                    return Err(parse_err(n, "trajectory header before previous end"));
                }
                current = Some((id, source, Arc::new(task), Vec::new()));
            }
            Line::Step {
                time,
                robot,
                state,
                actions,
                rewards,
                replaced,
            } => {
                let (_, _, task, records) = current
                    .as_mut()
                    .ok_or_else(|| parse_err(n, "step record outside a trajectory"))?;
                records.push(TrajectoryRecord {
                    time,
                    robot,
                    state: state.into_state(task.clone()).map_err(state_err(n))?,
                    actions,
                    rewards,
                    replaced,
                });
            }
            Line::End { outcome, state } => {
                let (id, source, task, records) = current
                    .take()
                    .ok_or_else(|| parse_err(n, "end record outside a trajectory"))?;
                let final_state = state.into_state(task.clone()).map_err(state_err(n))?;
                out.push(Trajectory {
                    id,
                    source,
                    task,
                    records,
                    outcome,
                    final_state,
                });
            }
            Line::StartStateSet { .. } | Line::StartState { .. } => {
                return Err(parse_err(n, "start-state record in a trajectory file"));
            }
        }
    }
    if current.is_some() {
        return Err(Error::Parse {
            line: 0,
            msg: "trajectory without end record".into(),
        });
    }
    Ok(out)
}

/// Writes a single state as one line.
pub fn state_to_line(state: &WorldState) -> String {
    serde_json::to_string(&StateRecord::from_state(state)).expect("state serializes")
}

pub fn state_from_line(line: &str, task: Arc<TaskSpec>) -> Result<WorldState> {
    let rec: StateRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    rec.into_state(task)
}
