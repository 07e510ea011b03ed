use crate::arena::{read_lines, write_line, Line, StateRecord, TaskSpec, Trajectory, WorldState};
use crate::error::{Error, Result};
use crate::train::StartDistribution;
use rand::seq::index;
use rand::Rng;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

/// A harvested start state and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestedState {
    pub source_trajectory: usize,
    pub segment: usize,
    pub decision_time: Option<f64>,
    pub state: WorldState,
}

/// States harvested from deployment rollouts, mixed into the training
/// start distribution with probability `p_ood`.
#[derive(Debug, Clone, PartialEq)]
pub struct StartStateSet {
    pub task: Arc<TaskSpec>,
    pub n_traj: usize,
    pub n_segments: usize,
    pub p_ood: f64,
    pub states: Vec<HarvestedState>,
}

/// First record index of each of `n_segments` contiguous parts of a
/// sequence of length `len`. Parts differ in size by at most one, the larger
/// ones first.
pub fn segment_starts(len: usize, n_segments: usize) -> Vec<usize> {
    let (base, extra) = (len / n_segments, len % n_segments);
    let mut starts = Vec::with_capacity(n_segments);
    let mut at = 0;
    for i in 0..n_segments {
        starts.push(at);
        at += base + usize::from(i < extra);
    }
    starts
}

/// Samples `n_traj` distinct trajectories long enough to split, cuts each
/// into `n_segments` parts and keeps the first state of every part.
pub fn build_start_state_set<R: Rng + ?Sized>(
    trajectories: &[Trajectory],
    n_traj: usize,
    n_segments: usize,
    p_ood: f64,
    rng: &mut R,
) -> Result<StartStateSet> {
    if n_traj == 0 || n_segments == 0 {
        return Err(Error::config("n_traj and n_segments must be positive"));
    }
    let usable: Vec<&Trajectory> = trajectories.iter().filter(|t| t.records.len() >= n_segments).collect();
    if usable.len() < n_traj {
        return Err(Error::config(format!(
            "{} of {} trajectories have at least {n_segments} records; {n_traj} needed",
            usable.len(),
            trajectories.len()
        )));
    }
    let task = usable[0].task.clone();
    let mut states = Vec::with_capacity(n_traj * n_segments);
    for i in index::sample(rng, usable.len(), n_traj) {
        let traj = usable[i];
        for (segment, start) in segment_starts(traj.records.len(), n_segments).into_iter().enumerate() {
            let rec = &traj.records[start];
            states.push(HarvestedState {
                source_trajectory: traj.id,
                segment,
                decision_time: rec.time,
                state: rec.state.clone(),
            });
        }
    }
    let set = StartStateSet { task, n_traj, n_segments, p_ood, states };
    set.validate()?;
    Ok(set)
}

impl StartStateSet {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_ood) {
            return Err(Error::config(format!("p_ood {} outside [0, 1]", self.p_ood)));
        }
        if self.states.is_empty() && self.p_ood > 0.0 {
            return Err(Error::config("empty start-state set with p_ood > 0"));
        }
        for h in &self.states {
            h.state.validate()?;
        }
        Ok(())
    }

    /// The task's own initialisation mixed with this set.
    pub fn start_distribution(&self) -> StartDistribution {
        StartDistribution {
            task: self.task.clone(),
            extra: Arc::new(self.states.iter().map(|h| h.state.clone()).collect()),
            p_extra: self.p_ood,
        }
    }

    /// Writes a provenance header line followed by one line per state.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        write_line(
            w,
            &Line::StartStateSet {
                n_traj: self.n_traj,
                n_segments: self.n_segments,
                p_ood: self.p_ood,
                task: (*self.task).clone(),
            },
        )?;
        for h in &self.states {
            write_line(
                w,
                &Line::StartState {
                    source_trajectory: h.source_trajectory,
                    segment: h.segment,
                    decision_time: h.decision_time,
                    state: StateRecord::from_state(&h.state),
                },
            )?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut set: Option<StartStateSet> = None;
        for (n, line) in read_lines(r)? {
            let parse = |msg: String| Error::Parse { line: n, msg };
            match line {
                Line::StartStateSet { n_traj, n_segments, p_ood, task } => {
                    if set.is_some() {
                        return Err(parse("second start-state header".into()));
                    }
                    set = Some(StartStateSet { task: Arc::new(task), n_traj, n_segments, p_ood, states: Vec::new() });
                }
                Line::StartState { source_trajectory, segment, decision_time, state } => {
                    let s = set.as_mut().ok_or_else(|| parse("start state before header".into()))?;
                    let state = state.into_state(s.task.clone()).map_err(|e| parse(e.to_string()))?;
                    s.states.push(HarvestedState { source_trajectory, segment, decision_time, state });
                }
                _ => return Err(parse("trajectory record in a start-state file".into())),
            }
        }
        let set = set.ok_or_else(|| Error::Parse { line: 0, msg: "missing start-state header".into() })?;
        set.validate()?;
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// One draw from the mixed start distribution: with probability `p_ood` a
/// uniformly chosen harvested state (its step counter reset), otherwise a
/// fresh initialisation of the task.
pub fn sample_start_state<R: Rng + ?Sized>(set: &StartStateSet, rng: &mut R) -> Result<WorldState> {
    if set.states.is_empty() && set.p_ood > 0.0 {
        return Err(Error::config("empty start-state set with p_ood > 0"));
    }
    set.start_distribution().sample(rng)
}
