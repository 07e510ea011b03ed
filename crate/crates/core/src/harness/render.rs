//! Text frames of recorded episodes.
//!
//! Every cell is three characters. The first is what rests there: `.` empty,
//! `+` empty target cell, `#` block, `S` unfolded slope, `s` folded slope.
//! The second and third show a robot as its team letter (lowercase while
//! carrying) and heading glyph, or a resting slope's heading. North is up.
//! The ground level is drawn on the left and the roof level on the right.

use crate::arena::{GridPos, ObjectKind, Trajectory, WorldState};

fn team_letter(team: usize, carrying: bool) -> char {
    let c = (b'A' + (team % 26) as u8) as char;
    if carrying {
        c.to_ascii_lowercase()
    } else {
        c
    }
}

fn cell(state: &WorldState, pos: GridPos) -> String {
    let obj = state.object_at(pos);
    let first = match obj {
        Some(o) if o.kind == ObjectKind::Block => '#',
        Some(o) if o.folded => 's',
        Some(_) => 'S',
        None if state.task.targets.iter().any(|t| t.pos() == pos) => '+',
        None => '.',
    };
    let rest = match (state.robot_at(pos), obj) {
        (Some(r), _) => [team_letter(r.team, r.carrying.is_some()), r.heading.glyph()],
        (None, Some(o)) if o.kind == ObjectKind::Slope => [' ', o.heading.glyph()],
        _ => [' ', ' '],
    };
    [first, rest[0], rest[1]].iter().collect()
}

/// Both levels of `state`, one text line per grid row.
pub fn render_state(state: &WorldState) -> String {
    let grid_width = (state.width * 4 - 1) as usize;
    let mut out = format!("{:<grid_width$}   level 1\n", "level 0");
    for y in 0..state.height {
        let row = |level: u8| {
            (0..state.width)
                .map(|x| cell(state, GridPos::new(x, y, level)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("{}   {}\n", row(0), row(1)));
    }
    out
}

/// One frame per decision record followed by the final state; nothing for
/// an episode without records.
pub fn render_trajectory(traj: &Trajectory) -> Vec<String> {
    if traj.records.is_empty() {
        return Vec::new();
    }
    let mut frames = Vec::with_capacity(traj.records.len() + 1);
    for (i, rec) in traj.records.iter().enumerate() {
        let mut head = format!("trajectory {} frame {}", traj.id, i);
        if let Some(t) = rec.time {
            head.push_str(&format!("  t={t:.3}"));
        }
        if let Some(r) = rec.robot {
            head.push_str(&format!("  robot {r}"));
        }
        head.push_str(&format!("  step {}  progress {:?}\n", rec.state.step_count, rec.state.progress));
        frames.push(head + &render_state(&rec.state));
    }
    let winner = traj
        .outcome
        .winner
        .map_or("none".to_string(), |t| team_letter(t, false).to_string());
    let returns: Vec<String> = traj.outcome.returns.iter().map(|r| format!("{r:.2}")).collect();
    frames.push(format!(
        "trajectory {} end  step {}  winner {}  returns [{}]\n{}",
        traj.id,
        traj.final_state.step_count,
        winner,
        returns.join(", "),
        render_state(&traj.final_state)
    ));
    frames
}

/// Every frame of every trajectory, separated by blank lines.
pub fn render_all(trajs: &[Trajectory]) -> String {
    trajs
        .iter()
        .flat_map(render_trajectory)
        .collect::<Vec<_>>()
        .join("\n")
}
