use crate::arena::Action;
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One row of the duration table. `None` fields match anything; the most
/// specific matching row wins, ties going to the earlier row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev: Option<Action>,
    pub cur: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrying: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_slope: Option<bool>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MotionContext {
    pub carrying: bool,
    pub on_slope: bool,
}

/// Action execution times for the asynchronous simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationModel {
    #[serde(default)]
    pub entries: Vec<DurationEntry>,
    /// Used when no row matches.
    pub default_seconds: f64,
    /// Half-width of the multiplicative uniform noise.
    pub jitter: f64,
}

fn row(prev: Option<Action>, cur: Action, seconds: f64) -> DurationEntry {
    DurationEntry {
        prev,
        cur,
        carrying: None,
        on_slope: None,
        seconds,
    }
}

impl Default for DurationModel {
    /// Straight moves take 1.0 s from rest and 0.7 s when continuing the same
    /// move; sideways 1.1 s, turns 1.2 s, lift/drop 1.5 s, fold/unfold 2.0 s,
    /// stop 0.3 s; 10% jitter.
    fn default() -> Self {
        use Action::*;
        let mut entries = vec![
            row(None, MoveForward, 1.0),
            row(Some(MoveForward), MoveForward, 0.7),
            row(None, MoveBack, 1.0),
            row(Some(MoveBack), MoveBack, 0.7),
        ];
        for (a, s) in [
            (MoveLeft, 1.1),
            (MoveRight, 1.1),
            (TurnLeft, 1.2),
            (TurnRight, 1.2),
            (Lift, 1.5),
            (Drop, 1.5),
            (Fold, 2.0),
            (Unfold, 2.0),
            (Stop, 0.3),
        ] {
            entries.push(row(None, a, s));
        }
        Self {
            entries,
            default_seconds: 1.0,
            jitter: 0.1,
        }
    }
}

impl DurationModel {
    /// Every action takes `seconds`, no jitter.
    pub fn constant(seconds: f64) -> Self {
        Self {
            entries: Vec::new(),
            default_seconds: seconds,
            jitter: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0;
        if !positive(self.default_seconds) || !self.entries.iter().all(|e| positive(e.seconds)) {
            return Err(Error::config("durations must be positive"));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::config(format!("jitter {} outside [0, 1)", self.jitter)));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let model: DurationModel =
            toml::from_str(text).map_err(|e| Error::config(format!("duration model: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Noise-free duration. `prev` is the robot's last executed action
    /// (`None` at rest).
    pub fn base(&self, prev: Option<Action>, cur: Action, ctx: MotionContext) -> f64 {
        let mut best: Option<(usize, f64)> = None;
        for e in &self.entries {
            if e.cur != cur {
                continue;
            }
            let matches = e.prev.is_none_or(|p| Some(p) == prev)
                && e.carrying.is_none_or(|c| c == ctx.carrying)
                && e.on_slope.is_none_or(|s| s == ctx.on_slope);
            if !matches {
                continue;
            }
            let score = usize::from(e.prev.is_some())
                + usize::from(e.carrying.is_some())
                + usize::from(e.on_slope.is_some());
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, e.seconds));
            }
        }
        best.map_or(self.default_seconds, |(_, s)| s)
    }

    /// Mean fresh-start duration over the eleven actions; converts a step
    /// horizon into a wall-clock horizon.
    pub fn mean_step_duration(&self) -> f64 {
        Action::ALL
            .iter()
            .map(|a| self.base(None, *a, MotionContext::default()))
            .sum::<f64>()
            / Action::COUNT as f64
    }
}

/// Base duration scaled by `1 + u`, `u ~ U[-jitter, jitter]`. Draws nothing
/// from `rng` when jitter is zero.
pub fn duration_of<R: Rng + ?Sized>(
    model: &DurationModel,
    prev: Option<Action>,
    cur: Action,
    ctx: MotionContext,
    rng: &mut R,
) -> f64 {
    let base = model.base(prev, cur, ctx);
    if model.jitter > 0.0 {
        base * (1.0 + rng.random_range(-model.jitter..=model.jitter))
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn noiseless() -> DurationModel {
        DurationModel {
            jitter: 0.0,
            ..DurationModel::default()
        }
    }

    #[test]
    fn continuing_forward_is_faster() {
        let m = noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ctx = MotionContext::default();
        let cont = duration_of(&m, Some(Action::MoveForward), Action::MoveForward, ctx, &mut rng);
        let fresh = duration_of(&m, Some(Action::Stop), Action::MoveForward, ctx, &mut rng);
        assert_eq!(cont, 0.7);
        assert_eq!(fresh, 1.0);
        for prev in [None, Some(Action::Stop), Some(Action::TurnLeft), Some(Action::TurnRight)] {
            for a in [Action::MoveForward, Action::MoveBack] {
                assert!(m.base(Some(a), a, ctx) < m.base(prev, a, ctx));
            }
        }
    }

    #[test]
    fn zero_jitter_is_deterministic() {
        let m = noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for prev in Action::ALL {
            for cur in Action::ALL {
                let a = duration_of(&m, Some(prev), cur, MotionContext::default(), &mut rng);
                let b = duration_of(&m, Some(prev), cur, MotionContext::default(), &mut rng);
                assert_eq!(a, b);
                assert!(a > 0.0);
            }
        }
    }

    #[test]
    fn jitter_mean_matches_base() {
        let m = DurationModel {
            jitter: 0.2,
            ..DurationModel::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| duration_of(&m, None, Action::Lift, MotionContext::default(), &mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.5).abs() / 1.5 < 0.01, "mean {mean}");
    }

    #[test]
    fn context_rows_are_more_specific() {
        let mut m = noiseless();
        m.entries.push(DurationEntry {
            prev: None,
            cur: Action::MoveForward,
            carrying: Some(true),
            on_slope: None,
            seconds: 1.3,
        });
        let carrying = MotionContext { carrying: true, on_slope: false };
        assert_eq!(m.base(None, Action::MoveForward, carrying), 1.3);
        assert_eq!(m.base(None, Action::MoveForward, MotionContext::default()), 1.0);
    }

    #[test]
    fn toml_round_trip() {
        let m = DurationModel::default();
        let text = toml::to_string(&m).unwrap();
        assert_eq!(DurationModel::from_toml_str(&text).unwrap(), m);
    }
}
