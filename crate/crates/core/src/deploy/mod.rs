//! Asynchronous continuous-time deployment simulator: per-action durations,
//! per-robot decision clocks, projection of in-flight actions onto the
//! discrete arena, and out-of-distribution state detection.

mod duration;
mod episode;
mod ood;

pub use duration::{duration_of, DurationEntry, DurationModel, MotionContext};
pub use episode::{project, run_async_episode, AsyncConfig, InFlight};
pub use ood::{detect_ood, ood_fraction, VisitSet};
