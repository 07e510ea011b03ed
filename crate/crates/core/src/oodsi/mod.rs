//! Out-of-distribution state initialization: collect asynchronous rollouts
//! of synchronously trained teams, harvest start states from them, and
//! retrain with those states mixed into the start distribution.

mod collect;
mod pipeline;
mod startset;

pub use collect::{collect_ood_trajectories, sync_visits, CollectSettings};
pub use pipeline::{
    oodsi_pipeline, oodsi_pipeline_from, report_tsv, train_phase, PhaseReport, PipelineConfig, PipelineOutcome,
    REPORT_HEADER,
};
pub use startset::{build_start_state_set, sample_start_state, segment_starts, HarvestedState, StartStateSet};
