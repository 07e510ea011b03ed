//! Experiment front end: configuration, the train/eval/collect/replay/report
//! commands, ablation drivers and report tables.

mod ablation;
mod commands;
mod config;
mod render;
mod report;

pub use ablation::{
    censored_median, run_ablation, run_masking_ablation, steps_to_reach, AblationResult, MaskingOutcome, SeedOutcome,
};
pub use commands::{cmd_collect, cmd_eval, cmd_replay, cmd_report, cmd_train, Collected, EVAL_SEED_OFFSET};
pub use config::{ExperimentConfig, Method, MethodConfig};
pub use render::{render_all, render_state, render_trajectory};
pub use report::{make_report, parse_tsv, sort_rows, to_text, to_tsv, ResultRow, TSV_HEADER};
