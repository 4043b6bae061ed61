//! Experiment grids over (policy × corruption level × repetition), with
//! record files, error summaries and cumulative-error curves.

mod config;
mod records;
mod runner;
mod summary;

pub use config::{ExperimentConfig, DEFAULT_LEVELS, DEFAULT_PASSES, ENV_PREFIX, KEYS};
pub use records::{read_records, write_records, RoundRecord, RunId, RECORD_HEADER};
pub use runner::{
    cells_for, env_stream, mean_tail_noncontextual_share, metadata_path, policy_stream, records_path, run_cell,
    run_experiment, run_outcomes, run_to_dir, Cell, CellOutcome, PreparedData, RunReport,
};
pub use summary::{
    curves_dir, emit_curves, mean_std, record_files, summarize, summarize_by_level, summarize_dir, summary_csv,
    CurveAccumulator, LevelSummary, SummaryAccumulator, SummaryRow,
};
