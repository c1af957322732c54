//! Monte Carlo harness: deterministic parallel replications, aggregation,
//! CSV and SVG output.

mod config;
mod experiments;
mod output;
mod plot;
mod simulate;
pub mod stats;

pub use config::{ExperimentConfig, InstanceSpec, DEFAULT_ALPHAS};
pub use experiments::{
    clip_time_experiment, predict_clip_rows, variance_comparison, with_workers, ClipRow, ComparisonCell,
    ExperimentResult, PredictionRow,
};
pub use output::{
    emit_csv, write_clip_csv, write_comparison_csv, write_prediction_csv, CLIP_COLUMNS, COMPARISON_COLUMNS,
    PREDICTION_COLUMNS,
};
pub use plot::{clip_ratio_svg, emit_plots, variance_svg};
pub use simulate::{run_replication, simulate, Replication, ReplicationSummary};
