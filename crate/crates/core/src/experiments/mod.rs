//! Batch harness: configuration, multi-seed execution, per-run trace and
//! front files, summaries, comparison tables and plot-ready curves.
//!
//! Repeat `i` of an experiment uses seed `seed + i`; repeats run in parallel
//! (worker count from `PDNS_WORKERS`) but each run is sequential, so outputs
//! depend only on benchmark, configuration and seed.

mod compare;
mod config;
mod context;
mod files;
mod plot;
mod runner;

pub use compare::{compare_experiments, ExperimentComparison, PairedComparison};
pub use config::{default_generations, Algorithm, RunConfig, GENERATIONS_LARGE, GENERATIONS_SMALL, LARGE_SPACE};
pub use context::{IndicatorContext, IndicatorSettings};
pub use files::{
    write_atomic, ExperimentSummary, FrontFile, FrontPoint, MeanStd, RunMeta, RunRecord, RunTrace, TraceRow, FRONT_TAG,
    SUMMARY_TAG, TRACE_TAG,
};
pub use plot::{emit_plot_data, CurvePoint, PlotData};
pub use runner::{describe, run_experiment, workers_from_env, Experiment, RunResult, WORKERS_ENV};
