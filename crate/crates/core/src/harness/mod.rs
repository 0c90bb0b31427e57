//! Experiment orchestration: typed run configuration, the parallel trial
//! runner with its CSV output, and log–log scaling fits over the summaries.

pub mod config;
pub mod fit;
pub mod run;

pub use config::{Experiment, ExperimentConfig};
pub use fit::{fit_scaling, linear_regression, FitResult};
pub use run::{
    agg_path, oracle_scaling_2d, read_agg_csv, replicate_case2, run_experiment, stream_id,
    write_agg_csv, write_trials_csv, AggRow, RunOutput, TrialRow,
};
