//! Experiment orchestration: episode loops, regret accounting, multi-seed
//! sweeps, CSV persistence, checkpoints and reports.

mod checkpoint;
mod config;
mod experiment;
mod report;
mod stats;
mod sweep;

use std::path::Path;

use thiserror::Error;

pub use checkpoint::{checkpoint_path, Checkpoint};
pub use config::{load_configs, EnvRef, ExperimentConfig, RegretMode};
pub use experiment::{
    optimal_values, run_experiment, Experiment, ExperimentResult, RegretCurve, RegretPoint,
};
pub use report::{
    load_runs, render_svg, write_report, ReportError, ReportFiles, REPORT_SUMMARY, REPORT_SVG,
};
pub use stats::{mean_se, slope_estimate, summarize, Summary, SLOPE_WINDOW};
pub use sweep::{
    parse_curve_csv, read_curve_csv, run_csv_name, sweep, threads_from_env, write_curve_csv,
    RunFailure, SweepOutcome, ERRORS_CSV, SUMMARY_CSV, THREADS_ENV,
};

use crate::episode::EpisodeError;
use crate::learners::LearnerError;
use crate::planning::PlanError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("environment: {0}")]
    Env(String),
    #[error("planning for episode {k}: {source}")]
    Plan { k: usize, source: PlanError },
    #[error("learner at episode {k}: {source}")]
    Learner { k: usize, source: LearnerError },
    #[error("episode {k}: {source}")]
    Episode { k: usize, source: EpisodeError },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: String, msg: String },
    #[error("slope needs K >= 100, got {0}")]
    TooFewEpisodes(usize),
    #[error("slope undefined: fewer than two positive regret values in the window")]
    UndefinedSlope,
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}
