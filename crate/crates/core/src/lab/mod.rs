//! Monte Carlo lab: seeded experiment suites over random shortest path
//! metrics, with summary statistics and pass/fail checks.

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::graphs::GraphError;
use crate::heuristics::HeuristicError;

pub mod config;
pub mod report;
pub mod runner;
pub mod stats;
pub mod suites;

pub use config::{Caps, ExperimentConfig, GraphModel, OutputFormat, RatioKind, SuiteId, TwoOptStart};
pub use report::{Check, NamedStat, Report};
pub use runner::{run_trials, summarize, TrialRecord, TrialSet};
pub use stats::{dkw_half_width, ks_distance, SummaryStats, Z_99};
pub use suites::run_suite;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("no eligible trials for the requested statistic")]
    EmptySelection,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}
