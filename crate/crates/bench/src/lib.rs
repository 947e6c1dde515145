//! Experiment harness for surrogate-based optimisation benchmarks.
//!
//! [`harness::run_experiment`] runs solvers from `surrobench-core` on a
//! [`problem::Problem`] and writes one CSV plus JSON sidecar per run
//! ([`format`]). [`analyze`] and [`report`] turn a directory of such logs
//! into curves, significance tests, AUC scores, replay grids, a rules tree
//! and offline surrogate errors.

pub mod analyze;
pub mod cli;
pub mod format;
pub mod harness;
pub mod problem;
pub mod report;

pub use format::{load_dir, read_run, write_run, FormatError};
pub use harness::{run_experiment, run_one, run_seed, ExperimentConfig, RunOutput};
pub use problem::{Problem, ProblemSpec, TimeMode};
