//! Core of the `surrobench` suite for benchmarking surrogate-based
//! optimisation of expensive black-box functions.
//!
//! Everything in this crate is pure computation over `alloc` collections:
//!
//! * [`space`]: typed mixed-variable search spaces (continuous, integer,
//!   categorical, conditional) and points within them.
//! * [`record`]: per-iteration evaluation records and run logs.
//! * [`rng`]: the counter-based generator every run is seeded from.
//! * [`problems`]: proxy objective functions with the penalty contracts of
//!   the four benchmark families.
//! * [`surrogates`]: regression models used online by solvers and offline by
//!   the model-quality protocol.
//! * [`solvers`]: the suggest/observe loop for the solver portfolio.
//! * [`analysis`]: normalised curves, t-tests, AUC, budget replay, rules
//!   trees and offline evaluation.
//!
//! Wall-clock timing, sleeping, subprocesses, files and the CLI live in the
//! `surrobench` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod linalg;
pub mod math;
pub mod problems;
pub mod record;
pub mod rng;
pub mod solvers;
pub mod space;
pub mod surrogates;

pub use record::{best_so_far, EvaluationRecord, Phase, RunHeader, RunLog, RunStatus};
pub use rng::Rng;
pub use space::{sample_uniform, validate_point, Point, SearchSpace, Value, VarKind, VariableSpec};
