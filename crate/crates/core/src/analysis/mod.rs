//! Post-hoc analysis of run logs.
//!
//! All functions here are pure: they take logs (or numbers extracted from
//! them) and return plain data that the companion crate renders as CSV or
//! JSON.

mod auc;
mod curves;
mod offline;
mod replay;
mod rules;
mod ttest;

use alloc::string::String;

pub use auc::{auc, AucScore};
pub use curves::{baseline_anchors, normalize_curves, normalize_value, NormalisedCurve};
pub use offline::{offline_eval, test_set, OfflineResult};
pub use replay::{labelled_cells, log_grid, replay, run_outcome, ReplayCell, ReplayGrid, RunOutcome, BUDGET_RANGE, EVAL_TIME_RANGE};
pub use rules::{fit_rules_tree, RuleNode, RuleSample, RulesFit, RulesTree, FEATURE_NAMES, MAX_DEPTH, MAX_LEAVES};
pub use ttest::{pairwise_ttest, student_t_sf, TTest};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("degenerate baseline")]
    DegenerateBaseline,
    #[error("no logs for baseline solver `{0}`")]
    MissingBaseline(String),
    #[error("log of `{solver}` has {got} records, need at least {need}")]
    ShortLog { solver: String, need: usize, got: usize },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("best and worst objective coincide")]
    DegenerateRange,
    #[error("empty {0} list")]
    EmptyAxis(&'static str),
    #[error("no logs")]
    NoLogs,
    #[error(transparent)]
    Fit(#[from] crate::surrogates::FitError),
}
