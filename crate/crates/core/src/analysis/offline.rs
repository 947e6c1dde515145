//! Offline surrogate evaluation.
//!
//! For every run of the gathering solver a model is trained on that run's
//! first `train_len` records (random initial points included). All models
//! are tested on one shared set: the records of every run of every solver,
//! sorted by objective (stable, so earlier logs win ties) and truncated to
//! the `test_keep` best.

use alloc::string::String;
use alloc::vec::Vec;

use super::AnalysisError;
use crate::math;
use crate::record::RunLog;
use crate::space::{Point, SearchSpace};
use crate::surrogates::{mae, FitError, SurrogateModel};

#[derive(Clone, Debug, PartialEq)]
pub struct OfflineResult {
    pub gathering_solver: String,
    pub runs: usize,
    pub train_mae: Vec<f64>,
    pub test_mae: Vec<f64>,
    pub train_mae_mean: f64,
    pub train_mae_std: f64,
    pub test_mae_mean: f64,
    pub test_mae_std: f64,
    pub test_size: usize,
    /// Fewer than `test_keep` points existed, so all were used.
    pub test_truncated: bool,
}

/// The `keep` lowest-objective records across all logs.
pub fn test_set(logs: &[RunLog], keep: usize) -> Vec<(Point, f64)> {
    let mut all: Vec<(Point, f64)> =
        logs.iter().flat_map(|l| l.records.iter().map(|r| (r.point.clone(), r.objective))).collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1));
    all.truncate(keep);
    all
}

pub fn offline_eval<F>(
    logs: &[RunLog],
    gathering_solver: &str,
    train_len: usize,
    test_keep: usize,
    mut fit: F,
) -> Result<OfflineResult, AnalysisError>
where
    F: FnMut(&SearchSpace, &[(Point, f64)]) -> Result<SurrogateModel, FitError>,
{
    let gathering: Vec<&RunLog> = logs.iter().filter(|l| l.header.solver_id == gathering_solver).collect();
    if gathering.is_empty() {
        return Err(AnalysisError::MissingBaseline(gathering_solver.into()));
    }
    let test = test_set(logs, test_keep);
    let mut train_mae = Vec::new();
    let mut test_mae = Vec::new();
    for log in &gathering {
        if log.records.len() < train_len {
            return Err(AnalysisError::ShortLog { solver: gathering_solver.into(), need: train_len, got: log.records.len() });
        }
        let train: Vec<(Point, f64)> =
            log.records[..train_len].iter().map(|r| (r.point.clone(), r.objective)).collect();
        let model = fit(&log.header.space, &train)?;
        train_mae.push(mae(&model, &train));
        test_mae.push(mae(&model, &test));
    }
    Ok(OfflineResult {
        gathering_solver: gathering_solver.into(),
        runs: gathering.len(),
        train_mae_mean: math::mean(&train_mae),
        train_mae_std: math::sample_std(&train_mae),
        test_mae_mean: math::mean(&test_mae),
        test_mae_std: math::sample_std(&test_mae),
        train_mae,
        test_mae,
        test_size: test.len(),
        test_truncated: test.len() < test_keep,
    })
}
