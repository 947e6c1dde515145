//! Area under the normalised best-so-far curve.
//!
//! With `f_best` and `f_worst` the smallest and largest objective seen by
//! any solver on the problem, each best-so-far value maps to
//! `(f - f_worst) / (f_best - f_worst)`; the score of a run is the mean of
//! that curve over iterations `1..=N` (random initial samples included),
//! and the score of a solver is the mean over its runs. 1 is best.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::AnalysisError;
use crate::math;
use crate::record::RunLog;

#[derive(Clone, Debug, PartialEq)]
pub struct AucScore {
    pub solver_id: String,
    pub auc: f64,
    pub runs: usize,
}

pub fn auc(logs: &[RunLog], n: usize) -> Result<Vec<AucScore>, AnalysisError> {
    if logs.is_empty() {
        return Err(AnalysisError::NoLogs);
    }
    if n == 0 {
        return Err(AnalysisError::TooFewSamples { need: 1, got: 0 });
    }
    let mut best = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for log in logs {
        if log.records.len() < n {
            return Err(AnalysisError::ShortLog { solver: log.header.solver_id.clone(), need: n, got: log.records.len() });
        }
        for r in &log.records {
            best = best.min(r.objective);
            worst = worst.max(r.objective);
        }
    }
    if best == worst {
        return Err(AnalysisError::DegenerateRange);
    }
    let mut per_solver: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for log in logs {
        let curve: Vec<f64> =
            log.best_so_far()[..n].iter().map(|f| ((f - worst) / (best - worst)).clamp(0.0, 1.0)).collect();
        per_solver.entry(&log.header.solver_id).or_default().push(math::mean(&curve));
    }
    Ok(per_solver
        .into_iter()
        .map(|(id, runs)| AucScore { solver_id: id.into(), auc: math::mean(&runs), runs: runs.len() })
        .collect())
}
