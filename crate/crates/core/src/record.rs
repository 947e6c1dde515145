//! Per-iteration evaluation records and run logs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::space::{Point, SearchSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    RandomInit,
    ModelGuided,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::RandomInit => "random_init",
            Phase::ModelGuided => "model_guided",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random_init" => Some(Phase::RandomInit),
            "model_guided" => Some(Phase::ModelGuided),
            _ => None,
        }
    }

    /// Phase of the 1-based `iteration` in a run with `rand_evals` random
    /// initial iterations.
    pub fn of(iteration: usize, rand_evals: usize) -> Self {
        if iteration <= rand_evals {
            Phase::RandomInit
        } else {
            Phase::ModelGuided
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    /// 1-based.
    pub iteration: usize,
    pub point: Point,
    pub objective: f64,
    /// Seconds spent evaluating the objective.
    pub eval_time: f64,
    /// Seconds spent by the solver on training and acquisition combined.
    pub solver_time: f64,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// Stopped by an evaluation error; the records hold the partial run.
    Aborted,
    /// No evaluation fitted in the budget.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub problem_id: String,
    pub solver_id: String,
    pub seed: u64,
    /// Number of random initial iterations (R).
    pub rand_evals: usize,
    /// Generator algorithm identifier, see [`crate::rng::ALGORITHM_ID`].
    pub rng: String,
    pub space: SearchSpace,
    #[serde(default)]
    pub overrides: BTreeMap<String, String>,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub header: RunHeader,
    pub records: Vec<EvaluationRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("record {position} has iteration {found}, expected {position}")]
    Iteration { position: usize, found: usize },
    #[error("record {0} has the wrong phase")]
    Phase(usize),
    #[error("record {0} has a negative or non-finite time")]
    Time(usize),
    #[error("record {0}: {1}")]
    Point(usize, String),
}

impl RunLog {
    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn best_so_far(&self) -> Vec<f64> {
        best_so_far(self)
    }

    /// Checks the record-sequence invariants: consecutive iterations from 1,
    /// phase consistent with R, nonnegative times, valid points.
    pub fn check(&self) -> Result<(), LogError> {
        for (i, r) in self.records.iter().enumerate() {
            let position = i + 1;
            if r.iteration != position {
                return Err(LogError::Iteration { position, found: r.iteration });
            }
            if r.phase != Phase::of(position, self.header.rand_evals) {
                return Err(LogError::Phase(position));
            }
            let time_ok = |t: f64| t.is_finite() && t >= 0.0;
            if !time_ok(r.eval_time) || !time_ok(r.solver_time) {
                return Err(LogError::Time(position));
            }
            crate::space::validate_point(&self.header.space, &r.point)
                .map_err(|v| LogError::Point(position, alloc::string::ToString::to_string(&v)))?;
        }
        Ok(())
    }
}

/// Running minimum of the objectives; element `i` is the best of records
/// `1..=i+1`.
pub fn best_so_far(log: &RunLog) -> Vec<f64> {
    running_min(log.records.iter().map(|r| r.objective))
}

pub(crate) fn running_min(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut best = f64::INFINITY;
    values
        .map(|v| {
            if v < best {
                best = v;
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Value, VariableSpec};
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn log_with(objectives: &[f64]) -> RunLog {
        let space = SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap();
        let records = objectives
            .iter()
            .enumerate()
            .map(|(i, &y)| EvaluationRecord {
                iteration: i + 1,
                point: space.point(vec![Value::Real(0.5)]),
                objective: y,
                eval_time: 0.0,
                solver_time: 0.0,
                phase: Phase::of(i + 1, 1),
            })
            .collect();
        RunLog {
            header: RunHeader {
                problem_id: "p".to_string(),
                solver_id: "s".to_string(),
                seed: 0,
                rand_evals: 1,
                rng: crate::rng::ALGORITHM_ID.to_string(),
                space,
                overrides: BTreeMap::new(),
                status: RunStatus::Complete,
                abort_reason: None,
            },
            records,
        }
    }

    #[test]
    fn running_minimum() {
        assert_eq!(best_so_far(&log_with(&[3.0, 1.0, 2.0])), vec![3.0, 1.0, 1.0]);
        assert_eq!(best_so_far(&log_with(&[5.0])), vec![5.0]);
    }

    #[test]
    fn matches_brute_force_on_random_objectives() {
        let mut rng = crate::rng::Rng::new(77);
        let ys: Vec<f64> = (0..100).map(|_| rng.normal()).collect();
        let got = best_so_far(&log_with(&ys));
        for i in 0..ys.len() {
            let want = ys[..=i].iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(got[i], want);
        }
    }

    #[test]
    fn check_catches_gaps() {
        let mut log = log_with(&[1.0, 2.0]);
        assert!(log.check().is_ok());
        log.records[1].iteration = 3;
        assert!(matches!(log.check(), Err(LogError::Iteration { .. })));
        let mut log = log_with(&[1.0, 2.0]);
        log.records[1].phase = Phase::RandomInit;
        assert_eq!(log.check(), Err(LogError::Phase(2)));
    }
}
