#![allow(dead_code)]

use std::collections::BTreeMap;

use surrobench_core::record::{EvaluationRecord, Phase, RunHeader, RunLog, RunStatus};
use surrobench_core::rng::ALGORITHM_ID;
use surrobench_core::{SearchSpace, Value, VariableSpec};

pub fn line_space() -> SearchSpace {
    SearchSpace::new(vec![VariableSpec::continuous("x", -1e9, 1e9)]).unwrap()
}

/// A log whose points carry the objective as their single coordinate.
pub fn log(solver: &str, objectives: &[f64], solver_times: &[f64], rand_evals: usize) -> RunLog {
    let space = line_space();
    let records = objectives
        .iter()
        .zip(solver_times)
        .enumerate()
        .map(|(i, (&y, &st))| EvaluationRecord {
            iteration: i + 1,
            point: space.point(vec![Value::Real(y)]),
            objective: y,
            eval_time: 0.0,
            solver_time: st,
            phase: Phase::of(i + 1, rand_evals),
        })
        .collect();
    RunLog {
        header: RunHeader {
            problem_id: "synthetic".into(),
            solver_id: solver.into(),
            seed: 0,
            rand_evals,
            rng: ALGORITHM_ID.into(),
            space,
            overrides: BTreeMap::new(),
            status: RunStatus::Complete,
            abort_reason: None,
        },
        records,
    }
}

pub fn simple_log(solver: &str, objectives: &[f64], rand_evals: usize) -> RunLog {
    log(solver, objectives, &vec![0.0; objectives.len()], rand_evals)
}
