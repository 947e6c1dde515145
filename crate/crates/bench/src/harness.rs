//! Experiment runner: problem × solvers × repetitions.
//!
//! Each run loops suggest → evaluate → observe until `max_eval` records
//! exist or the clock has reached the budget. The budget is checked before
//! each suggestion, so the evaluation that crosses it is still recorded.
//!
//! Real mode times every phase with a monotonic clock. Virtual mode takes
//! evaluation times from the problem and charges the solver its counted
//! work units at [`WORK_UNIT_SECONDS`] each, so reruns are bit-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use surrobench_core::rng::{mix64, ALGORITHM_ID};
use surrobench_core::solvers::{make_solver, Adapter, SolverError, SolverKind, WORK_UNIT_SECONDS};
use surrobench_core::{EvaluationRecord, Phase, RunHeader, RunLog, RunStatus};

use crate::format::{write_run, FormatError};
use crate::problem::{Delayed, Noisy, Problem, ProblemSpec, SpecError, TimeMode};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverKind>,
    /// `kind.param=value` pairs, already split.
    pub overrides: Vec<(String, String)>,
    pub repetitions: usize,
    pub max_eval: usize,
    pub rand_evals: usize,
    pub out_path: PathBuf,
    pub base_seed: u64,
    /// Stop once this many seconds have been spent; `None` stops only on
    /// the evaluation count.
    pub budget_seconds: Option<f64>,
    pub virtual_time: bool,
    /// Runs executed in parallel.
    pub jobs: usize,
    /// Artificial seconds added to every evaluation.
    pub delay: f64,
    /// Standard deviation of additive Gaussian noise; 0 disables it.
    pub noise: f64,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemSpec, solvers: Vec<SolverKind>, out_path: impl Into<PathBuf>) -> Self {
        Self {
            problem,
            solvers,
            overrides: Vec::new(),
            repetitions: 1,
            max_eval: 100,
            rand_evals: 10,
            out_path: out_path.into(),
            base_seed: 0,
            budget_seconds: None,
            virtual_time: false,
            jobs: 1,
            delay: 0.0,
            noise: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.solvers.is_empty() {
            return Err(ConfigError::NoSolvers);
        }
        if self.repetitions == 0 {
            return Err(ConfigError::Invalid("repetitions must be at least 1".into()));
        }
        if self.max_eval == 0 {
            return Err(ConfigError::Invalid("max-eval must be at least 1".into()));
        }
        if self.rand_evals > self.max_eval {
            return Err(ConfigError::RandEvalsExceedMaxEval { rand_evals: self.rand_evals, max_eval: self.max_eval });
        }
        if self.budget_seconds.is_some_and(|b| !(b >= 0.0)) {
            return Err(ConfigError::Invalid("budget must be a nonnegative number of seconds".into()));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(ConfigError::Invalid("delay must be a nonnegative number of seconds".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(ConfigError::Invalid("noise must be nonnegative".into()));
        }
        let problem = self.problem.build()?;
        for &kind in &self.solvers {
            let adapter = Adapter::required(kind, problem.space());
            make_solver(kind, problem.space(), self.rand_evals, 0, &self.overrides, adapter)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("no solver given")]
    NoSolvers,
    #[error("R exceeds max-eval ({rand_evals} > {max_eval})")]
    RandEvalsExceedMaxEval { rand_evals: usize, max_eval: usize },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Problem(#[from] SpecError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Seed of repetition `t` (1-based) of `solver_id`: the base seed XOR a
/// platform-independent hash of the pair.
pub fn run_seed(base_seed: u64, solver_id: &str, t: usize) -> u64 {
    // FNV-1a over the id and the little-endian repetition, then mixed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in solver_id.bytes().chain((t as u64).to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    base_seed ^ mix64(h)
}

pub fn run_stem(problem_id: &str, solver_id: &str, t: usize) -> String {
    format!("{problem_id}__{solver_id}__{t:03}")
}

/// Runs one repetition and returns its log; never writes files.
pub fn run_one(cfg: &ExperimentConfig, kind: SolverKind, t: usize) -> Result<RunLog, ConfigError> {
    let seed = run_seed(cfg.base_seed, kind.id(), t);
    let mut problem: Box<dyn Problem> = cfg.problem.build()?;
    if cfg.delay > 0.0 {
        problem = Box::new(Delayed::new(problem, cfg.delay));
    }
    if cfg.noise > 0.0 {
        problem = Box::new(Noisy::new(problem, cfg.noise, seed));
    }
    let space = problem.space().clone();
    let adapter = Adapter::required(kind, &space);
    let mut solver = make_solver(kind, &space, cfg.rand_evals, seed, &cfg.overrides, adapter)?;
    let mode = if cfg.virtual_time { TimeMode::Virtual } else { TimeMode::Real };
    let prefix = format!("{}.", kind.id());
    let overrides: BTreeMap<String, String> =
        cfg.overrides.iter().filter(|(k, _)| k.starts_with(&prefix)).cloned().collect();

    let mut records = Vec::with_capacity(cfg.max_eval);
    let mut abort_reason = None;
    let mut virtual_clock = 0.0;
    let start = Instant::now();
    // contiguous timestamps so per-record times add up to the run time
    let mut mark = start;
    while records.len() < cfg.max_eval {
        if let Some(budget) = cfg.budget_seconds {
            let clock = if cfg.virtual_time { virtual_clock } else { start.elapsed().as_secs_f64() };
            if clock >= budget {
                break;
            }
        }
        let point = solver.suggest();
        let before_eval = Instant::now();
        let outcome = problem.evaluate(&point, mode);
        let after_eval = Instant::now();
        let evaluation = match outcome {
            Ok(e) => e,
            Err(e) => {
                abort_reason = Some(format!("evaluation {}: {e}", records.len() + 1));
                break;
            }
        };
        if let Err(e) = solver.observe(point.clone(), evaluation.objective) {
            abort_reason = Some(format!("evaluation {}: {e}", records.len() + 1));
            break;
        }
        let work = solver.take_work();
        let (eval_time, solver_time) = if cfg.virtual_time {
            (evaluation.eval_time, work as f64 * WORK_UNIT_SECONDS)
        } else {
            let end = Instant::now();
            let solver = (before_eval - mark) + (end - after_eval);
            mark = end;
            ((after_eval - before_eval).as_secs_f64(), solver.as_secs_f64())
        };
        virtual_clock += eval_time + solver_time;
        let iteration = records.len() + 1;
        records.push(EvaluationRecord {
            iteration,
            point,
            objective: evaluation.objective,
            eval_time,
            solver_time,
            phase: Phase::of(iteration, cfg.rand_evals),
        });
    }
    let status = if abort_reason.is_some() {
        RunStatus::Aborted
    } else if records.is_empty() {
        RunStatus::Empty
    } else {
        RunStatus::Complete
    };
    let header = RunHeader {
        problem_id: problem.id().into(),
        solver_id: kind.id().into(),
        seed,
        rand_evals: cfg.rand_evals,
        rng: ALGORITHM_ID.into(),
        space,
        overrides,
        status,
        abort_reason,
    };
    Ok(RunLog { header, records })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub solver_id: String,
    pub repetition: usize,
    pub status: RunStatus,
    pub records: usize,
    pub abort_reason: Option<String>,
}

/// Runs every (solver, repetition) pair, writing one CSV and sidecar per
/// run into `cfg.out_path`. Outputs are ordered by solver, then repetition.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunOutput>, HarnessError> {
    cfg.validate()?;
    let tasks: Vec<(SolverKind, usize)> =
        cfg.solvers.iter().flat_map(|&k| (1..=cfg.repetitions).map(move |t| (k, t))).collect();
    let results: Mutex<Vec<Option<Result<RunOutput, HarnessError>>>> =
        Mutex::new((0..tasks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = cfg.jobs.clamp(1, tasks.len());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(kind, t)) = tasks.get(i) else { break };
                let out = execute(cfg, kind, t, &cfg.out_path);
                results.lock().expect("no poisoned lock")[i] = Some(out);
            });
        }
    });
    results.into_inner().expect("no poisoned lock").into_iter().map(|r| r.expect("every task ran")).collect()
}

fn execute(cfg: &ExperimentConfig, kind: SolverKind, t: usize, dir: &Path) -> Result<RunOutput, HarnessError> {
    let log = run_one(cfg, kind, t)?;
    let stem = run_stem(&log.header.problem_id, kind.id(), t);
    let csv_path = write_run(dir, &stem, &log)?;
    Ok(RunOutput {
        csv_path,
        solver_id: kind.id().into(),
        repetition: t,
        status: log.header.status,
        records: log.records.len(),
        abort_reason: log.header.abort_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pipe() -> ProblemSpec {
        ProblemSpec::Pipe { d: 3, radius: 0.5 }
    }

    #[test]
    fn seeds_differ_across_repetitions_and_solvers() {
        let a = run_seed(7, "gp-ucb", 1);
        assert_ne!(a, run_seed(7, "gp-ucb", 2));
        assert_ne!(a, run_seed(7, "randomsearch", 1));
        assert_eq!(a ^ 7, run_seed(0, "gp-ucb", 1));
    }

    #[test]
    fn evaluation_count_stop() {
        let mut cfg = ExperimentConfig::new(pipe(), vec![SolverKind::RandomSearch], "unused");
        cfg.max_eval = 30;
        cfg.virtual_time = true;
        let log = run_one(&cfg, SolverKind::RandomSearch, 1).unwrap();
        assert_eq!(log.records.len(), 30);
        assert_eq!(log.header.status, RunStatus::Complete);
        log.check().unwrap();
    }

    #[test]
    fn zero_budget_gives_empty_run() {
        for virtual_time in [true, false] {
            let mut cfg = ExperimentConfig::new(pipe(), vec![SolverKind::GpUcb], "unused");
            cfg.budget_seconds = Some(0.0);
            cfg.virtual_time = virtual_time;
            let log = run_one(&cfg, SolverKind::GpUcb, 1).unwrap();
            assert!(log.records.is_empty());
            assert_eq!(log.header.status, RunStatus::Empty);
        }
    }

    #[test]
    fn virtual_budget_keeps_the_crossing_evaluation() {
        let mut cfg = ExperimentConfig::new(pipe(), vec![SolverKind::RandomSearch], "unused");
        cfg.virtual_time = true;
        cfg.delay = 0.25;
        cfg.budget_seconds = Some(1.0);
        let log = run_one(&cfg, SolverKind::RandomSearch, 1).unwrap();
        let total: f64 = log.records.iter().map(|r| r.eval_time + r.solver_time).sum();
        let before_last = total - log.records.last().map(|r| r.eval_time + r.solver_time).unwrap();
        assert!(before_last < 1.0 && total >= 1.0, "{before_last} {total}");
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::new(pipe(), vec![SolverKind::RandomSearch], "unused");
        cfg.rand_evals = 50;
        cfg.max_eval = 20;
        assert!(matches!(cfg.validate(), Err(ConfigError::RandEvalsExceedMaxEval { .. })));
        cfg.rand_evals = 5;
        cfg.overrides = vec![("gp-ucb.nope".into(), "1".into())];
        cfg.solvers = vec![SolverKind::GpUcb];
        assert!(cfg.validate().is_err());
        cfg.solvers.clear();
        assert!(matches!(cfg.validate(), Err(ConfigError::NoSolvers)));
    }

    #[test]
    fn overrides_echoed_per_kind() {
        let mut cfg = ExperimentConfig::new(pipe(), vec![SolverKind::GpUcb], "unused");
        cfg.max_eval = 3;
        cfg.rand_evals = 3;
        cfg.virtual_time = true;
        cfg.overrides = vec![("gp-ucb.beta".into(), "1.0".into()), ("pwl-high.explore".into(), "2".into())];
        let log = run_one(&cfg, SolverKind::GpUcb, 1).unwrap();
        assert_eq!(log.header.overrides.len(), 1);
        assert_eq!(log.header.overrides["gp-ucb.beta"], "1.0");
    }
}
