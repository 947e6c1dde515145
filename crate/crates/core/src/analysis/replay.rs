//! Budget × evaluation-time replay of logged runs.
//!
//! For a simulated evaluation time `τ` the elapsed time after `i`
//! evaluations is `Σ_{j≤i} (τ + solver_time_j)`, accumulated left to
//! right. Under a budget `B` a run completes `n(B) = max{i : elapsed_i ≤ B}`
//! evaluations and achieves the minimum of its first `n(B)` objectives.
//!
//! A cell is undefined when some run of some solver completes no
//! evaluation, or runs out of records while its elapsed time is still
//! below `B` (the log does not say what it would have reached). Defined
//! cells name the solver with the lowest mean; ties go to the
//! lexicographically smallest id.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::rules::RuleSample;
use super::AnalysisError;
use crate::math;
use crate::record::RunLog;

/// Default eval-time axis span in seconds.
pub const EVAL_TIME_RANGE: (f64, f64) = (1.2e-4, 1.296e5);
/// Default budget axis span in seconds.
pub const BUDGET_RANGE: (f64, f64) = (4.9e-4, 1.296e5);

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (math::ln(lo), math::ln(hi));
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        math::exp(a + (b - a) * i as f64 / (count - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    pub completed: usize,
    /// Best objective over the completed evaluations.
    pub best: Option<f64>,
    /// The log ran out before the budget did.
    pub exhausted: bool,
}

/// Replays one run; `objectives` and `solver_times` are aligned per record.
pub fn run_outcome(objectives: &[f64], solver_times: &[f64], eval_time: f64, budget: f64) -> RunOutcome {
    let mut elapsed = 0.0;
    let mut completed = 0;
    let mut best: Option<f64> = None;
    for (y, st) in objectives.iter().zip(solver_times) {
        elapsed += eval_time + st;
        if elapsed > budget {
            return RunOutcome { completed, best, exhausted: false };
        }
        completed += 1;
        best = Some(best.map_or(*y, |b: f64| b.min(*y)));
    }
    RunOutcome { completed, best, exhausted: elapsed < budget }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayCell {
    pub budget: f64,
    pub eval_time: f64,
    /// Per-solver mean best value, aligned with [`ReplayGrid::solvers`];
    /// `None` when some run of that solver is undefined.
    pub means: Vec<Option<f64>>,
    pub defined: bool,
    pub winner: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayGrid {
    pub budgets: Vec<f64>,
    pub eval_times: Vec<f64>,
    /// Sorted solver ids.
    pub solvers: Vec<String>,
    /// Row-major: all eval times for the first budget, then the next.
    pub cells: Vec<ReplayCell>,
}

impl ReplayGrid {
    pub fn cell(&self, budget_index: usize, eval_index: usize) -> &ReplayCell {
        &self.cells[budget_index * self.eval_times.len() + eval_index]
    }
}

pub fn replay(logs: &[RunLog], budgets: &[f64], eval_times: &[f64]) -> Result<ReplayGrid, AnalysisError> {
    if budgets.is_empty() {
        return Err(AnalysisError::EmptyAxis("budget"));
    }
    if eval_times.is_empty() {
        return Err(AnalysisError::EmptyAxis("eval_time"));
    }
    let mut runs: BTreeMap<&str, Vec<(Vec<f64>, Vec<f64>)>> = BTreeMap::new();
    for log in logs {
        let ys = log.records.iter().map(|r| r.objective).collect();
        let st = log.records.iter().map(|r| r.solver_time).collect();
        runs.entry(&log.header.solver_id).or_default().push((ys, st));
    }
    let solvers: Vec<String> = runs.keys().map(|s| String::from(*s)).collect();
    let mut cells = Vec::with_capacity(budgets.len() * eval_times.len());
    for &budget in budgets {
        for &eval_time in eval_times {
            let mut means = Vec::with_capacity(solvers.len());
            for solver_runs in runs.values() {
                let mut bests = Vec::with_capacity(solver_runs.len());
                for (ys, st) in solver_runs {
                    let o = run_outcome(ys, st, eval_time, budget);
                    match o.best {
                        Some(b) if !o.exhausted => bests.push(b),
                        _ => break,
                    }
                }
                means.push((bests.len() == solver_runs.len()).then(|| bests.iter().sum::<f64>() / bests.len() as f64));
            }
            let defined = !means.is_empty() && means.iter().all(Option::is_some);
            let winner = if defined {
                let mut w = 0;
                for i in 1..means.len() {
                    if means[i].unwrap() < means[w].unwrap() {
                        w = i;
                    }
                }
                Some(solvers[w].clone())
            } else {
                None
            };
            cells.push(ReplayCell { budget, eval_time, means, defined, winner });
        }
    }
    Ok(ReplayGrid { budgets: budgets.to_vec(), eval_times: eval_times.to_vec(), solvers, cells })
}

/// Training samples for the rules tree from the defined cells of a grid.
pub fn labelled_cells(grid: &ReplayGrid, is_10d_continuous: bool, uses_cfd: bool) -> Vec<RuleSample> {
    grid.cells
        .iter()
        .filter_map(|c| {
            c.winner.as_ref().map(|w| RuleSample {
                features: [
                    math::log10(c.budget),
                    math::log10(c.eval_time),
                    if is_10d_continuous { 1.0 } else { 0.0 },
                    if uses_cfd { 1.0 } else { 0.0 },
                ],
                label: w.clone(),
            })
        })
        .collect()
}
