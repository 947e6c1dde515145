//! Best-so-far curves normalised against the random-search baseline.
//!
//! `r0` is the baseline's mean best-so-far after one evaluation and `r1`
//! after `R` evaluations; a value `f` maps to `(f - r0) / (r1 - r0)`, so
//! `r0 ↦ 0` and `r1 ↦ 1`. Curves start at iteration `R + 1`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::AnalysisError;
use crate::math;
use crate::record::RunLog;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalisedCurve {
    pub solver_id: String,
    pub iterations: Vec<usize>,
    pub mean: Vec<f64>,
    /// Sample standard deviation across runs, in normalised units.
    pub std: Vec<f64>,
    pub runs: usize,
}

pub fn normalize_value(f: f64, r0: f64, r1: f64) -> f64 {
    (f - r0) / (r1 - r0)
}

fn mean_bsf_at(runs: &[&RunLog], iteration: usize) -> Result<f64, AnalysisError> {
    let mut vals = Vec::with_capacity(runs.len());
    for log in runs {
        let bsf = log.best_so_far();
        let v = bsf.get(iteration - 1).ok_or_else(|| AnalysisError::ShortLog {
            solver: log.header.solver_id.clone(),
            need: iteration,
            got: bsf.len(),
        })?;
        vals.push(*v);
    }
    Ok(math::mean(&vals))
}

/// `(r0, r1)` from the baseline runs.
pub fn baseline_anchors(logs: &[RunLog], baseline: &str, rand_evals: usize) -> Result<(f64, f64), AnalysisError> {
    let runs: Vec<&RunLog> = logs.iter().filter(|l| l.header.solver_id == baseline).collect();
    if runs.is_empty() {
        return Err(AnalysisError::MissingBaseline(baseline.into()));
    }
    let r0 = mean_bsf_at(&runs, 1)?;
    let r1 = mean_bsf_at(&runs, rand_evals.max(1))?;
    Ok((r0, r1))
}

/// One curve per solver (sorted by id), covering iterations `R + 1` up to
/// the shortest run of that solver.
pub fn normalize_curves(logs: &[RunLog], baseline: &str, rand_evals: usize) -> Result<Vec<NormalisedCurve>, AnalysisError> {
    let (r0, r1) = baseline_anchors(logs, baseline, rand_evals)?;
    if r0 == r1 {
        return Err(AnalysisError::DegenerateBaseline);
    }
    let scale = (r1 - r0).abs();
    let mut by_solver: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    for log in logs {
        by_solver.entry(log.header.solver_id.as_str()).or_default().push(log.best_so_far());
    }
    let mut out = Vec::new();
    for (id, curves) in by_solver {
        let len = curves.iter().map(Vec::len).min().unwrap_or(0);
        let mut c = NormalisedCurve { solver_id: id.into(), iterations: Vec::new(), mean: Vec::new(), std: Vec::new(), runs: curves.len() };
        for i in rand_evals..len {
            let raw: Vec<f64> = curves.iter().map(|v| v[i]).collect();
            c.iterations.push(i + 1);
            c.mean.push(normalize_value(math::mean(&raw), r0, r1));
            c.std.push(math::sample_std(&raw) / scale);
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_examples() {
        assert_eq!(normalize_value(10.0, 10.0, 5.0), 0.0);
        assert_eq!(normalize_value(5.0, 10.0, 5.0), 1.0);
        assert_eq!(normalize_value(2.5, 10.0, 5.0), 1.5);
    }
}
