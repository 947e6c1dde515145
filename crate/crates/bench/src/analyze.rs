//! `surrobench-analyze`: reports from a directory of run logs.
//!
//! Logs are grouped by problem. Per problem the tool writes normalised
//! curves, final-value t-tests against the baseline, AUC scores, the replay
//! grid and, when asked, offline surrogate errors. Defined replay cells of
//! all problems together train one rules tree.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use surrobench_core::analysis::{
    auc, fit_rules_tree, labelled_cells, log_grid, normalize_curves, offline_eval, pairwise_ttest, replay, RuleSample,
    BUDGET_RANGE, EVAL_TIME_RANGE,
};
use surrobench_core::surrogates::{
    fit_boosted, fit_forest, fit_gp, fit_least_squares, BoostedParams, ForestParams, GpConfig, LeastSquaresConfig,
    LeastSquaresFamily,
};
use surrobench_core::RunLog;

use crate::format::load_dir;
use crate::report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelFamily {
    Linear,
    Quadratic,
    Pwl,
    Rff,
    Gp,
    Forest,
    Boosted,
}

#[derive(Parser, Debug)]
#[command(name = "surrobench-analyze", about = "Analyse a directory of surrobench run logs")]
pub struct Args {
    /// Directory holding run CSVs and their JSON sidecars.
    pub logs: PathBuf,
    /// Where reports go.
    #[arg(long, default_value = "analysis")]
    pub out_dir: PathBuf,
    /// Baseline solver for normalisation and t-tests.
    #[arg(long, default_value = "randomsearch")]
    pub baseline: String,
    /// Iteration cut for AUC; defaults to the shortest log.
    #[arg(long)]
    pub auc_iterations: Option<usize>,
    /// Points per replay axis.
    #[arg(long, default_value_t = 12)]
    pub grid_points: usize,
    /// Problems whose evaluations run a CFD solver (rules-tree feature); repeatable.
    #[arg(long = "cfd-problem")]
    pub cfd_problems: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Gathering solver for offline surrogate evaluation.
    #[arg(long)]
    pub offline_solver: Option<String>,
    #[arg(long, value_enum, default_value_t = ModelFamily::Pwl)]
    pub offline_model: ModelFamily,
    #[arg(long, default_value_t = 500)]
    pub train_len: usize,
    #[arg(long, default_value_t = 1000)]
    pub test_keep: usize,
    /// Basis count for the pwl and rff models.
    #[arg(long, default_value_t = 1000)]
    pub n_basis: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub ridge: f64,
}

/// Fits the chosen family on one training set.
pub fn offline_fitter(
    family: ModelFamily,
    n_basis: usize,
    ridge: f64,
) -> impl FnMut(&surrobench_core::SearchSpace, &[(surrobench_core::Point, f64)]) -> Result<surrobench_core::surrogates::SurrogateModel, surrobench_core::surrogates::FitError>
{
    move |space, data| {
        let ls = |f: LeastSquaresFamily| LeastSquaresConfig::new(f).ridge(ridge).n_basis(n_basis);
        match family {
            ModelFamily::Linear => fit_least_squares(space, data, &ls(LeastSquaresFamily::Linear)),
            ModelFamily::Quadratic => fit_least_squares(space, data, &ls(LeastSquaresFamily::Quadratic)),
            ModelFamily::Pwl => fit_least_squares(space, data, &ls(LeastSquaresFamily::PiecewiseLinear)),
            ModelFamily::Rff => fit_least_squares(space, data, &ls(LeastSquaresFamily::RandomFourier)),
            ModelFamily::Gp => fit_gp(space, data, &GpConfig { optimise: true, normalize_y: true, ..Default::default() }),
            ModelFamily::Forest => fit_forest(space, data, &ForestParams::default()),
            ModelFamily::Boosted => fit_boosted(space, data, &BoostedParams::default()),
        }
    }
}

fn final_values<'a>(logs: &[&'a RunLog], solver: &str) -> Vec<f64> {
    logs.iter()
        .filter(|l| l.header.solver_id == solver)
        .filter_map(|l| l.best_so_far().last().copied())
        .collect()
}

fn analyse_problem(args: &Args, id: &str, logs: &[&RunLog], notes: &mut dyn Write) -> Result<Vec<RuleSample>, String> {
    let dir = args.out_dir.join(id);
    let owned: Vec<RunLog> = logs.iter().map(|l| (*l).clone()).collect();
    let r = owned[0].header.rand_evals;
    let mut solvers: Vec<&str> = logs.iter().map(|l| l.header.solver_id.as_str()).collect();
    solvers.sort_unstable();
    solvers.dedup();
    let e = |x: &dyn std::fmt::Display| x.to_string();

    match normalize_curves(&owned, &args.baseline, r) {
        Ok(curves) => report::write_curves_csv(&dir.join("curves.csv"), &curves).map_err(|x| e(&x))?,
        Err(x) => {
            let _ = writeln!(notes, "{id}: no curves: {x}");
        }
    }

    let base = final_values(logs, &args.baseline);
    let mut tests = Vec::new();
    for s in solvers.iter().filter(|s| **s != args.baseline) {
        let other = final_values(logs, s);
        if let Ok(t) = pairwise_ttest(&other, &base) {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            tests.push((s.to_string(), args.baseline.clone(), mean(&other), mean(&base), t));
        }
    }
    report::write_ttest_csv(&dir.join("ttest.csv"), &tests).map_err(|x| e(&x))?;

    let shortest = owned.iter().map(|l| l.records.len()).min().unwrap_or(0);
    let cut = args.auc_iterations.unwrap_or(shortest);
    match auc(&owned, cut) {
        Ok(scores) => report::write_auc_csv(&dir.join("auc.csv"), cut, &scores).map_err(|x| e(&x))?,
        Err(x) => {
            let _ = writeln!(notes, "{id}: no AUC: {x}");
        }
    }

    let budgets = log_grid(BUDGET_RANGE.0, BUDGET_RANGE.1, args.grid_points);
    let eval_times = log_grid(EVAL_TIME_RANGE.0, EVAL_TIME_RANGE.1, args.grid_points);
    let grid = replay(&owned, &budgets, &eval_times).map_err(|x| e(&x))?;
    report::write_grid_csv(&dir.join("grid.csv"), &grid).map_err(|x| e(&x))?;

    if let Some(gathering) = &args.offline_solver {
        let fit = offline_fitter(args.offline_model, args.n_basis, args.ridge);
        let res = offline_eval(&owned, gathering, args.train_len, args.test_keep, fit).map_err(|x| e(&x))?;
        let family = args.offline_model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        report::write_offline_json(&dir.join("offline.json"), id, &family, &[res]).map_err(|x| e(&x))?;
    }

    let space = &owned[0].header.space;
    let is_10d = space.is_continuous() && space.dim() == 10;
    let uses_cfd = args.cfd_problems.iter().any(|p| p == id);
    Ok(labelled_cells(&grid, is_10d, uses_cfd))
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match analyse(&args, err) {
        Ok(n) => {
            let _ = writeln!(out, "analysed {n} problems into {}", args.out_dir.display());
            0
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn analyse(args: &Args, notes: &mut dyn Write) -> Result<usize, String> {
    let logs = load_dir(&args.logs).map_err(|e| e.to_string())?;
    if logs.is_empty() {
        return Err(format!("no run logs in {}", args.logs.display()));
    }
    let mut by_problem: BTreeMap<&str, Vec<&RunLog>> = BTreeMap::new();
    for l in logs.iter().filter(|l| !l.records.is_empty()) {
        by_problem.entry(&l.header.problem_id).or_default().push(l);
    }
    let mut samples = Vec::new();
    for (id, group) in &by_problem {
        samples.extend(analyse_problem(args, id, group, notes)?);
    }
    match fit_rules_tree(&samples, args.split_seed) {
        Ok(fit) => report::write_rules_json(&args.out_dir.join("rules.json"), &fit).map_err(|e| e.to_string())?,
        Err(e) => {
            let _ = writeln!(notes, "no rules tree: {e}");
        }
    }
    Ok(by_problem.len())
}

/// Convenience for tests and scripts.
pub fn analyse_dir(logs: &Path, out_dir: &Path) -> i32 {
    let argv = [OsString::from("surrobench-analyze"), logs.into(), "--out-dir".into(), out_dir.into()];
    run(argv, &mut std::io::sink(), &mut std::io::sink())
}
