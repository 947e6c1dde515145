//! Plot-ready CSV and JSON reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};
use surrobench_core::analysis::{
    AucScore, NormalisedCurve, OfflineResult, ReplayCell, ReplayGrid, RuleNode, RulesFit, RulesTree, TTest, FEATURE_NAMES,
};

pub const UNDEFINED: &str = "undefined";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.into(), source }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    fs::write(path, bytes).map_err(io(path))
}

fn csv_bytes(rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// `solver,iteration,mean,std,runs`, one row per solver and iteration.
pub fn write_curves_csv(path: &Path, curves: &[NormalisedCurve]) -> Result<(), ReportError> {
    let mut rows = vec![["solver", "iteration", "mean", "std", "runs"].map(String::from).to_vec()];
    for c in curves {
        for (k, it) in c.iterations.iter().enumerate() {
            rows.push(vec![c.solver_id.clone(), it.to_string(), c.mean[k].to_string(), c.std[k].to_string(), c.runs.to_string()]);
        }
    }
    write_bytes(path, &csv_bytes(rows))
}

/// `solver_a,solver_b,mean_a,mean_b,t,df,p` over final best values.
pub fn write_ttest_csv(path: &Path, rows: &[(String, String, f64, f64, TTest)]) -> Result<(), ReportError> {
    let mut out = vec![["solver_a", "solver_b", "mean_a", "mean_b", "t", "df", "p"].map(String::from).to_vec()];
    for (a, b, ma, mb, t) in rows {
        out.push(vec![a.clone(), b.clone(), ma.to_string(), mb.to_string(), t.t.to_string(), t.df.to_string(), t.p.to_string()]);
    }
    write_bytes(path, &csv_bytes(out))
}

/// `solver,iterations,auc,runs`.
pub fn write_auc_csv(path: &Path, cut: usize, scores: &[AucScore]) -> Result<(), ReportError> {
    let mut out = vec![["solver", "iterations", "auc", "runs"].map(String::from).to_vec()];
    for s in scores {
        out.push(vec![s.solver_id.clone(), cut.to_string(), s.auc.to_string(), s.runs.to_string()]);
    }
    write_bytes(path, &csv_bytes(out))
}

/// `budget_s,eval_time_s,winner,mean_<solver>...`; undefined cells and
/// undefined per-solver means read `undefined`.
pub fn grid_csv(grid: &ReplayGrid) -> Vec<u8> {
    let mut header = ["budget_s", "eval_time_s", "winner"].map(String::from).to_vec();
    header.extend(grid.solvers.iter().map(|s| format!("mean_{s}")));
    let mut rows = vec![header];
    for c in &grid.cells {
        let mut row = vec![c.budget.to_string(), c.eval_time.to_string(), c.winner.clone().unwrap_or_else(|| UNDEFINED.into())];
        row.extend(c.means.iter().map(|m| m.map_or_else(|| UNDEFINED.to_string(), |v| v.to_string())));
        rows.push(row);
    }
    csv_bytes(rows)
}

pub fn write_grid_csv(path: &Path, grid: &ReplayGrid) -> Result<(), ReportError> {
    write_bytes(path, &grid_csv(grid))
}

pub fn read_grid_csv(path: &Path) -> Result<ReplayGrid, ReportError> {
    let bytes = fs::read(path).map_err(io(path))?;
    parse_grid_csv(path, &bytes)
}

pub fn parse_grid_csv(path: &Path, bytes: &[u8]) -> Result<ReplayGrid, ReportError> {
    let malformed = |message: String| ReportError::Malformed { path: path.into(), message };
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers().map_err(|source| ReportError::Csv { path: path.into(), source })?.clone();
    if header.len() < 3 || &header[0] != "budget_s" || &header[1] != "eval_time_s" || &header[2] != "winner" {
        return Err(malformed("missing budget_s,eval_time_s,winner columns".into()));
    }
    let mut solvers = Vec::new();
    for h in header.iter().skip(3) {
        solvers.push(h.strip_prefix("mean_").ok_or_else(|| malformed(format!("bad column `{h}`")))?.to_string());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| malformed(format!("bad number `{s}`")));
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|source| ReportError::Csv { path: path.into(), source })?;
        let mut means = Vec::with_capacity(solvers.len());
        for s in rec.iter().skip(3) {
            means.push(if s == UNDEFINED { None } else { Some(num(s)?) });
        }
        let winner = (&rec[2] != UNDEFINED).then(|| rec[2].to_string());
        cells.push(ReplayCell { budget: num(&rec[0])?, eval_time: num(&rec[1])?, means, defined: winner.is_some(), winner });
    }
    let mut budgets: Vec<f64> = Vec::new();
    let mut eval_times: Vec<f64> = Vec::new();
    for c in &cells {
        if !budgets.contains(&c.budget) {
            budgets.push(c.budget);
        }
        if !eval_times.contains(&c.eval_time) {
            eval_times.push(c.eval_time);
        }
    }
    if budgets.len() * eval_times.len() != cells.len() {
        return Err(malformed("cells do not form a full grid".into()));
    }
    Ok(ReplayGrid { budgets, eval_times, solvers, cells })
}

/// The tree as nested `{"if": .., "then": .., "else": ..}` objects with
/// `{"use": label}` leaves.
pub fn tree_json(tree: &RulesTree) -> Json {
    fn node(nodes: &[RuleNode], i: usize) -> Json {
        match &nodes[i] {
            RuleNode::Leaf { label, samples } => json!({ "use": label, "samples": samples }),
            RuleNode::Split { feature, threshold, left, right } => json!({
                "if": { "feature": FEATURE_NAMES[*feature], "le": threshold },
                "then": node(nodes, *left),
                "else": node(nodes, *right),
            }),
        }
    }
    node(&tree.nodes, 0)
}

pub fn rules_json(fit: &RulesFit) -> Json {
    json!({
        "features": FEATURE_NAMES,
        "train_accuracy": fit.train_accuracy,
        "test_accuracy": fit.test_accuracy,
        "depth": fit.tree.depth(),
        "leaves": fit.tree.n_leaves(),
        "rules": fit.tree.rules(),
        "tree": tree_json(&fit.tree),
    })
}

pub fn write_rules_json(path: &Path, fit: &RulesFit) -> Result<(), ReportError> {
    write_bytes(path, serde_json::to_string_pretty(&rules_json(fit)).expect("serialisable").as_bytes())
}

pub fn offline_json(problem_id: &str, family: &str, results: &[OfflineResult]) -> Json {
    let rows: Vec<Json> = results
        .iter()
        .map(|r| {
            json!({
                "gathering_solver": r.gathering_solver,
                "runs": r.runs,
                "train_mae_mean": r.train_mae_mean,
                "train_mae_std": r.train_mae_std,
                "test_mae_mean": r.test_mae_mean,
                "test_mae_std": r.test_mae_std,
                "train_mae": r.train_mae,
                "test_mae": r.test_mae,
                "test_size": r.test_size,
                "test_truncated": r.test_truncated,
            })
        })
        .collect();
    json!({ "problem_id": problem_id, "model": family, "results": rows })
}

pub fn write_offline_json(path: &Path, problem_id: &str, family: &str, results: &[OfflineResult]) -> Result<(), ReportError> {
    let text = serde_json::to_string_pretty(&offline_json(problem_id, family, results)).expect("serialisable");
    write_bytes(path, text.as_bytes())
}
