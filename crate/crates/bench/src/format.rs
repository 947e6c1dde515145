//! Run-log files: one CSV of records plus a JSON sidecar header per run.
//!
//! CSV columns are `iteration,phase,<one per variable>,objective,eval_time_s,solver_time_s`.
//! Reals are written in Rust's shortest round-trip form, integers as
//! integers and categories by label. Inactive conditional variables keep
//! their value; activity is recomputed from the space on load.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use surrobench_core::record::LogError;
use surrobench_core::{EvaluationRecord, Phase, RunHeader, RunLog, SearchSpace, Value, VarKind};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header { path: PathBuf, expected: String, found: String },
    #[error("{path}: row {row}, column `{column}`: bad value `{value}`")]
    Value { path: PathBuf, row: usize, column: String, value: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: LogError },
}

pub fn csv_columns(space: &SearchSpace) -> Vec<String> {
    let mut cols = vec!["iteration".to_string(), "phase".to_string()];
    cols.extend(space.variables().iter().map(|v| v.name.clone()));
    cols.extend(["objective", "eval_time_s", "solver_time_s"].map(String::from));
    cols
}

fn value_text(kind: &VarKind, v: &Value) -> String {
    match (kind, v) {
        (VarKind::Categorical { categories }, Value::Cat(c)) => categories[*c].clone(),
        (_, Value::Int(k)) => k.to_string(),
        (_, other) => other.as_f64().to_string(),
    }
}

fn parse_value(kind: &VarKind, s: &str) -> Option<Value> {
    match kind {
        VarKind::Continuous { .. } => s.parse().ok().map(Value::Real),
        VarKind::Integer { .. } => s.parse().ok().map(Value::Int),
        VarKind::Categorical { categories } => categories.iter().position(|c| c == s).map(Value::Cat),
    }
}

/// The CSV body of a log.
pub fn to_csv(log: &RunLog) -> Vec<u8> {
    let space = &log.header.space;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_columns(space)).expect("in-memory write");
    for r in &log.records {
        let mut row = vec![r.iteration.to_string(), r.phase.as_str().to_string()];
        row.extend(space.variables().iter().zip(&r.point.values).map(|(var, v)| value_text(&var.kind, v)));
        row.extend([r.objective.to_string(), r.eval_time.to_string(), r.solver_time.to_string()]);
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let io_err = |source| FormatError::Io { path: path.to_path_buf(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`, each through a
/// temporary file and a rename. Returns the CSV path.
pub fn write_run(dir: &Path, stem: &str, log: &RunLog) -> Result<PathBuf, FormatError> {
    fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.to_path_buf(), source })?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_atomic(&csv_path, &to_csv(log))?;
    let header = serde_json::to_vec_pretty(&log.header)
        .map_err(|source| FormatError::Json { path: json_path.clone(), source })?;
    write_atomic(&json_path, &header)?;
    Ok(csv_path)
}

/// Parses a CSV body against a header.
pub fn parse_csv(path: &Path, header: RunHeader, bytes: &[u8]) -> Result<RunLog, FormatError> {
    let space = header.space.clone();
    let expected = csv_columns(&space);
    let mut rdr = csv::Reader::from_reader(bytes);
    let csv_err = |source| FormatError::Csv { path: path.to_path_buf(), source };
    let found: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if found != expected {
        return Err(FormatError::Header { path: path.into(), expected: expected.join(","), found: found.join(",") });
    }
    let d = space.dim();
    let mut records = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |col: usize| FormatError::Value {
            path: path.into(),
            row: row + 1,
            column: expected[col].clone(),
            value: rec[col].to_string(),
        };
        let iteration = rec[0].parse().map_err(|_| bad(0))?;
        let phase = Phase::parse(&rec[1]).ok_or_else(|| bad(1))?;
        let mut values = Vec::with_capacity(d);
        for (j, var) in space.variables().iter().enumerate() {
            values.push(parse_value(&var.kind, &rec[2 + j]).ok_or_else(|| bad(2 + j))?);
        }
        let num = |col: usize| rec[col].parse::<f64>().map_err(|_| bad(col));
        records.push(EvaluationRecord {
            iteration,
            point: space.point(values),
            phase,
            objective: num(2 + d)?,
            eval_time: num(3 + d)?,
            solver_time: num(4 + d)?,
        });
    }
    let log = RunLog { header, records };
    log.check().map_err(|source| FormatError::Invalid { path: path.into(), source })?;
    Ok(log)
}

/// Reads the run whose sidecar is `json_path`; the CSV sits beside it.
pub fn read_run(json_path: &Path) -> Result<RunLog, FormatError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| FormatError::Io { path, source }
    };
    let text = fs::read_to_string(json_path).map_err(io_err(json_path))?;
    let header: RunHeader =
        serde_json::from_str(&text).map_err(|source| FormatError::Json { path: json_path.into(), source })?;
    let csv_path = json_path.with_extension("csv");
    let bytes = fs::read(&csv_path).map_err(io_err(&csv_path))?;
    parse_csv(&csv_path, header, &bytes)
}

/// Loads every run in `dir`, ordered by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<RunLog>, FormatError> {
    let entries = fs::read_dir(dir).map_err(|source| FormatError::Io { path: dir.into(), source })?;
    let mut sidecars: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    sidecars.sort();
    sidecars.iter().map(|p| read_run(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use surrobench_core::problems::{HpoProxy, Objective};
    use surrobench_core::rng::ALGORITHM_ID;
    use surrobench_core::{sample_uniform, Rng, RunStatus};

    fn hpo_log(n: usize) -> RunLog {
        let hpo = HpoProxy::new();
        let mut rng = Rng::new(4);
        let records = (1..=n)
            .map(|i| {
                let point = sample_uniform(hpo.space(), &mut rng);
                let objective = hpo.value(&point);
                EvaluationRecord {
                    iteration: i,
                    point,
                    objective,
                    eval_time: rng.next_f64() * 1e-3,
                    solver_time: rng.next_f64() / 3.0,
                    phase: Phase::of(i, 3),
                }
            })
            .collect();
        let header = RunHeader {
            problem_id: "hpo-proxy".into(),
            solver_id: "randomsearch".into(),
            seed: u64::MAX - 5,
            rand_evals: 3,
            rng: ALGORITHM_ID.into(),
            space: hpo.space().clone(),
            overrides: BTreeMap::from([("gp-ucb.beta".to_string(), "1.5".to_string())]),
            status: RunStatus::Complete,
            abort_reason: None,
        };
        RunLog { header, records }
    }

    #[test]
    fn columns_follow_the_schema() {
        let log = hpo_log(2);
        let text = String::from_utf8(to_csv(&log)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("iteration,phase,booster,n_estimators,"));
        assert!(first.ends_with(",k_best,objective,eval_time_s,solver_time_s"));
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let log = hpo_log(25);
        write_run(dir.path(), "hpo-proxy__randomsearch__001", &log).unwrap();
        let back = load_dir(dir.path()).unwrap();
        assert_eq!(back, vec![log]);
        assert!(fs::read_dir(dir.path()).unwrap().all(|e| !e.unwrap().path().to_string_lossy().ends_with(".tmp")));
    }

    #[test]
    fn wrong_header_rejected() {
        let log = hpo_log(1);
        let err = parse_csv(Path::new("x.csv"), log.header.clone(), b"iteration,phase\n1,random_init\n").unwrap_err();
        assert!(matches!(err, FormatError::Header { .. }));
    }
}
