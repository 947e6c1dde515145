use std::collections::BTreeMap;

use proptest::prelude::*;
use surrobench::report::read_grid_csv;
use surrobench::{analyze, load_dir, read_run, run_experiment, write_run, ExperimentConfig, ProblemSpec};
use surrobench_core::analysis::{log_grid, replay, BUDGET_RANGE, EVAL_TIME_RANGE};
use surrobench_core::rng::ALGORITHM_ID;
use surrobench_core::solvers::SolverKind;
use surrobench_core::{sample_uniform, EvaluationRecord, Phase, Rng, RunHeader, RunLog, RunStatus, SearchSpace, VariableSpec};

fn mixed() -> SearchSpace {
    SearchSpace::new(vec![
        VariableSpec::categorical("mode", &["a", "b,c", "d\"e"]),
        VariableSpec::continuous("x", -1e6, 1e-3),
        VariableSpec::integer("k", -3, 3).when("mode", "b,c"),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn logs_round_trip_through_files(seed in any::<u64>(), n in 0usize..40, r in 0usize..10, scale in -300i32..300) {
        let space = mixed();
        let mut rng = Rng::new(seed);
        let records = (1..=n)
            .map(|i| {
                let point = sample_uniform(&space, &mut rng);
                EvaluationRecord {
                    iteration: i,
                    point,
                    objective: rng.normal() * 10f64.powi(scale),
                    eval_time: rng.next_f64() * 1e-9,
                    solver_time: rng.next_f64() * 1e4,
                    phase: Phase::of(i, r),
                }
            })
            .collect();
        let log = RunLog {
            header: RunHeader {
                problem_id: "mixed".into(),
                solver_id: "pwl-low".into(),
                seed,
                rand_evals: r,
                rng: ALGORITHM_ID.into(),
                space,
                overrides: BTreeMap::from([("pwl-low.explore".into(), "2".into())]),
                status: if n == 0 { RunStatus::Empty } else { RunStatus::Complete },
                abort_reason: None,
            },
            records,
        };
        let dir = tempfile::tempdir().unwrap();
        let csv = write_run(dir.path(), "run", &log).unwrap();
        prop_assert_eq!(read_run(&csv.with_extension("json")).unwrap(), log);
    }
}

#[test]
fn analyze_writes_reports_consistent_with_replay() {
    let runs = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(
        ProblemSpec::Pipe { d: 3, radius: 0.5 },
        vec![SolverKind::RandomSearch, SolverKind::PwlLowExplore],
        runs.path(),
    );
    cfg.repetitions = 3;
    cfg.max_eval = 20;
    cfg.rand_evals = 5;
    cfg.virtual_time = true;
    cfg.delay = 1.0;
    run_experiment(&cfg).unwrap();

    let out = tempfile::tempdir().unwrap();
    assert_eq!(analyze::analyse_dir(runs.path(), out.path()), 0);
    let dir = out.path().join("pipe-proxy");
    for f in ["curves.csv", "ttest.csv", "auc.csv", "grid.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let logs = load_dir(runs.path()).unwrap();
    let grid = replay(&logs, &log_grid(BUDGET_RANGE.0, BUDGET_RANGE.1, 12), &log_grid(EVAL_TIME_RANGE.0, EVAL_TIME_RANGE.1, 12)).unwrap();
    assert_eq!(read_grid_csv(&dir.join("grid.csv")).unwrap(), grid);
    let curves = std::fs::read_to_string(dir.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next(), Some("solver,iteration,mean,std,runs"));
    assert_eq!(curves.lines().count(), 1 + 2 * 15);
}

#[test]
fn analyze_rejects_missing_directory() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(analyze::analyse_dir(&out.path().join("absent"), out.path()), 1);
}
