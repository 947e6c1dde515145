use surrobench_core::problems::{EspProxy, Objective, PipeProxy};
use surrobench_core::solvers::{make_solver, Adapter, Solver, SolverKind, TrainedModel};
use surrobench_core::{validate_point, Point, SearchSpace, Value, VariableSpec};

fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn run(solver: &mut Solver, f: &dyn Objective, n: usize) -> Vec<(Point, f64)> {
    let mut out = Vec::new();
    for _ in 0..n {
        let p = solver.suggest();
        validate_point(f.space(), &p).unwrap();
        let y = f.value(&p);
        solver.observe(p.clone(), y).unwrap();
        out.push((p, y));
    }
    out
}

fn unit_line() -> SearchSpace {
    SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap()
}

#[test]
fn gp_suggestion_reaches_dense_grid_ucb_maximum() {
    let space = unit_line();
    let fixed = pairs(&[("gp-ucb.optimise", "0"), ("gp-ucb.lengthscale", "0.15"), ("gp-ucb.noise_var", "1e-6")]);
    for seed in 0..5 {
        let mut s = make_solver(SolverKind::GpUcb, &space, 2, seed, &fixed, Adapter::None).unwrap();
        for (x, y) in [(0.3, 1.0), (0.7, -0.5)] {
            s.observe(space.point(vec![Value::Real(x)]), y).unwrap();
        }
        let grid: Vec<Point> = (0..=10_000).map(|i| space.point(vec![Value::Real(i as f64 / 10_000.0)])).collect();
        let scores = s.ucb_scores(&grid).unwrap();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let p = s.suggest();
        let got = s.ucb_scores(&[p]).unwrap()[0];
        assert!(got >= best - 1e-6 * best.abs().max(1.0), "seed {seed}: {got} < grid max {best}");
    }
}

#[test]
fn pwl_pair_share_identical_models() {
    let f = PipeProxy::new(4);
    let mut low = make_solver(SolverKind::PwlLowExplore, f.space(), 8, 3, &[], Adapter::None).unwrap();
    let mut high = make_solver(SolverKind::PwlHighExplore, f.space(), 8, 3, &[], Adapter::None).unwrap();
    let history = run(&mut low, &f, 20);
    for (p, y) in history {
        high.observe(p, y).unwrap();
    }
    match (low.model().unwrap(), high.model().unwrap()) {
        (TrainedModel::Basis(a), TrainedModel::Basis(b)) => {
            assert_eq!(a.features, b.features);
            assert_eq!(a.coef, b.coef);
        }
        _ => panic!("expected basis models"),
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let f = EspProxy::new(6, 5, 2, 9);
    for kind in SolverKind::ALL {
        let adapter = Adapter::required(kind, f.space());
        let mut a = make_solver(kind, f.space(), 5, 17, &[], adapter).unwrap();
        let mut b = make_solver(kind, f.space(), 5, 17, &[], adapter).unwrap();
        let ra = run(&mut a, &f, 15);
        let rb = run(&mut b, &f, 15);
        assert_eq!(ra, rb, "{kind}");
        assert_eq!(a.take_work(), b.take_work());
    }
}

#[test]
fn gp_interpolates_first_model_with_fixed_low_noise() {
    let f = PipeProxy::new(3);
    let fixed = pairs(&[("gp-ucb.optimise", "false"), ("gp-ucb.noise_var", "1e-10")]);
    let mut s = make_solver(SolverKind::GpUcb, f.space(), 10, 1, &fixed, Adapter::None).unwrap();
    let history = run(&mut s, &f, 10);
    for (p, y) in &history {
        let (mean, var) = s.predict(p).unwrap();
        assert!((mean - y).abs() < 1e-4 * y.abs().max(1.0), "{mean} vs {y}");
        assert!(var < 1e-4);
    }
}

#[test]
fn rounded_gp_on_esp_stays_valid() {
    let f = EspProxy::new(8, 6, 2, 2);
    assert!(make_solver(SolverKind::GpUcb, f.space(), 5, 0, &[], Adapter::None).is_err());
    let mut s = make_solver(SolverKind::GpUcb, f.space(), 5, 0, &[], Adapter::RoundContinuous).unwrap();
    let history = run(&mut s, &f, 50);
    assert_eq!(history.len(), 50);
    assert!(s.model().is_some());
    assert_eq!(s.fit_failures(), 0);
}

#[test]
fn forest_beats_uniform_sampling_on_esp() {
    let f = EspProxy::new(10, 6, 2, 4);
    let mut total = [0.0; 2];
    for seed in 0..3 {
        for (k, kind) in [SolverKind::RandomSearch, SolverKind::ForestUcb].into_iter().enumerate() {
            let mut s = make_solver(kind, f.space(), 10, seed, &[], Adapter::None).unwrap();
            let h = run(&mut s, &f, 60);
            total[k] += h.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        }
    }
    assert!(total[1] < total[0], "{total:?}");
}
