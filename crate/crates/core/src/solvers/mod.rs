//! The suggest/evaluate/observe loop and the solver portfolio.
//!
//! Every solver draws its first `R` suggestions with [`sample_uniform`]
//! from the main stream `Rng::new(seed)`. After that:
//!
//! | id             | model                         | acquisition                                            |
//! |----------------|-------------------------------|--------------------------------------------------------|
//! | `randomsearch` | none                          | uniform sample                                         |
//! | `gp-ucb`       | Matérn-5/2 GP                 | UCB over uniform candidates + coordinate line search   |
//! | `rff-local`    | random Fourier ridge model    | multistart descent from the incumbent + Gaussian jitter|
//! | `pwl-low`      | ReLU-basis ridge model        | coordinate descent from the incumbent, perturb p=1/d   |
//! | `pwl-high`     | ReLU-basis ridge model        | same model, perturb p=4/d                              |
//! | `forest-ucb`   | bagged regression forest      | UCB over uniform samples + incumbent mutations         |
//!
//! Models are refitted on every observation once `R` points are in the
//! history, on the unit-box encoding of the points (see [`round_to_space`]).
//! `gp-ucb` and `rff-local` are continuous-native; on spaces with discrete
//! variables they must be built with [`Adapter::RoundContinuous`].
//!
//! Each solver also counts abstract work units (roughly floating-point
//! operations) spent in fitting and acquisition; [`Solver::take_work`]
//! lets a harness charge a deterministic solver time.

mod encoding;
mod params;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use encoding::round_to_space;
pub use params::{parse_override, SolverKind, SolverParams};

use encoding::UnitBox;

use crate::math;
use crate::rng::Rng;
use crate::space::{sample_uniform, sample_value, Point, SearchSpace, Value};
use crate::surrogates::{
    BasisModel, FeatureMap, FitError, Forest, ForestParams, GpConfig, GpHyper, GpModel, Predict,
};

/// Seconds charged per work unit when solver time is simulated.
pub const WORK_UNIT_SECONDS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("unknown solver kind `{0}`")]
    UnknownKind(String),
    #[error("solver `{kind}` has no parameter `{key}`")]
    UnknownOverride { kind: String, key: String },
    #[error("malformed override `{key}={value}`")]
    BadOverride { key: String, value: String },
    #[error("non-finite objective")]
    NonFiniteObjective,
    #[error("solver `{0}` needs the round_continuous adapter on spaces with discrete variables")]
    NeedsAdapter(String),
    #[error("round_continuous only wraps continuous-native solvers, not `{0}`")]
    AdapterNotApplicable(String),
    #[error("point does not match the solver's space")]
    PointMismatch,
    #[error(transparent)]
    Fit(#[from] FitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adapter {
    None,
    /// Relax integer and categorical variables to their encoded real range
    /// and round suggestions back to valid values.
    RoundContinuous,
}

impl Adapter {
    /// The adapter a kind needs on `space`.
    pub fn required(kind: SolverKind, space: &SearchSpace) -> Adapter {
        if kind.is_continuous_native() && !space.is_continuous() {
            Adapter::RoundContinuous
        } else {
            Adapter::None
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Adapter::None => "none",
            Adapter::RoundContinuous => "round_continuous",
        }
    }
}

/// Acquisition score `-mean + β √variance`, to be maximised.
pub fn ucb_score(mean: f64, variance: f64, beta: f64) -> f64 {
    -mean + beta * math::sqrt(variance.max(0.0))
}

/// Index of the largest score; the first one wins ties and NaN never wins.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Gp(GpModel),
    Forest(Forest),
    Basis(BasisModel),
}

impl TrainedModel {
    pub fn mean(&self, z: &[f64]) -> f64 {
        match self {
            TrainedModel::Gp(m) => m.predict(z),
            TrainedModel::Forest(m) => m.predict(z),
            TrainedModel::Basis(m) => m.predict(z),
        }
    }

    pub fn mean_var(&self, z: &[f64]) -> (f64, f64) {
        match self {
            TrainedModel::Gp(m) => m.predict_mean_var(z),
            TrainedModel::Forest(m) => (m.predict(z), m.variance(z).unwrap_or(0.0)),
            TrainedModel::Basis(m) => (m.predict(z), 0.0),
        }
    }
}

/// One optimisation run's solver state.
#[derive(Clone, Debug)]
pub struct Solver {
    kind: SolverKind,
    space: SearchSpace,
    unit: UnitBox,
    adapter: Adapter,
    params: SolverParams,
    rand_evals: usize,
    seed: u64,
    history: Vec<(Point, f64)>,
    encoded: Vec<Vec<f64>>,
    model: Option<TrainedModel>,
    gp_hyper: Option<GpHyper>,
    basis: Option<FeatureMap>,
    rng: Rng,
    model_rng: Rng,
    acq_rng: Rng,
    perturb_rng: Rng,
    work: u64,
    fit_failures: usize,
}

/// Builds a solver. Continuous-native kinds on spaces with discrete
/// variables need `adapter = RoundContinuous`; other kinds reject it.
pub fn make_solver(
    kind: SolverKind,
    space: &SearchSpace,
    rand_evals: usize,
    seed: u64,
    overrides: &[(String, String)],
    adapter: Adapter,
) -> Result<Solver, SolverError> {
    if adapter == Adapter::RoundContinuous && !kind.is_continuous_native() {
        return Err(SolverError::AdapterNotApplicable(kind.id().into()));
    }
    if adapter == Adapter::None && Adapter::required(kind, space) == Adapter::RoundContinuous {
        return Err(SolverError::NeedsAdapter(kind.id().into()));
    }
    let mut params = SolverParams::defaults(kind, space);
    params.apply_overrides(kind, overrides)?;
    Ok(Solver {
        kind,
        space: space.clone(),
        unit: UnitBox::new(space),
        adapter,
        params,
        rand_evals,
        seed,
        history: Vec::new(),
        encoded: Vec::new(),
        model: None,
        gp_hyper: None,
        basis: None,
        rng: Rng::new(seed),
        model_rng: Rng::stream(seed, 1),
        acq_rng: Rng::stream(seed, 2),
        perturb_rng: Rng::stream(seed, 3),
        work: 0,
        fit_failures: 0,
    })
}

impl Solver {
    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn adapter(&self) -> Adapter {
        self.adapter
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn rand_evals(&self) -> usize {
        self.rand_evals
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn history(&self) -> &[(Point, f64)] {
        &self.history
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn model(&self) -> Option<&TrainedModel> {
        self.model.as_ref()
    }

    pub fn fit_failures(&self) -> usize {
        self.fit_failures
    }

    /// Work units accumulated since the last call.
    pub fn take_work(&mut self) -> u64 {
        core::mem::take(&mut self.work)
    }

    /// Best observed point and value; ties go to the earliest.
    pub fn incumbent(&self) -> Option<&(Point, f64)> {
        let ys: Vec<f64> = self.history.iter().map(|(_, y)| -y).collect();
        argmax(&ys).map(|i| &self.history[i])
    }

    /// Posterior mean and variance of the current model at `p`.
    pub fn predict(&self, p: &Point) -> Option<(f64, f64)> {
        self.model.as_ref().map(|m| m.mean_var(&self.unit.to_unit(p)))
    }

    /// UCB scores of `candidates` under the current model.
    pub fn ucb_scores(&self, candidates: &[Point]) -> Option<Vec<f64>> {
        let m = self.model.as_ref()?;
        Some(
            candidates
                .iter()
                .map(|p| {
                    let (mu, var) = m.mean_var(&self.unit.to_unit(p));
                    ucb_score(mu, var, self.params.beta)
                })
                .collect(),
        )
    }

    /// Index of the candidate with the largest UCB score, lowest index on
    /// ties; `None` without a model.
    pub fn select_among(&self, candidates: &[Point]) -> Option<usize> {
        argmax(&self.ucb_scores(candidates)?)
    }

    /// The candidate set the next [`Solver::suggest`] scores first, for the
    /// UCB kinds in their model phase. `gp-ucb` then refines the best
    /// candidates unless `refinements` is 0; `forest-ucb` returns the
    /// argmax directly.
    pub fn candidate_set(&self) -> Option<Vec<Point>> {
        self.model.as_ref()?;
        let mut probe = self.clone();
        match self.kind {
            SolverKind::GpUcb => {
                let pool = probe.gp_pool();
                Some(pool.iter().map(|z| self.unit.to_point(&self.space, z)).collect())
            }
            SolverKind::ForestUcb => Some(probe.forest_candidates()),
            _ => None,
        }
    }

    pub fn suggest(&mut self) -> Point {
        let d = self.space.dim() as u64;
        let model_phase = self.kind.is_model_based() && self.history.len() >= self.rand_evals;
        if !model_phase || self.model.is_none() {
            self.work += d + 1;
            return sample_uniform(&self.space, &mut self.rng);
        }
        match self.kind {
            SolverKind::RandomSearch => unreachable!(),
            SolverKind::GpUcb => self.suggest_gp(),
            SolverKind::ForestUcb => self.suggest_forest(),
            SolverKind::RffLocal => self.suggest_rff(),
            SolverKind::PwlLowExplore | SolverKind::PwlHighExplore => self.suggest_pwl(),
        }
    }

    pub fn observe(&mut self, point: Point, y: f64) -> Result<(), SolverError> {
        if !y.is_finite() {
            return Err(SolverError::NonFiniteObjective);
        }
        if point.values.len() != self.space.dim() {
            return Err(SolverError::PointMismatch);
        }
        self.encoded.push(self.unit.to_unit(&point));
        self.history.push((point, y));
        if self.kind.is_model_based() && self.history.len() >= self.rand_evals {
            match self.refit() {
                Ok(m) => self.model = Some(m),
                Err(_) => {
                    self.fit_failures += 1;
                    self.model = None;
                }
            }
        }
        Ok(())
    }

    fn targets(&self) -> Vec<f64> {
        self.history.iter().map(|(_, y)| *y).collect()
    }

    fn refit(&mut self) -> Result<TrainedModel, FitError> {
        let n = self.history.len() as u64;
        let d = self.space.dim() as u64;
        let y = self.targets();
        match self.kind {
            SolverKind::RandomSearch => unreachable!(),
            SolverKind::GpUcb => {
                let p = &self.params;
                let fresh = self.gp_hyper.is_none();
                let due = (self.history.len() - self.rand_evals) % p.reopt_every.max(1) == 0;
                let optimise = p.optimise && (fresh || due);
                let restarts = if fresh { p.restarts } else { 2.min(p.restarts.max(1)) };
                let start = self.gp_hyper.unwrap_or(GpHyper {
                    lengthscale: p.lengthscale * math::sqrt(d as f64),
                    signal_var: p.signal_var,
                    noise_var: p.noise_var,
                });
                let config = GpConfig {
                    hyper: start,
                    optimise,
                    restarts,
                    steps: p.hyper_steps,
                    normalize_y: true,
                    seed: self.model_rng.next_u64(),
                };
                let evals = if optimise { (restarts * (p.hyper_steps + 1)) as u64 } else { 0 };
                self.work += (evals + 1) * (n * n * n + n * n * d);
                let m = GpModel::fit(&self.encoded, &y, math::sqrt(d as f64), &config)?;
                self.gp_hyper = Some(m.hyper);
                Ok(TrainedModel::Gp(m))
            }
            SolverKind::ForestUcb => {
                let fp = ForestParams {
                    n_trees: self.params.trees,
                    min_leaf: self.params.min_leaf.min(self.history.len()),
                    max_depth: None,
                    max_features: None,
                    seed: self.model_rng.next_u64(),
                };
                let log_n = 64 - n.leading_zeros() as u64;
                self.work += fp.n_trees as u64 * n * d * (log_n + 1) * (log_n + 1);
                Ok(TrainedModel::Forest(Forest::fit(&self.encoded, &y, &fp)?))
            }
            SolverKind::RffLocal | SolverKind::PwlLowExplore | SolverKind::PwlHighExplore => {
                let features = self.basis_features();
                let m = features.len() as u64;
                let k = m.min(n);
                self.work += n * m * (d + k) + k * k * k;
                Ok(TrainedModel::Basis(BasisModel::fit_with(features, &self.encoded, &y, self.params.ridge)?))
            }
        }
    }

    /// The basis expansion is drawn once per solver from its seed alone.
    fn basis_features(&mut self) -> FeatureMap {
        if let Some(f) = &self.basis {
            return f.clone();
        }
        let d = self.space.dim();
        let lo = vec![0.0; d];
        let hi = vec![1.0; d];
        let mut rng = Rng::stream(self.seed, 4);
        let f = match self.kind {
            SolverKind::RffLocal => FeatureMap::cosine(self.params.n_basis, self.params.lengthscale, &lo, &hi, &mut rng),
            _ => FeatureMap::relu(self.params.n_basis, &lo, &hi, &mut rng),
        };
        self.basis = Some(f.clone());
        f
    }

    fn model_ref(&self) -> &TrainedModel {
        self.model.as_ref().expect("model present in the model phase")
    }

    fn eval_cost(&self) -> u64 {
        let n = self.history.len() as u64;
        let d = self.space.dim() as u64;
        match self.model_ref() {
            TrainedModel::Gp(_) => n * d + n * n / 2,
            TrainedModel::Forest(f) => f.trees.len() as u64 * (64 - n.leading_zeros() as u64 + 1) * 2,
            TrainedModel::Basis(b) => b.coef.len() as u64 * (d + 1),
        }
    }

    fn ucb_unit(&self, z: &[f64]) -> f64 {
        let (mu, var) = self.model_ref().mean_var(z);
        ucb_score(mu, var, self.params.beta)
    }

    fn uniform_unit(&mut self) -> Vec<f64> {
        let mut z: Vec<f64> = (0..self.space.dim()).map(|_| self.acq_rng.next_f64()).collect();
        self.unit.project(&mut z);
        z
    }

    fn gp_pool(&mut self) -> Vec<Vec<f64>> {
        (0..self.params.candidates.max(1)).map(|_| self.uniform_unit()).collect()
    }

    fn suggest_gp(&mut self) -> Point {
        let p = self.params.clone();
        let d = self.unit.dim();
        let mut pool = self.gp_pool();
        let mut scores: Vec<f64> = pool.iter().map(|z| self.ucb_unit(z)).collect();
        let mut evals = pool.len() as u64;
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        for &start in order.iter().take(p.refinements) {
            let mut z = pool[start].clone();
            let mut best = scores[start];
            let mut delta = 0.1;
            let mut since_gain = 0;
            for s in 0..p.refine_steps {
                let j = s % d;
                let step = self.unit.unit_step(j).map_or(delta, |u| u.max(delta));
                let mut moved = false;
                for dir in [1.0, -1.0] {
                    let mut c = z.clone();
                    c[j] += dir * step;
                    self.unit.project(&mut c);
                    if c[j] == z[j] {
                        continue;
                    }
                    let sc = self.ucb_unit(&c);
                    evals += 1;
                    if sc > best {
                        best = sc;
                        z = c;
                        moved = true;
                        break;
                    }
                }
                since_gain = if moved { 0 } else { since_gain + 1 };
                if since_gain >= d {
                    delta *= 0.5;
                    since_gain = 0;
                }
            }
            pool.push(z);
            scores.push(best);
        }
        self.work += evals * self.eval_cost();
        let i = argmax(&scores).unwrap_or(0);
        self.unit.to_point(&self.space, &pool[i])
    }

    /// Indices of the `k` best observations, earliest first among ties.
    fn best_indices(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.history.len()).collect();
        idx.sort_by(|&a, &b| self.history[a].1.total_cmp(&self.history[b].1).then(a.cmp(&b)));
        idx.truncate(k);
        idx
    }

    /// The frozen candidate set `forest-ucb` scores at this iteration.
    fn forest_candidates(&mut self) -> Vec<Point> {
        let p = &self.params;
        let (n_uniform, n_mut, n_parents) = (p.candidates, p.mutations, p.parents.max(1));
        let mut cands: Vec<Point> = (0..n_uniform).map(|_| sample_uniform(&self.space, &mut self.acq_rng)).collect();
        let parents = self.best_indices(n_parents);
        if !parents.is_empty() {
            for k in 0..n_mut {
                let base = &self.history[parents[k % parents.len()]].0;
                let j = self.acq_rng.below(self.space.dim() as u64) as usize;
                let mut values = base.values.clone();
                values[j] = sample_value(&self.space.variables()[j], &mut self.acq_rng);
                cands.push(self.space.point(values));
            }
        }
        cands
    }

    fn suggest_forest(&mut self) -> Point {
        let cands = self.forest_candidates();
        self.work += cands.len() as u64 * self.eval_cost();
        let i = self.select_among(&cands).unwrap_or(0);
        cands.into_iter().nth(i).expect("non-empty candidate set")
    }

    fn suggest_rff(&mut self) -> Point {
        let p = self.params.clone();
        let d = self.unit.dim();
        let inc = self.best_indices(1)[0];
        let mut starts = vec![self.encoded[inc].clone()];
        for _ in 1..p.starts.max(1) {
            starts.push((0..d).map(|_| self.acq_rng.next_f64()).collect());
        }
        let TrainedModel::Basis(model) = self.model_ref().clone() else { unreachable!() };
        let mut evals = 0u64;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mut z in starts {
            let mut f = model.predict(&z);
            let mut alpha = 0.05;
            for _ in 0..p.steps {
                let g = model.gradient(&z);
                evals += 2;
                let norm = math::sqrt(g.iter().map(|v| v * v).sum());
                if !(norm > 0.0) || alpha < 1e-8 {
                    break;
                }
                let c: Vec<f64> =
                    z.iter().zip(&g).map(|(zi, gi)| (zi - alpha * gi / norm).clamp(0.0, 1.0)).collect();
                let fc = model.predict(&c);
                if fc < f {
                    z = c;
                    f = fc;
                    alpha *= 1.5;
                } else {
                    alpha *= 0.5;
                }
            }
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, z));
            }
        }
        self.work += evals * self.eval_cost();
        let (_, mut z) = best.expect("at least one start");
        for u in z.iter_mut() {
            *u += p.jitter * self.perturb_rng.normal();
        }
        self.unit.project(&mut z);
        self.unit.to_point(&self.space, &z)
    }

    fn suggest_pwl(&mut self) -> Point {
        let p = self.params.clone();
        let d = self.unit.dim();
        let inc = self.best_indices(1)[0];
        let mut z = self.encoded[inc].clone();
        let model = self.model_ref().clone();
        let mut f = model.mean(&z);
        let mut evals = 1u64;
        let mut delta = vec![0.1; d];
        for _ in 0..p.sweeps {
            for j in 0..d {
                match self.unit.levels(j) {
                    Some(levels) if levels <= 16 => {
                        let step = self.unit.unit_step(j).unwrap();
                        for l in 0..levels {
                            let mut c = z.clone();
                            c[j] = l as f64 * step;
                            if c[j] == z[j] {
                                continue;
                            }
                            let fc = model.mean(&c);
                            evals += 1;
                            if fc < f {
                                f = fc;
                                z = c;
                            }
                        }
                    }
                    levels => {
                        let step = levels.map_or(delta[j], |_| self.unit.unit_step(j).unwrap().max(delta[j]));
                        let mut moved = false;
                        for dir in [1.0, -1.0] {
                            let mut c = z.clone();
                            c[j] += dir * step;
                            self.unit.project(&mut c);
                            if c[j] == z[j] {
                                continue;
                            }
                            let fc = model.mean(&c);
                            evals += 1;
                            if fc < f {
                                f = fc;
                                z = c;
                                moved = true;
                                break;
                            }
                        }
                        if !moved {
                            delta[j] *= 0.5;
                        }
                    }
                }
            }
        }
        self.work += evals * self.eval_cost();
        // exploration: each variable is perturbed with probability explore/d
        let prob = (p.explore / d as f64).min(1.0);
        let mut point = self.unit.to_point(&self.space, &z);
        let mut values = point.values.clone();
        for (j, var) in self.space.variables().iter().enumerate() {
            if !self.perturb_rng.chance(prob) {
                continue;
            }
            values[j] = match (values[j], &var.kind) {
                (Value::Real(x), crate::space::VarKind::Continuous { lower, upper }) => {
                    let w = upper - lower;
                    Value::Real((x + 0.1 * w * self.perturb_rng.normal()).clamp(*lower, *upper))
                }
                (Value::Int(k), crate::space::VarKind::Integer { lower, upper }) => {
                    let up = self.perturb_rng.chance(0.5);
                    let k2 = if (up && k < *upper) || k == *lower { k + 1 } else { k - 1 };
                    Value::Int(k2.clamp(*lower, *upper))
                }
                (Value::Cat(c), crate::space::VarKind::Categorical { categories }) => {
                    let r = self.perturb_rng.below(categories.len() as u64 - 1) as usize;
                    Value::Cat(if r >= c { r + 1 } else { r })
                }
                (v, _) => v,
            };
        }
        if values != point.values {
            point = self.space.point(values);
        }
        point
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{EspProxy, Objective, PipeProxy};
    use crate::space::{validate_point, VariableSpec};
    use alloc::string::ToString;

    fn run(solver: &mut Solver, f: &dyn Objective, n: usize) {
        for _ in 0..n {
            let p = solver.suggest();
            let y = f.value(&p);
            solver.observe(p, y).unwrap();
        }
    }

    #[test]
    fn ucb_examples() {
        assert_eq!(ucb_score(0.0, 1.0, 2.576), 2.576);
        assert_eq!(ucb_score(1.5, 0.0, 2.576), -1.5);
    }

    #[test]
    fn initial_points_follow_main_stream() {
        let f = PipeProxy::new(4);
        for kind in SolverKind::ALL {
            let mut s = make_solver(kind, f.space(), 5, 42, &[], Adapter::None).unwrap();
            let mut rng = Rng::new(42);
            for _ in 0..5 {
                let p = s.suggest();
                assert_eq!(p, sample_uniform(f.space(), &mut rng));
                let y = f.value(&p);
                s.observe(p, y).unwrap();
            }
        }
    }

    #[test]
    fn random_search_never_models() {
        let f = PipeProxy::new(3);
        let mut s = make_solver(SolverKind::RandomSearch, f.space(), 2, 1, &[], Adapter::None).unwrap();
        run(&mut s, &f, 30);
        assert!(s.model().is_none());
        assert_eq!(s.iterations(), 30);
    }

    #[test]
    fn nan_objective_rejected() {
        let f = PipeProxy::new(2);
        let mut s = make_solver(SolverKind::GpUcb, f.space(), 2, 1, &[], Adapter::None).unwrap();
        let p = s.suggest();
        assert_eq!(s.observe(p, f64::NAN), Err(SolverError::NonFiniteObjective));
        assert_eq!(SolverError::NonFiniteObjective.to_string(), "non-finite objective");
        assert_eq!(s.iterations(), 0);
    }

    #[test]
    fn adapter_rules() {
        let esp = EspProxy::new(6, 3, 2, 0);
        assert!(matches!(
            make_solver(SolverKind::GpUcb, esp.space(), 3, 0, &[], Adapter::None),
            Err(SolverError::NeedsAdapter(_))
        ));
        assert!(matches!(
            make_solver(SolverKind::ForestUcb, esp.space(), 3, 0, &[], Adapter::RoundContinuous),
            Err(SolverError::AdapterNotApplicable(_))
        ));
        assert_eq!(Adapter::required(SolverKind::RffLocal, esp.space()), Adapter::RoundContinuous);
        assert_eq!(Adapter::required(SolverKind::PwlLowExplore, esp.space()), Adapter::None);
    }

    #[test]
    fn every_kind_produces_valid_points_on_discrete_space() {
        let esp = EspProxy::new(8, 4, 3, 3);
        for kind in SolverKind::ALL {
            let adapter = Adapter::required(kind, esp.space());
            let mut s = make_solver(kind, esp.space(), 5, 9, &[], adapter).unwrap();
            for _ in 0..15 {
                let p = s.suggest();
                assert!(validate_point(esp.space(), &p).is_ok(), "{kind}");
                let y = esp.value(&p);
                s.observe(p, y).unwrap();
            }
            if kind.is_model_based() {
                assert!(s.model().is_some(), "{kind}");
            }
        }
    }

    #[test]
    fn overrides_applied_and_checked() {
        let f = PipeProxy::new(3);
        let ov = [("gp-ucb.beta".to_string(), "1.5".to_string()), ("pwl-low.explore".to_string(), "2".to_string())];
        let s = make_solver(SolverKind::GpUcb, f.space(), 2, 0, &ov, Adapter::None).unwrap();
        assert_eq!(s.params().beta, 1.5);
        let bad = [("gp-ucb.explore".to_string(), "2".to_string())];
        assert!(matches!(
            make_solver(SolverKind::GpUcb, f.space(), 2, 0, &bad, Adapter::None),
            Err(SolverError::UnknownOverride { .. })
        ));
        let bad = [("gp-ucb.beta".to_string(), "lots".to_string())];
        assert!(matches!(
            make_solver(SolverKind::GpUcb, f.space(), 2, 0, &bad, Adapter::None),
            Err(SolverError::BadOverride { .. })
        ));
        assert_eq!(parse_override("gp-ucb.beta=3").unwrap(), ("gp-ucb.beta".to_string(), "3".to_string()));
        assert!(parse_override("beta=3").is_err());
    }

    #[test]
    fn pwl_high_uses_thousand_bases_on_continuous_space() {
        let f = PipeProxy::new(10);
        let mut s = make_solver(SolverKind::PwlHighExplore, f.space(), 3, 0, &[], Adapter::None).unwrap();
        run(&mut s, &f, 4);
        let Some(TrainedModel::Basis(m)) = s.model() else { panic!("no model") };
        assert_eq!(m.n_basis(), 1000);
    }

    #[test]
    fn forest_selection_is_ucb_argmax() {
        let s = SearchSpace::new(vec![VariableSpec::continuous("a", 0.0, 1.0), VariableSpec::integer("b", 0, 4)])
            .unwrap();
        let mut solver = make_solver(SolverKind::ForestUcb, &s, 4, 5, &[], Adapter::None).unwrap();
        let mut rng = Rng::new(1);
        for _ in 0..12 {
            let p = sample_uniform(&s, &mut rng);
            let y = p.values[0].as_f64() - p.values[1].as_f64();
            solver.observe(p, y).unwrap();
        }
        let cands: Vec<Point> = (0..64).map(|_| sample_uniform(&s, &mut rng)).collect();
        let scores: Vec<f64> = cands
            .iter()
            .map(|c| {
                let (m, v) = solver.predict(c).unwrap();
                ucb_score(m, v, 2.576)
            })
            .collect();
        let mut best = 0;
        for i in 1..scores.len() {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        assert_eq!(solver.select_among(&cands), Some(best));
    }
}
