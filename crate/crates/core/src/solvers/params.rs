use alloc::string::{String, ToString};

use super::SolverError;
use crate::space::SearchSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverKind {
    RandomSearch,
    GpUcb,
    RffLocal,
    PwlLowExplore,
    PwlHighExplore,
    ForestUcb,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::RandomSearch,
        SolverKind::GpUcb,
        SolverKind::RffLocal,
        SolverKind::PwlLowExplore,
        SolverKind::PwlHighExplore,
        SolverKind::ForestUcb,
    ];

    /// Stable identifier used in logs and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::RandomSearch => "randomsearch",
            SolverKind::GpUcb => "gp-ucb",
            SolverKind::RffLocal => "rff-local",
            SolverKind::PwlLowExplore => "pwl-low",
            SolverKind::PwlHighExplore => "pwl-high",
            SolverKind::ForestUcb => "forest-ucb",
        }
    }

    /// Accepts the log identifier or the long snake_case name.
    pub fn parse(s: &str) -> Result<Self, SolverError> {
        let k = match s {
            "randomsearch" | "random_search" => SolverKind::RandomSearch,
            "gp-ucb" | "gp_ucb" => SolverKind::GpUcb,
            "rff-local" | "rff_local" => SolverKind::RffLocal,
            "pwl-low" | "pwl_low_explore" => SolverKind::PwlLowExplore,
            "pwl-high" | "pwl_high_explore" => SolverKind::PwlHighExplore,
            "forest-ucb" | "forest_ucb" => SolverKind::ForestUcb,
            _ => return Err(SolverError::UnknownKind(s.to_string())),
        };
        Ok(k)
    }

    /// Solvers whose internal model only understands continuous inputs.
    pub fn is_continuous_native(self) -> bool {
        matches!(self, SolverKind::GpUcb | SolverKind::RffLocal)
    }

    pub fn is_model_based(self) -> bool {
        self != SolverKind::RandomSearch
    }
}

impl core::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.id())
    }
}

/// Tunable settings; which ones a solver reads depends on its kind.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    /// UCB exploration weight.
    pub beta: f64,
    /// Uniform acquisition candidates.
    pub candidates: usize,
    /// Forest: single-variable mutations of the best incumbents.
    pub mutations: usize,
    /// Forest: number of incumbents to mutate.
    pub parents: usize,
    /// GP: candidates refined by coordinate line search.
    pub refinements: usize,
    pub refine_steps: usize,
    /// GP hyperparameter search.
    pub optimise: bool,
    pub restarts: usize,
    pub hyper_steps: usize,
    /// GP: observations between hyperparameter re-optimisations.
    pub reopt_every: usize,
    pub lengthscale: f64,
    pub signal_var: f64,
    pub noise_var: f64,
    pub trees: usize,
    pub min_leaf: usize,
    pub n_basis: usize,
    pub ridge: f64,
    /// RFF: descent starts and steps per start.
    pub starts: usize,
    pub steps: usize,
    /// RFF: standard deviation of the exploration jitter in unit coordinates.
    pub jitter: f64,
    /// PWL: expected number of perturbed variables per suggestion.
    pub explore: f64,
    /// PWL: coordinate-descent sweeps over all variables.
    pub sweeps: usize,
}

const PARAMS: &[(&str, &[SolverKind])] = {
    use SolverKind::*;
    &[
        ("beta", &[GpUcb, ForestUcb]),
        ("candidates", &[GpUcb, ForestUcb]),
        ("mutations", &[ForestUcb]),
        ("parents", &[ForestUcb]),
        ("refinements", &[GpUcb]),
        ("refine_steps", &[GpUcb]),
        ("optimise", &[GpUcb]),
        ("restarts", &[GpUcb]),
        ("hyper_steps", &[GpUcb]),
        ("reopt_every", &[GpUcb]),
        ("lengthscale", &[GpUcb, RffLocal]),
        ("signal_var", &[GpUcb]),
        ("noise_var", &[GpUcb]),
        ("trees", &[ForestUcb]),
        ("min_leaf", &[ForestUcb]),
        ("n_basis", &[RffLocal, PwlLowExplore, PwlHighExplore]),
        ("ridge", &[RffLocal, PwlLowExplore, PwlHighExplore]),
        ("starts", &[RffLocal]),
        ("steps", &[RffLocal]),
        ("jitter", &[RffLocal]),
        ("explore", &[PwlLowExplore, PwlHighExplore]),
        ("sweeps", &[PwlLowExplore, PwlHighExplore]),
    ]
};

impl SolverParams {
    pub fn defaults(kind: SolverKind, space: &SearchSpace) -> Self {
        let d = space.dim();
        let n_basis = match kind {
            SolverKind::RffLocal => 500,
            _ if space.is_continuous() => 1000,
            _ => 2 * d,
        };
        Self {
            beta: 2.576,
            candidates: if kind == SolverKind::ForestUcb { 256 } else { 512 },
            mutations: 256,
            parents: 4,
            refinements: 16,
            refine_steps: 50,
            optimise: true,
            restarts: 4,
            hyper_steps: 30,
            reopt_every: 10,
            lengthscale: if kind == SolverKind::RffLocal { 0.2 } else { 0.5 },
            signal_var: 1.0,
            noise_var: 1e-4,
            trees: 10,
            min_leaf: 3,
            n_basis,
            ridge: if kind == SolverKind::RffLocal { 1e-4 } else { 1e-6 },
            starts: 5,
            steps: 50,
            jitter: 0.1,
            explore: if kind == SolverKind::PwlHighExplore { 4.0 } else { 1.0 },
            sweeps: 3,
        }
    }

    /// Applies `kind.param=value` overrides addressed to `kind`; entries for
    /// other solvers are skipped.
    pub fn apply_overrides(&mut self, kind: SolverKind, overrides: &[(String, String)]) -> Result<(), SolverError> {
        for (key, value) in overrides {
            let Some((target, name)) = key.split_once('.') else {
                return Err(SolverError::BadOverride { key: key.clone(), value: value.clone() });
            };
            if SolverKind::parse(target)? != kind {
                continue;
            }
            let known = PARAMS.iter().find(|(n, _)| *n == name);
            match known {
                Some((_, kinds)) if kinds.contains(&kind) => self.set(name, value).map_err(|_| {
                    SolverError::BadOverride { key: key.clone(), value: value.clone() }
                })?,
                _ => return Err(SolverError::UnknownOverride { kind: kind.id().to_string(), key: name.to_string() }),
            }
        }
        Ok(())
    }

    fn set(&mut self, name: &str, value: &str) -> Result<(), ()> {
        fn real(v: &str) -> Result<f64, ()> {
            v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or(())
        }
        fn count(v: &str) -> Result<usize, ()> {
            v.trim().parse::<usize>().map_err(|_| ())
        }
        match name {
            "beta" => self.beta = real(value)?,
            "candidates" => self.candidates = count(value)?,
            "mutations" => self.mutations = count(value)?,
            "parents" => self.parents = count(value)?,
            "refinements" => self.refinements = count(value)?,
            "refine_steps" => self.refine_steps = count(value)?,
            "optimise" => {
                self.optimise = match value.trim() {
                    "1" | "true" | "yes" => true,
                    "0" | "false" | "no" => false,
                    _ => return Err(()),
                }
            }
            "restarts" => self.restarts = count(value)?,
            "hyper_steps" => self.hyper_steps = count(value)?,
            "reopt_every" => self.reopt_every = count(value)?.max(1),
            "lengthscale" => self.lengthscale = real(value)?,
            "signal_var" => self.signal_var = real(value)?,
            "noise_var" => self.noise_var = real(value)?,
            "trees" => self.trees = count(value)?.max(1),
            "min_leaf" => self.min_leaf = count(value)?.max(1),
            "n_basis" => self.n_basis = count(value)?.max(1),
            "ridge" => self.ridge = real(value)?,
            "starts" => self.starts = count(value)?,
            "steps" => self.steps = count(value)?,
            "jitter" => self.jitter = real(value)?,
            "explore" => self.explore = real(value)?,
            "sweeps" => self.sweeps = count(value)?,
            _ => return Err(()),
        }
        Ok(())
    }
}

/// Splits `kind.param=value` into its key and value.
pub fn parse_override(s: &str) -> Result<(String, String), SolverError> {
    match s.split_once('=') {
        Some((k, v)) if k.contains('.') => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(SolverError::BadOverride { key: s.to_string(), value: String::new() }),
    }
}
