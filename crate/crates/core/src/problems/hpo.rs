//! Conditional mixed-variable proxy for the gradient-boosting HPO problem.
//!
//! The space mimics a boosted-tree pipeline: a root `booster` choice gates
//! tree-specific and linear-specific parameters, and two preprocessing
//! switches gate their own sub-parameters.
//!
//! | variable           | kind        | range                          | active when          |
//! |--------------------|-------------|--------------------------------|----------------------|
//! | `booster`          | categorical | gbtree, gblinear               |                      |
//! | `n_estimators`     | integer     | 10..=500                       |                      |
//! | `learning_rate`    | continuous  | [0.001, 1]                     |                      |
//! | `max_depth`        | integer     | 1..=15                         | booster = gbtree     |
//! | `subsample`        | continuous  | [0.3, 1]                       | booster = gbtree     |
//! | `colsample_bytree` | continuous  | [0.3, 1]                       | booster = gbtree     |
//! | `min_child_weight` | integer     | 1..=20                         | booster = gbtree     |
//! | `reg_lambda`       | continuous  | [0, 10]                        |                      |
//! | `reg_alpha`        | continuous  | [0, 10]                        | booster = gblinear   |
//! | `scaler`           | categorical | none, standard, minmax, robust |                      |
//! | `pca`              | categorical | off, on                        |                      |
//! | `pca_components`   | integer     | 2..=27                         | pca = on             |
//! | `feature_selection`| categorical | none, kbest                    |                      |
//! | `k_best`           | integer     | 5..=27                         | feature_selection = kbest |
//!
//! Simulated training cost in seconds, with `features` the number of input
//! features left after preprocessing (27 by default):
//!
//! ```text
//! gbtree:   0.01 · n_estimators · (1 + 0.5 · max_depth)
//!                · (0.2 + 0.8 · subsample) · (0.2 + 0.8 · colsample_bytree) · features / 27
//! gblinear: 0.004 · n_estimators · features / 27
//! + 0.1 (any scaler) + 0.02 · pca_components (pca on) + 0.05 (kbest)
//! ```
//!
//! With `r = log10(learning_rate · n_estimators / 30)` the accuracy is
//!
//! ```text
//! gbtree:   0.92 - 0.05 r² - 0.003 (max_depth - 6)² - 0.1 (subsample - 0.8)²
//!                - 0.1 (colsample_bytree - 0.7)² - 0.002 (min_child_weight - 3)²
//!                - 0.002 (reg_lambda - 2)²
//! gblinear: 0.72 - 0.04 r² - 0.003 (reg_lambda - 1)² - 0.004 (reg_alpha - 0.5)²
//!                + {0, 0.03, 0.02, 0.03} for scaler {none, standard, minmax, robust}
//! pca on:   - 0.01 - 0.15 (1 - pca_components / 27)²
//! kbest:    - 0.08 (1 - k_best / 27)²
//! ```
//!
//! clamped to `[0.05, 0.99]`. The objective is `-accuracy` when the
//! simulated cost is at most [`HPO_TIME_LIMIT`], else exactly `0`. Only
//! active variables enter either formula.

use alloc::vec;

use crate::math;
use crate::problems::Objective;
use crate::space::{Point, SearchSpace, Value, VariableSpec};

/// Simulated seconds allowed per configuration.
pub const HPO_TIME_LIMIT: f64 = 8.0;
const N_FEATURES: f64 = 27.0;

mod idx {
    pub const BOOSTER: usize = 0;
    pub const N_ESTIMATORS: usize = 1;
    pub const LEARNING_RATE: usize = 2;
    pub const MAX_DEPTH: usize = 3;
    pub const SUBSAMPLE: usize = 4;
    pub const COLSAMPLE: usize = 5;
    pub const MIN_CHILD_WEIGHT: usize = 6;
    pub const REG_LAMBDA: usize = 7;
    pub const REG_ALPHA: usize = 8;
    pub const SCALER: usize = 9;
    pub const PCA_COMPONENTS: usize = 11;
    pub const K_BEST: usize = 13;
}

#[derive(Clone, Debug)]
pub struct HpoProxy {
    space: SearchSpace,
}

impl Default for HpoProxy {
    fn default() -> Self {
        Self::new()
    }
}

impl HpoProxy {
    pub fn new() -> Self {
        let vars = vec![
            VariableSpec::categorical("booster", &["gbtree", "gblinear"]),
            VariableSpec::integer("n_estimators", 10, 500),
            VariableSpec::continuous("learning_rate", 0.001, 1.0),
            VariableSpec::integer("max_depth", 1, 15).when("booster", "gbtree"),
            VariableSpec::continuous("subsample", 0.3, 1.0).when("booster", "gbtree"),
            VariableSpec::continuous("colsample_bytree", 0.3, 1.0).when("booster", "gbtree"),
            VariableSpec::integer("min_child_weight", 1, 20).when("booster", "gbtree"),
            VariableSpec::continuous("reg_lambda", 0.0, 10.0),
            VariableSpec::continuous("reg_alpha", 0.0, 10.0).when("booster", "gblinear"),
            VariableSpec::categorical("scaler", &["none", "standard", "minmax", "robust"]),
            VariableSpec::categorical("pca", &["off", "on"]),
            VariableSpec::integer("pca_components", 2, 27).when("pca", "on"),
            VariableSpec::categorical("feature_selection", &["none", "kbest"]),
            VariableSpec::integer("k_best", 5, 27).when("feature_selection", "kbest"),
        ];
        Self { space: SearchSpace::new(vars).expect("valid") }
    }

    /// The library-default configuration (cost 4 simulated seconds).
    pub fn default_point(&self) -> Point {
        self.space.point(vec![
            Value::Cat(0),
            Value::Int(100),
            Value::Real(0.3),
            Value::Int(6),
            Value::Real(1.0),
            Value::Real(1.0),
            Value::Int(1),
            Value::Real(1.0),
            Value::Real(0.0),
            Value::Cat(0),
            Value::Cat(0),
            Value::Int(10),
            Value::Cat(0),
            Value::Int(10),
        ])
    }

    fn features(p: &Point) -> f64 {
        let mut f = N_FEATURES;
        if p.active[idx::PCA_COMPONENTS] {
            f = f.min(p.values[idx::PCA_COMPONENTS].as_f64());
        }
        if p.active[idx::K_BEST] {
            f = f.min(p.values[idx::K_BEST].as_f64());
        }
        f
    }

    /// Simulated training cost in seconds.
    pub fn cost(&self, p: &Point) -> f64 {
        let v = |i: usize| p.values[i].as_f64();
        let n_est = v(idx::N_ESTIMATORS);
        let scale = Self::features(p) / N_FEATURES;
        let model = if p.values[idx::BOOSTER] == Value::Cat(0) {
            0.01 * n_est
                * (1.0 + 0.5 * v(idx::MAX_DEPTH))
                * (0.2 + 0.8 * v(idx::SUBSAMPLE))
                * (0.2 + 0.8 * v(idx::COLSAMPLE))
                * scale
        } else {
            0.004 * n_est * scale
        };
        let mut prep = 0.0;
        if p.values[idx::SCALER] != Value::Cat(0) {
            prep += 0.1;
        }
        if p.active[idx::PCA_COMPONENTS] {
            prep += 0.02 * v(idx::PCA_COMPONENTS);
        }
        if p.active[idx::K_BEST] {
            prep += 0.05;
        }
        model + prep
    }

    /// Synthetic cross-validated accuracy in `[0.05, 0.99]`.
    pub fn accuracy(&self, p: &Point) -> f64 {
        let v = |i: usize| p.values[i].as_f64();
        let sq = |x: f64| x * x;
        let r = math::log10(v(idx::LEARNING_RATE) * v(idx::N_ESTIMATORS) / 30.0);
        let mut q = if p.values[idx::BOOSTER] == Value::Cat(0) {
            0.92 - 0.05 * sq(r)
                - 0.003 * sq(v(idx::MAX_DEPTH) - 6.0)
                - 0.1 * sq(v(idx::SUBSAMPLE) - 0.8)
                - 0.1 * sq(v(idx::COLSAMPLE) - 0.7)
                - 0.002 * sq(v(idx::MIN_CHILD_WEIGHT) - 3.0)
                - 0.002 * sq(v(idx::REG_LAMBDA) - 2.0)
        } else {
            let scaler_bonus = [0.0, 0.03, 0.02, 0.03][v(idx::SCALER) as usize];
            0.72 - 0.04 * sq(r) - 0.003 * sq(v(idx::REG_LAMBDA) - 1.0) - 0.004 * sq(v(idx::REG_ALPHA) - 0.5)
                + scaler_bonus
        };
        if p.active[idx::PCA_COMPONENTS] {
            q -= 0.01 + 0.15 * sq(1.0 - v(idx::PCA_COMPONENTS) / N_FEATURES);
        }
        if p.active[idx::K_BEST] {
            q -= 0.08 * sq(1.0 - v(idx::K_BEST) / N_FEATURES);
        }
        q.clamp(0.05, 0.99)
    }
}

impl Objective for HpoProxy {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn value(&self, p: &Point) -> f64 {
        if self.cost(p) > HPO_TIME_LIMIT {
            return 0.0;
        }
        -self.accuracy(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::space::{sample_uniform, validate_point, VarKind};
    use alloc::vec::Vec;

    fn conditional_variables(space: &SearchSpace) -> Vec<usize> {
        space.variables().iter().enumerate().filter(|(_, v)| v.condition.is_some()).map(|(i, _)| i).collect()
    }

    #[test]
    fn default_is_feasible() {
        let h = HpoProxy::new();
        let p = h.default_point();
        assert!(validate_point(h.space(), &p).is_ok());
        assert!(h.cost(&p) <= HPO_TIME_LIMIT);
        assert!(h.value(&p) < 0.0);
    }

    #[test]
    fn maximal_cost_knobs_time_out() {
        let h = HpoProxy::new();
        let mut values = h.default_point().values;
        values[idx::N_ESTIMATORS] = Value::Int(500);
        values[idx::MAX_DEPTH] = Value::Int(15);
        let p = h.space().point(values);
        assert!(h.cost(&p) > HPO_TIME_LIMIT);
        assert_eq!(h.value(&p).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn all_kinds_and_conditions_present() {
        let h = HpoProxy::new();
        let kinds = h.space().variables().iter().map(|v| &v.kind);
        assert!(kinds.clone().any(|k| matches!(k, VarKind::Continuous { .. })));
        assert!(kinds.clone().any(|k| matches!(k, VarKind::Integer { .. })));
        assert!(kinds.clone().any(|k| matches!(k, VarKind::Categorical { .. })));
        assert!(h.space().has_conditions());
        // the root gates at least two children
        let gated = h.space().variables().iter().filter(|v| v.condition.as_ref().is_some_and(|c| c.parent == "booster"));
        assert!(gated.count() >= 2);
    }

    #[test]
    fn inactive_children_have_no_effect() {
        let h = HpoProxy::new();
        let space = h.space();
        let mut rng = Rng::new(31);
        let cond = conditional_variables(space);
        for _ in 0..500 {
            let p = sample_uniform(space, &mut rng);
            let base = h.value(&p);
            for &i in &cond {
                if p.active[i] {
                    continue;
                }
                let mut values = p.values.clone();
                values[i] = crate::space::sample_value(&space.variables()[i], &mut rng);
                let q = space.point(values);
                assert_eq!(h.value(&q).to_bits(), base.to_bits());
            }
        }
    }

    #[test]
    fn accuracy_in_open_unit_interval() {
        let h = HpoProxy::new();
        let mut rng = Rng::new(2);
        for _ in 0..2000 {
            let p = sample_uniform(h.space(), &mut rng);
            let a = h.accuracy(&p);
            assert!(a > 0.0 && a < 1.0);
            let v = h.value(&p);
            assert!(v == 0.0 || v == -a);
        }
    }
}
