//! Trainable regression models `g: X -> R`.
//!
//! All families work on the numeric encoding of a point produced by
//! [`encode`]: continuous and integer values as reals, categorical values
//! as their category index (ordinal). Split-based models therefore
//! threshold on category indices, so relabelling categories changes their
//! fits; this is a property of the encoding, not of the data.
//!
//! The lower-level `fit` functions of each family operate on encoded
//! vectors directly and are what the solvers use; the `fit_*` functions in
//! this module accept `(Point, y)` pairs and keep the search space alongside
//! the fitted parameters so a saved model is self-describing.

mod basis;
mod boosted;
mod forest;
mod gp;
mod tree;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use basis::{normal_equation_residual, BasisModel, FeatureMap, LeastSquaresConfig, LeastSquaresFamily};
pub use boosted::{BoostedModel, BoostedParams};
pub use forest::{Forest, ForestParams};
pub use gp::{kernel_matrix, matern52, GpConfig, GpHyper, GpModel, JITTER_START, JITTER_STOP};
pub use tree::{Node, RegressionTree, TreeParams};

use crate::space::{Point, SearchSpace};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("no training data")]
    Empty,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("regularisation required")]
    RegularisationRequired,
    #[error("kernel matrix factorisation failed; jitter ladder tried {attempts:?}")]
    Factorisation { attempts: Vec<f64> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Quadratic,
    PiecewiseLinear,
    RandomFourier,
    GaussianProcess,
    RandomForest,
    BoostedTrees,
}

/// Anything that maps an encoded vector to a prediction.
pub trait Predict {
    fn predict(&self, x: &[f64]) -> f64;

    /// Predictive variance, for families that have one.
    fn variance(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family_group", rename_all = "snake_case")]
pub enum Regressor {
    LeastSquares(BasisModel),
    GaussianProcess(GpModel),
    RandomForest(Forest),
    BoostedTrees(BoostedModel),
}

impl Regressor {
    pub fn family(&self) -> Family {
        match self {
            Regressor::LeastSquares(m) => m.family(),
            Regressor::GaussianProcess(_) => Family::GaussianProcess,
            Regressor::RandomForest(_) => Family::RandomForest,
            Regressor::BoostedTrees(_) => Family::BoostedTrees,
        }
    }
}

impl Predict for Regressor {
    fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Regressor::LeastSquares(m) => m.predict(x),
            Regressor::GaussianProcess(m) => m.predict(x),
            Regressor::RandomForest(m) => m.predict(x),
            Regressor::BoostedTrees(m) => m.predict(x),
        }
    }

    fn variance(&self, x: &[f64]) -> Option<f64> {
        match self {
            Regressor::GaussianProcess(m) => m.variance(x),
            Regressor::RandomForest(m) => m.variance(x),
            _ => None,
        }
    }
}

/// A fitted model together with the space whose encoding it consumes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub space: SearchSpace,
    pub regressor: Regressor,
}

impl SurrogateModel {
    pub fn family(&self) -> Family {
        self.regressor.family()
    }

    pub fn predict(&self, p: &Point) -> f64 {
        self.regressor.predict(&encode(&self.space, p))
    }

    pub fn predict_with_variance(&self, p: &Point) -> (f64, Option<f64>) {
        let x = encode(&self.space, p);
        (self.regressor.predict(&x), self.regressor.variance(&x))
    }
}

impl Predict for SurrogateModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.regressor.predict(x)
    }

    fn variance(&self, x: &[f64]) -> Option<f64> {
        self.regressor.variance(x)
    }
}

/// Ordinal numeric encoding, one entry per variable in declaration order,
/// regardless of activity.
pub fn encode(_space: &SearchSpace, p: &Point) -> Vec<f64> {
    p.values.iter().map(|v| v.as_f64()).collect()
}

/// Encoded lower and upper bounds per variable.
pub fn encoded_box(space: &SearchSpace) -> (Vec<f64>, Vec<f64>) {
    space.variables().iter().map(|v| v.encoded_range()).unzip()
}

/// Encodes `(Point, y)` pairs into a design matrix and target vector.
pub fn encode_data(space: &SearchSpace, data: &[(Point, f64)]) -> (Vec<Vec<f64>>, Vec<f64>) {
    data.iter().map(|(p, y)| (encode(space, p), *y)).unzip()
}

pub fn fit_least_squares(
    space: &SearchSpace,
    data: &[(Point, f64)],
    config: &LeastSquaresConfig,
) -> Result<SurrogateModel, FitError> {
    let (x, y) = encode_data(space, data);
    let (lo, hi) = encoded_box(space);
    let model = BasisModel::fit(&x, &y, &lo, &hi, config)?;
    Ok(SurrogateModel { space: space.clone(), regressor: Regressor::LeastSquares(model) })
}

pub fn fit_gp(space: &SearchSpace, data: &[(Point, f64)], config: &GpConfig) -> Result<SurrogateModel, FitError> {
    let (x, y) = encode_data(space, data);
    let (lo, hi) = encoded_box(space);
    let diag = crate::math::sqrt(lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum());
    let model = GpModel::fit(&x, &y, diag, config)?;
    Ok(SurrogateModel { space: space.clone(), regressor: Regressor::GaussianProcess(model) })
}

pub fn fit_forest(space: &SearchSpace, data: &[(Point, f64)], params: &ForestParams) -> Result<SurrogateModel, FitError> {
    let (x, y) = encode_data(space, data);
    let model = Forest::fit(&x, &y, params)?;
    Ok(SurrogateModel { space: space.clone(), regressor: Regressor::RandomForest(model) })
}

pub fn fit_boosted(space: &SearchSpace, data: &[(Point, f64)], params: &BoostedParams) -> Result<SurrogateModel, FitError> {
    let (x, y) = encode_data(space, data);
    let model = BoostedModel::fit(&x, &y, params)?;
    Ok(SurrogateModel { space: space.clone(), regressor: Regressor::BoostedTrees(model) })
}

/// Mean absolute error over encoded data.
pub fn mae_encoded<M: Predict + ?Sized>(model: &M, x: &[Vec<f64>], y: &[f64]) -> f64 {
    assert!(!y.is_empty(), "mae of an empty dataset");
    x.iter().zip(y).map(|(xi, yi)| (model.predict(xi) - yi).abs()).sum::<f64>() / y.len() as f64
}

/// Mean absolute error `(1/n) Σ |g(x_i) - y_i|`.
pub fn mae(model: &SurrogateModel, data: &[(Point, f64)]) -> f64 {
    let (x, y) = encode_data(&model.space, data);
    mae_encoded(model, &x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Value, VariableSpec};
    use alloc::vec;

    #[test]
    fn encoding_is_ordinal_and_ordered() {
        let s = SearchSpace::new(vec![
            VariableSpec::continuous("x", 0.0, 1.0),
            VariableSpec::categorical("k", &["a", "b", "c"]),
        ])
        .unwrap();
        assert_eq!(encode(&s, &s.point(vec![Value::Real(0.5), Value::Cat(2)])), vec![0.5, 2.0]);
        let c = SearchSpace::new(vec![VariableSpec::categorical("k", &["a", "b", "c"])]).unwrap();
        assert_eq!(encode(&c, &c.point(vec![Value::Cat(1)])), vec![1.0]);
        let x = SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap();
        assert_eq!(encode(&x, &x.point(vec![Value::Real(0.3)])), vec![0.3]);
    }

    struct Constant(f64);
    impl Predict for Constant {
        fn predict(&self, _: &[f64]) -> f64 {
            self.0
        }
    }

    #[test]
    fn mae_arithmetic() {
        let x = vec![vec![0.0], vec![1.0]];
        assert_eq!(mae_encoded(&Constant(1.0), &x, &[0.0, 2.0]), 1.0);
        assert_eq!(mae_encoded(&Constant(3.0), &x, &[3.0, 3.0]), 0.0);
        // hand-summed: |2-0.5| + |2-4| + |2-2| = 3.5 over 3
        let x3 = vec![vec![0.0]; 3];
        assert!((mae_encoded(&Constant(2.0), &x3, &[0.5, 4.0, 2.0]) - 3.5 / 3.0).abs() < 1e-15);
    }
}
