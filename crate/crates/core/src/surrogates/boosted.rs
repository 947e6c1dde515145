//! Squared-error gradient boosting of depth-limited regression trees.
//!
//! The model starts from the training mean and adds `learning_rate · tree`
//! per round, each tree fitted to the current residuals (optionally on a
//! row subsample drawn without replacement).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeParams};
use super::{FitError, Predict};
use crate::math;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostedParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Fraction of rows used per round, in `(0, 1]`.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for BoostedParams {
    fn default() -> Self {
        Self { n_rounds: 100, learning_rate: 0.3, max_depth: 6, min_leaf: 1, subsample: 1.0, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub params: BoostedParams,
    pub base: f64,
    pub trees: Vec<RegressionTree>,
    /// Mean squared training error after 0, 1, ..., n_rounds rounds.
    pub loss_history: Vec<f64>,
}

fn mse(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64
}

impl BoostedModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &BoostedParams) -> Result<Self, FitError> {
        let n = y.len();
        if n < 2 {
            return Err(FitError::TooFewPoints { need: 2, got: n });
        }
        if !(params.learning_rate > 0.0) || !(params.subsample > 0.0 && params.subsample <= 1.0) {
            return Err(FitError::InvalidParameter("learning_rate > 0 and subsample in (0, 1] required".into()));
        }
        let base = math::mean(y);
        let mut residual: Vec<f64> = y.iter().map(|v| v - base).collect();
        let mut loss_history = Vec::with_capacity(params.n_rounds + 1);
        loss_history.push(mse(&residual));
        let tp = TreeParams { max_depth: Some(params.max_depth), min_leaf: params.min_leaf, max_features: None };
        let mut rng = Rng::stream(params.seed, 0xB0);
        let take = ((params.subsample * n as f64) as usize).clamp(1, n);
        let mut trees = Vec::with_capacity(params.n_rounds);
        for _ in 0..params.n_rounds {
            let idx: Vec<usize> = if take == n {
                (0..n).collect()
            } else {
                let mut all: Vec<usize> = (0..n).collect();
                rng.shuffle(&mut all);
                all.truncate(take);
                all.sort_unstable();
                all
            };
            let tree = RegressionTree::fit_indices(x, &residual, idx, &tp, &mut rng);
            for (r, xi) in residual.iter_mut().zip(x) {
                *r -= params.learning_rate * tree.predict(xi);
            }
            loss_history.push(mse(&residual));
            trees.push(tree);
        }
        Ok(Self { params: params.clone(), base, trees, loss_history })
    }
}

impl Predict for BoostedModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.base + self.trees.iter().map(|t| self.params.learning_rate * t.predict(x)).sum::<f64>()
    }
}
