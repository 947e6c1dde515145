//! Bagged regression forest. Each tree is grown on a bootstrap resample
//! (unless the forest has a single tree, which sees the data as is); the
//! prediction is the mean over trees and the variance is the population
//! variance of the per-tree predictions.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeParams};
use super::{FitError, Predict};
use crate::math;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, min_leaf: 1, max_depth: None, max_features: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub trees: Vec<RegressionTree>,
}

impl Forest {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &ForestParams) -> Result<Self, FitError> {
        let n = y.len();
        if n == 0 {
            return Err(FitError::Empty);
        }
        if params.n_trees == 0 {
            return Err(FitError::InvalidParameter("n_trees must be at least 1".into()));
        }
        if n < params.min_leaf {
            return Err(FitError::TooFewPoints { need: params.min_leaf, got: n });
        }
        let tp = TreeParams { max_depth: params.max_depth, min_leaf: params.min_leaf, max_features: params.max_features };
        let mut rng = Rng::stream(params.seed, 0xF0);
        let trees = (0..params.n_trees)
            .map(|_| {
                let idx: Vec<usize> = if params.n_trees == 1 {
                    (0..n).collect()
                } else {
                    (0..n).map(|_| rng.below(n as u64) as usize).collect()
                };
                RegressionTree::fit_indices(x, y, idx, &tp, &mut rng)
            })
            .collect();
        Ok(Self { params: params.clone(), trees })
    }

    fn per_tree(&self, x: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }
}

impl Predict for Forest {
    fn predict(&self, x: &[f64]) -> f64 {
        math::mean(&self.per_tree(x))
    }

    fn variance(&self, x: &[f64]) -> Option<f64> {
        Some(math::variance(&self.per_tree(x)).max(0.0))
    }
}
