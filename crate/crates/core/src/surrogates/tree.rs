//! CART regression trees on encoded vectors.
//!
//! Splits are axis-aligned thresholds chosen to minimise the summed squared
//! error of the two children. A sample goes left when `x[feature] <=
//! threshold`; thresholds sit halfway between adjacent distinct values of
//! the training data. Leaves predict the mean of their targets.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Number of features drawn per split; `None` uses all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_leaf: 1, max_features: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A tree stored as a flat node array; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    params: &'a TreeParams,
    nodes: Vec<Node>,
    features: Vec<usize>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl RegressionTree {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &TreeParams, rng: &mut Rng) -> Self {
        let idx: Vec<usize> = (0..y.len()).collect();
        Self::fit_indices(x, y, idx, params, rng)
    }

    /// Fits on the multiset of rows named by `idx` (repeats allowed).
    pub fn fit_indices(x: &[Vec<f64>], y: &[f64], idx: Vec<usize>, params: &TreeParams, rng: &mut Rng) -> Self {
        assert!(!idx.is_empty(), "tree needs at least one sample");
        let dim = x[idx[0]].len();
        let mut b = Builder { x, y, params, nodes: Vec::new(), features: (0..dim).collect() };
        b.grow(idx, 0, rng);
        Self { nodes: b.nodes }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

impl Builder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut Rng) -> usize {
        let slot = self.nodes.len();
        let ys: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        let value = math::mean(&ys);
        self.nodes.push(Node::Leaf { value });
        let depth_ok = self.params.max_depth.is_none_or(|m| depth < m);
        if !depth_ok || idx.len() < 2 * self.params.min_leaf.max(1) {
            return slot;
        }
        let Some(best) = self.best_split(&idx, value, rng) else {
            return slot;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let left = self.grow(l, depth + 1, rng);
        let right = self.grow(r, depth + 1, rng);
        self.nodes[slot] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
        slot
    }

    fn candidate_features(&mut self, rng: &mut Rng) -> Vec<usize> {
        let d = self.features.len();
        match self.params.max_features {
            Some(k) if k < d => {
                rng.shuffle(&mut self.features);
                let mut f = self.features[..k.max(1)].to_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize], mean: f64, rng: &mut Rng) -> Option<BestSplit> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        // deviations from the node mean keep the gain arithmetic well scaled
        let sse: f64 = idx.iter().map(|&i| (self.y[i] - mean) * (self.y[i] - mean)).sum();
        if !(sse > 0.0) {
            return None;
        }
        let total: f64 = idx.iter().map(|&i| self.y[i] - mean).sum();
        let base = total * total / n as f64;
        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for f in self.candidate_features(rng) {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left_sum = 0.0;
            for k in 1..n {
                left_sum += self.y[order[k - 1]] - mean;
                let a = self.x[order[k - 1]][f];
                let b = self.x[order[k]][f];
                if k < min_leaf || n - k < min_leaf || !(a < b) {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / k as f64 + right_sum * right_sum / (n - k) as f64 - base;
                if gain > 1e-13 * sse && best.as_ref().is_none_or(|s| gain > s.gain) {
                    let mid = a + (b - a) / 2.0;
                    let threshold = if mid < b { mid } else { a };
                    best = Some(BestSplit { gain, feature: f, threshold });
                }
            }
        }
        best
    }
}
