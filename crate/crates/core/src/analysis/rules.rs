//! Rules-of-thumb classifier over replay cells.
//!
//! A CART classification tree with Gini impurity, grown best-first: the
//! frontier leaf whose best axis split removes the most impurity is split
//! next, until no leaf can be split or the tree has [`MAX_LEAVES`] leaves.
//! Leaves at depth [`MAX_DEPTH`] are never split. Splits that do not lower
//! the impurity are still taken when nothing better is available, which
//! lets the tree reach patterns such as XOR that need a neutral first cut.
//!
//! [`fit_rules_tree`] repeats the fit on ten random 80/20 train/test
//! partitions and keeps the tree with the best test accuracy.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::rng::Rng;

pub const MAX_DEPTH: usize = 5;
pub const MAX_LEAVES: usize = 6;
pub const FEATURE_NAMES: [&str; 4] = ["log10_budget", "log10_eval_time", "is_10d_continuous", "uses_cfd"];
const N_PARTITIONS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSample {
    pub features: [f64; 4],
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum RuleNode {
    Leaf { label: String, samples: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulesTree {
    pub nodes: Vec<RuleNode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RulesFit {
    pub tree: RulesTree,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

fn majority(samples: &[RuleSample], idx: &[usize]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &i in idx {
        *counts.entry(samples[i].label.as_str()).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (label, c) in counts {
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((label, c));
        }
    }
    best.map(|(l, _)| l.into()).unwrap_or_default()
}

fn gini(samples: &[RuleSample], idx: &[usize]) -> f64 {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &i in idx {
        *counts.entry(samples[i].label.as_str()).or_default() += 1;
    }
    let n = idx.len() as f64;
    1.0 - counts.values().map(|&c| (c as f64 / n) * (c as f64 / n)).sum::<f64>()
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn best_split(samples: &[RuleSample], idx: &[usize]) -> Option<Candidate> {
    let parent = gini(samples, idx);
    if !(parent > 0.0) {
        return None;
    }
    let n = idx.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..4 {
        let mut values: Vec<f64> = idx.iter().map(|&i| samples[i].features[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mid = w[0] + (w[1] - w[0]) / 2.0;
            let threshold = if mid < w[1] { mid } else { w[0] };
            let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| samples[i].features[f] <= threshold);
            let impurity = (l.len() as f64 * gini(samples, &l) + r.len() as f64 * gini(samples, &r)) / n;
            if best.is_none_or(|(b, _, _)| impurity < b) {
                best = Some((impurity, f, threshold));
            }
        }
    }
    best.map(|(imp, feature, threshold)| Candidate { gain: (parent - imp).max(0.0), feature, threshold })
}

impl RulesTree {
    pub fn fit(samples: &[RuleSample], idx: &[usize]) -> Self {
        struct Open {
            node: usize,
            idx: Vec<usize>,
            depth: usize,
            split: Option<Candidate>,
        }
        let open_leaf = |node: usize, idx: Vec<usize>, depth: usize| {
            let split = if depth < MAX_DEPTH { best_split(samples, &idx) } else { None };
            Open { node, idx, depth, split }
        };
        let mut nodes = alloc::vec![RuleNode::Leaf { label: majority(samples, idx), samples: idx.len() }];
        let mut frontier = alloc::vec![open_leaf(0, idx.to_vec(), 0)];
        let mut leaves = 1;
        while leaves < MAX_LEAVES {
            let mut pick: Option<usize> = None;
            for (k, o) in frontier.iter().enumerate() {
                if let Some(c) = &o.split {
                    if pick.is_none_or(|p| c.gain > frontier[p].split.as_ref().unwrap().gain) {
                        pick = Some(k);
                    }
                }
            }
            let Some(k) = pick else { break };
            let o = frontier.remove(k);
            let c = o.split.unwrap();
            let (l, r): (Vec<usize>, Vec<usize>) =
                o.idx.iter().partition(|&&i| samples[i].features[c.feature] <= c.threshold);
            let (li, ri) = (nodes.len(), nodes.len() + 1);
            nodes.push(RuleNode::Leaf { label: majority(samples, &l), samples: l.len() });
            nodes.push(RuleNode::Leaf { label: majority(samples, &r), samples: r.len() });
            nodes[o.node] = RuleNode::Split { feature: c.feature, threshold: c.threshold, left: li, right: ri };
            frontier.push(open_leaf(li, l, o.depth + 1));
            frontier.push(open_leaf(ri, r, o.depth + 1));
            leaves += 1;
        }
        Self { nodes }
    }

    pub fn predict(&self, features: &[f64; 4]) -> &str {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                RuleNode::Leaf { label, .. } => return label,
                RuleNode::Split { feature, threshold, left, right } => {
                    i = if features[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[RuleNode], i: usize) -> usize {
            match &nodes[i] {
                RuleNode::Leaf { .. } => 0,
                RuleNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, RuleNode::Leaf { .. })).count()
    }

    pub fn accuracy(&self, samples: &[RuleSample], idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let hits = idx.iter().filter(|&&i| self.predict(&samples[i].features) == samples[i].label).count();
        hits as f64 / idx.len() as f64
    }

    /// One rule per leaf, left to right, e.g.
    /// `if log10_budget <= 2.5 and uses_cfd > 0.5 then use gp-ucb`.
    pub fn rules(&self) -> Vec<String> {
        fn walk(nodes: &[RuleNode], i: usize, conds: &mut Vec<String>, out: &mut Vec<String>) {
            match &nodes[i] {
                RuleNode::Leaf { label, .. } => {
                    if conds.is_empty() {
                        out.push(format!("use {label}"));
                    } else {
                        out.push(format!("if {} then use {label}", conds.join(" and ")));
                    }
                }
                RuleNode::Split { feature, threshold, left, right } => {
                    let name = FEATURE_NAMES[*feature];
                    conds.push(format!("{name} <= {threshold}"));
                    walk(nodes, *left, conds, out);
                    conds.pop();
                    conds.push(format!("{name} > {threshold}"));
                    walk(nodes, *right, conds, out);
                    conds.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.nodes, 0, &mut Vec::new(), &mut out);
        out
    }
}

pub fn fit_rules_tree(samples: &[RuleSample], split_seed: u64) -> Result<RulesFit, AnalysisError> {
    let n = samples.len();
    let all: Vec<usize> = (0..n).collect();
    let distinct = samples.iter().map(|s| s.label.as_str()).collect::<alloc::collections::BTreeSet<_>>().len();
    if distinct == 1 {
        let tree = RulesTree::fit(samples, &all);
        return Ok(RulesFit { tree, train_accuracy: 1.0, test_accuracy: 1.0 });
    }
    if n < 10 {
        return Err(AnalysisError::TooFewSamples { need: 10, got: n });
    }
    let n_test = (n * 2).div_ceil(10);
    let mut rng = Rng::stream(split_seed, 0x7EE);
    let mut best: Option<RulesFit> = None;
    for _ in 0..N_PARTITIONS {
        let mut perm = all.clone();
        rng.shuffle(&mut perm);
        let (test, train) = perm.split_at(n_test);
        let mut train = train.to_vec();
        train.sort_unstable();
        let tree = RulesTree::fit(samples, &train);
        let fit = RulesFit {
            train_accuracy: tree.accuracy(samples, &train),
            test_accuracy: tree.accuracy(samples, test),
            tree,
        };
        if best.as_ref().is_none_or(|b| fit.test_accuracy > b.test_accuracy) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one partition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn sample(f: [f64; 4], l: &str) -> RuleSample {
        RuleSample { features: f, label: l.to_string() }
    }

    #[test]
    fn xor_needs_depth_two() {
        let s = vec![
            sample([0.0, 0.0, 0.0, 0.0], "a"),
            sample([1.0, 1.0, 0.0, 0.0], "a"),
            sample([0.0, 1.0, 0.0, 0.0], "b"),
            sample([1.0, 0.0, 0.0, 0.0], "b"),
        ];
        let t = RulesTree::fit(&s, &[0, 1, 2, 3]);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.accuracy(&s, &[0, 1, 2, 3]), 1.0);
    }

    #[test]
    fn single_label_gives_stump() {
        let s: Vec<RuleSample> = (0..3).map(|i| sample([i as f64, 0.0, 0.0, 0.0], "gp-ucb")).collect();
        let fit = fit_rules_tree(&s, 1).unwrap();
        assert_eq!(fit.tree.depth(), 0);
        assert_eq!((fit.train_accuracy, fit.test_accuracy), (1.0, 1.0));
        assert_eq!(fit.tree.rules(), vec!["use gp-ucb".to_string()]);
    }

    #[test]
    fn leaf_budget_respected() {
        let mut rng = Rng::new(3);
        let labels = ["a", "b", "c", "d", "e", "f", "g", "h"];
        let s: Vec<RuleSample> = (0..200)
            .map(|_| {
                let f = [rng.uniform(-4.0, 5.0), rng.uniform(-4.0, 5.0), rng.below(2) as f64, rng.below(2) as f64];
                sample(f, labels[rng.below(8) as usize])
            })
            .collect();
        let fit = fit_rules_tree(&s, 0).unwrap();
        assert!(fit.tree.depth() <= MAX_DEPTH);
        assert!(fit.tree.n_leaves() <= MAX_LEAVES);
        assert_eq!(fit.tree.rules().len(), fit.tree.n_leaves());
    }

    #[test]
    fn too_few_cells() {
        let s: Vec<RuleSample> = (0..5).map(|i| sample([i as f64, 0.0, 0.0, 0.0], if i < 2 { "a" } else { "b" })).collect();
        assert!(fit_rules_tree(&s, 0).is_err());
    }
}
