//! Categorical proxy for the electrostatic-precipitator problem.
//!
//! The objective is a sum over sliding windows of `window` consecutive
//! slots. Each window position has its own lookup table of
//! `n_options^window` entries drawn uniformly from `[0, 1]` and rounded to
//! the nearest multiple of [`QUANTUM`]; the coarse grid makes many
//! single-slot changes leave the objective unchanged. Because the objective
//! is a chain of overlapping window terms, its exact minimum is found by
//! dynamic programming over the last `window - 1` slot values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::problems::Objective;
use crate::rng::Rng;
use crate::space::{Point, SearchSpace, Value, VariableSpec};

pub const QUANTUM: f64 = 0.25;

#[derive(Clone, Debug)]
pub struct EspProxy {
    space: SearchSpace,
    n_options: usize,
    window: usize,
    /// `tables[w][code]` with `code` the base-`n_options` number formed by
    /// slots `w..w+window`, most significant first.
    tables: Vec<Vec<f64>>,
    optimum: f64,
    optimum_config: Vec<usize>,
}

impl EspProxy {
    /// # Panics
    /// If `window < 2`, `n_slots <= window` or `n_options < 2`.
    pub fn new(n_slots: usize, n_options: usize, window: usize, seed: u64) -> Self {
        assert!(window >= 2, "window must be at least 2");
        assert!(n_slots > window, "need more slots than the window size");
        assert!(n_options >= 2, "need at least two options per slot");
        let labels: Vec<_> = (0..n_options).map(|o| format!("o{o}")).collect();
        let vars = (0..n_slots).map(|s| VariableSpec::categorical(&format!("slot{s:02}"), &labels)).collect();
        let space = SearchSpace::new(vars).expect("valid");

        let mut rng = Rng::stream(seed, 0xE5);
        let size = n_options.pow(window as u32);
        let tables: Vec<Vec<f64>> = (0..n_slots - window + 1)
            .map(|_| (0..size).map(|_| quantise(rng.next_f64())).collect())
            .collect();
        let mut esp = Self { space, n_options, window, tables, optimum: 0.0, optimum_config: vec![] };
        let (optimum, config) = esp.solve_chain();
        esp.optimum = optimum;
        esp.optimum_config = config;
        esp
    }

    pub fn n_options(&self) -> usize {
        self.n_options
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    /// A configuration attaining the minimum.
    pub fn optimum_config(&self) -> &[usize] {
        &self.optimum_config
    }

    pub fn eval_config(&self, config: &[usize]) -> f64 {
        let mut total = 0.0;
        for (w, table) in self.tables.iter().enumerate() {
            let code = config[w..w + self.window].iter().fold(0, |acc, &v| acc * self.n_options + v);
            total += table[code];
        }
        total
    }

    /// Exact minimum by dynamic programming. States are the values of the
    /// trailing `window - 1` slots; each window term is added when its last
    /// slot is chosen.
    fn solve_chain(&self) -> (f64, Vec<usize>) {
        let k = self.n_options;
        let n_states = k.pow(self.window as u32 - 1);
        let n_slots = self.space.dim();
        let mut cost = vec![0.0f64; n_states];
        // choice[w][state] = previous state leading to `state` after window w
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(self.tables.len());
        for table in &self.tables {
            let mut next = vec![f64::INFINITY; n_states];
            let mut from = vec![0usize; n_states];
            for (state, &c) in cost.iter().enumerate() {
                for v in 0..k {
                    let code = state * k + v;
                    let total = c + table[code];
                    let ns = code % n_states;
                    if total < next[ns] {
                        next[ns] = total;
                        from[ns] = state;
                    }
                }
            }
            back.push(from);
            cost = next;
        }
        let (mut state, &best) = cost
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one state");
        let mut config = vec![0usize; n_slots];
        // the final state holds the last window-1 slots
        let mut s = state;
        for pos in (n_slots - (self.window - 1)..n_slots).rev() {
            config[pos] = s % k;
            s /= k;
        }
        for w in (0..self.tables.len()).rev() {
            let prev = back[w][state];
            // slot w is the leading digit of `prev`
            config[w] = prev / (n_states / k);
            state = prev;
        }
        (best, config)
    }

    fn config_of(p: &Point) -> Vec<usize> {
        p.values
            .iter()
            .map(|v| match v {
                Value::Cat(c) => *c,
                other => other.as_f64() as usize,
            })
            .collect()
    }
}

fn quantise(x: f64) -> f64 {
    crate::math::round(x / QUANTUM) * QUANTUM
}

impl Objective for EspProxy {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn value(&self, p: &Point) -> f64 {
        self.eval_config(&Self::config_of(p))
    }

    fn known_optimum(&self) -> Option<f64> {
        Some(self.optimum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::sample_uniform;

    fn exhaustive_min(esp: &EspProxy) -> f64 {
        let n = esp.space().dim();
        let k = esp.n_options();
        let mut best = f64::INFINITY;
        for code in 0..k.pow(n as u32) {
            let mut c = code;
            let config: Vec<usize> = (0..n)
                .map(|_| {
                    let v = c % k;
                    c /= k;
                    v
                })
                .collect();
            best = best.min(esp.eval_config(&config));
        }
        best
    }

    #[test]
    fn dp_matches_exhaustive_on_small_instances() {
        for seed in 0..50 {
            for (slots, options, window) in [(4, 2, 2), (3, 2, 2), (4, 2, 3)] {
                let esp = EspProxy::new(slots, options, window, seed);
                assert_eq!(esp.known_optimum(), Some(exhaustive_min(&esp)));
                assert_eq!(esp.eval_config(esp.optimum_config()), esp.known_optimum().unwrap());
            }
        }
    }

    #[test]
    fn dp_matches_exhaustive_on_larger_instance() {
        let esp = EspProxy::new(7, 3, 3, 5);
        assert_eq!(esp.known_optimum(), Some(exhaustive_min(&esp)));
        assert_eq!(esp.eval_config(esp.optimum_config()), esp.known_optimum().unwrap());
    }

    #[test]
    fn optimum_lower_bounds_random_points() {
        let esp = EspProxy::new(49, 8, 3, 1);
        assert_eq!(esp.space().dim(), 49);
        let opt = esp.known_optimum().unwrap();
        let mut rng = Rng::new(8);
        for _ in 0..10_000 {
            assert!(opt <= esp.value(&sample_uniform(esp.space(), &mut rng)));
        }
    }

    #[test]
    fn flat_single_slot_change_exists() {
        let esp = EspProxy::new(49, 8, 3, 0);
        let zeros = vec![0usize; 49];
        let base = esp.eval_config(&zeros);
        // slot 0 only enters window 0, so scan table 0 for an entry equal
        // to the all-zero entry at code v * 8^2
        let t = &esp.tables()[0];
        let v = (1..8).find(|&v| t[v * 64] == t[0]).expect("a flat entry");
        let mut changed = zeros.clone();
        changed[0] = v;
        assert_eq!(esp.eval_config(&changed), base);
    }

    #[test]
    fn entries_are_quantised() {
        let esp = EspProxy::new(10, 4, 3, 2);
        for t in esp.tables() {
            for &e in t {
                assert_eq!((e / QUANTUM).fract(), 0.0);
                assert!((0.0..=1.0).contains(&e));
            }
        }
    }
}
