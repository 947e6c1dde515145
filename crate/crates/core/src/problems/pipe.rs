//! Constrained continuous proxy for the pipe-shape problem.
//!
//! Points live in `[0, 1]^d`. With `z = (x - c) / r` for centre `c = 0.5`
//! and feasible radius `r`, a point is feasible iff `‖z‖ ≤ 1`. Inside,
//!
//! ```text
//! g(z) = (1/d) Σ_i [ (z_i - s_i)² + 0.1 (1 - cos(4π (z_i - s_i))) ]
//! f(x) = 0.1 + 0.3 · g(z)
//! ```
//!
//! with shift `s_i = 0.25 sin(1.7 (i + 1))`, so the global optimum
//! `f = 0.1` sits at `z = s` (inside the ball) and cosine ripples add local
//! minima. `|z_i - s_i| ≤ 1.25` on the ball, so `g < 1.77` and feasible
//! values stay below `0.64`.
//! Outside the ball the objective is exactly `2`.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::problems::Objective;
use crate::space::{Point, SearchSpace, VariableSpec};

pub const PIPE_PENALTY: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct PipeProxy {
    space: SearchSpace,
    radius: f64,
    shift: Vec<f64>,
}

impl PipeProxy {
    /// Feasible region is the ball of radius 0.5 around the centre.
    pub fn new(d: usize) -> Self {
        Self::with_radius(d, 0.5)
    }

    /// # Panics
    /// If `d < 2` or the radius is not positive.
    pub fn with_radius(d: usize, radius: f64) -> Self {
        assert!(d >= 2, "pipe proxy needs d >= 2");
        assert!(radius > 0.0);
        let vars = (0..d).map(|i| VariableSpec::continuous(&format!("x{i}"), 0.0, 1.0)).collect();
        let shift = (0..d).map(|i| 0.25 * math::sin(1.7 * (i + 1) as f64)).collect();
        Self { space: SearchSpace::new(vars).expect("valid"), radius, shift }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().map(|&v| (v - 0.5) * (v - 0.5)).sum();
        math::sqrt(r2) <= self.radius
    }

    /// Location of the global optimum.
    pub fn optimum_location(&self) -> Vec<f64> {
        self.shift.iter().map(|s| 0.5 + self.radius * s).collect()
    }

    pub fn eval_vec(&self, x: &[f64]) -> f64 {
        if !self.is_feasible(x) {
            return PIPE_PENALTY;
        }
        let d = x.len() as f64;
        let g: f64 = x
            .iter()
            .zip(&self.shift)
            .map(|(&v, &s)| {
                let t = (v - 0.5) / self.radius - s;
                t * t + 0.1 * (1.0 - math::cos(4.0 * core::f64::consts::PI * t))
            })
            .sum::<f64>()
            / d;
        0.1 + 0.3 * g
    }
}

impl Objective for PipeProxy {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn value(&self, p: &Point) -> f64 {
        let x: Vec<f64> = p.values.iter().map(|v| v.as_f64()).collect();
        self.eval_vec(&x)
    }

    fn known_optimum(&self) -> Option<f64> {
        Some(0.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::space::{sample_uniform, Value};
    use alloc::vec;

    #[test]
    fn centre_is_feasible_corner_is_penalised() {
        let p = PipeProxy::new(10);
        let centre = p.space().point(vec![Value::Real(0.5); 10]);
        assert!(p.value(&centre) < 2.0);
        let corner = p.space().point(vec![Value::Real(1.0); 10]);
        assert_eq!(p.value(&corner).to_bits(), 2.0f64.to_bits());
    }

    #[test]
    fn uniform_sample_respects_penalty_contract() {
        for d in [2, 3, 10] {
            let p = PipeProxy::new(d);
            let mut rng = Rng::new(d as u64);
            for _ in 0..10_000 {
                let pt = sample_uniform(p.space(), &mut rng);
                let x: Vec<f64> = pt.values.iter().map(|v| v.as_f64()).collect();
                let f = p.value(&pt);
                if p.is_feasible(&x) {
                    assert!(f < 2.0);
                } else {
                    assert_eq!(f.to_bits(), 2.0f64.to_bits());
                }
            }
        }
    }

    #[test]
    fn optimum_value() {
        let p = PipeProxy::new(10);
        let x = p.optimum_location();
        assert!(p.is_feasible(&x));
        assert!((p.eval_vec(&x) - 0.1).abs() < 1e-15);
    }
}
