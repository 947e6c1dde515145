//! Unit-box view of a search space and the rounding adapter.
//!
//! Model-based solvers work on `z ∈ [0, 1]^d`, the ordinal encoding of a
//! point rescaled per variable. Mapping `z` back to a [`Point`] clamps to
//! the box and rounds integer and categorical coordinates to the nearest
//! valid value or index.

use alloc::vec::Vec;

use crate::math;
use crate::space::{Point, SearchSpace, Value, VarKind};

/// Maps a relaxed encoded vector to the nearest valid point: continuous
/// values are clamped, integers and category indices are clamped and then
/// rounded. Conditions are not consulted; every variable receives a value.
pub fn round_to_space(space: &SearchSpace, x: &[f64]) -> Point {
    assert_eq!(x.len(), space.dim());
    let values = space
        .variables()
        .iter()
        .zip(x)
        .map(|(var, &v)| match &var.kind {
            VarKind::Continuous { lower, upper } => Value::Real(v.clamp(*lower, *upper)),
            VarKind::Integer { lower, upper } => {
                Value::Int(math::round(v.clamp(*lower as f64, *upper as f64)) as i64)
            }
            VarKind::Categorical { categories } => {
                let hi = (categories.len() - 1) as f64;
                Value::Cat(math::round(v.clamp(0.0, hi)) as usize)
            }
        })
        .collect();
    space.point(values)
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct UnitBox {
    lo: Vec<f64>,
    width: Vec<f64>,
    /// Number of distinct values for discrete variables, `None` if continuous.
    levels: Vec<Option<usize>>,
}

impl UnitBox {
    pub fn new(space: &SearchSpace) -> Self {
        let mut lo = Vec::with_capacity(space.dim());
        let mut width = Vec::with_capacity(space.dim());
        let mut levels = Vec::with_capacity(space.dim());
        for var in space.variables() {
            let (a, b) = var.encoded_range();
            lo.push(a);
            width.push(b - a);
            levels.push(if var.is_continuous() { None } else { Some((b - a) as usize + 1) });
        }
        Self { lo, width, levels }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn levels(&self, j: usize) -> Option<usize> {
        self.levels[j]
    }

    /// Unit-coordinate distance between adjacent values of a discrete variable.
    pub fn unit_step(&self, j: usize) -> Option<f64> {
        self.levels[j].map(|_| 1.0 / self.width[j])
    }

    pub fn to_unit(&self, p: &Point) -> Vec<f64> {
        p.values.iter().enumerate().map(|(j, v)| (v.as_f64() - self.lo[j]) / self.width[j]).collect()
    }

    pub fn from_unit_raw(&self, z: &[f64]) -> Vec<f64> {
        z.iter().enumerate().map(|(j, &u)| self.lo[j] + u * self.width[j]).collect()
    }

    pub fn to_point(&self, space: &SearchSpace, z: &[f64]) -> Point {
        round_to_space(space, &self.from_unit_raw(z))
    }

    /// Clamps to the unit box and snaps discrete coordinates to their grid.
    pub fn project(&self, z: &mut [f64]) {
        for (j, u) in z.iter_mut().enumerate() {
            let c = u.clamp(0.0, 1.0);
            *u = match self.levels[j] {
                None => c,
                Some(_) => math::round(c * self.width[j]) / self.width[j],
            };
        }
    }
}
