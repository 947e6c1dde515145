//! Mixed-variable search spaces and points.
//!
//! A [`SearchSpace`] is an ordered list of [`VariableSpec`]s. A variable may
//! be conditional on a categorical parent taking one specific category; when
//! the condition does not hold the variable is *inactive*. Inactive
//! variables still carry a value so every point is a fixed-length vector;
//! activity is metadata derived from the parent values.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarKind {
    Continuous { lower: f64, upper: f64 },
    Integer { lower: i64, upper: i64 },
    Categorical { categories: Vec<String> },
}

/// Makes a variable active only when `parent` takes category `value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub parent: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: VarKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
}

impl VariableSpec {
    pub fn continuous(name: &str, lower: f64, upper: f64) -> Self {
        Self { name: name.to_string(), kind: VarKind::Continuous { lower, upper }, condition: None }
    }

    pub fn integer(name: &str, lower: i64, upper: i64) -> Self {
        Self { name: name.to_string(), kind: VarKind::Integer { lower, upper }, condition: None }
    }

    pub fn categorical<S: AsRef<str>>(name: &str, categories: &[S]) -> Self {
        Self {
            name: name.to_string(),
            kind: VarKind::Categorical {
                categories: categories.iter().map(|c| c.as_ref().to_string()).collect(),
            },
            condition: None,
        }
    }

    pub fn when(mut self, parent: &str, value: &str) -> Self {
        self.condition = Some(Condition { parent: parent.to_string(), value: value.to_string() });
        self
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, VarKind::Continuous { .. })
    }

    /// Encoded real range: the bounds for numeric kinds, `[0, k-1]` for
    /// categorical variables with `k` categories.
    pub fn encoded_range(&self) -> (f64, f64) {
        match &self.kind {
            VarKind::Continuous { lower, upper } => (*lower, *upper),
            VarKind::Integer { lower, upper } => (*lower as f64, *upper as f64),
            VarKind::Categorical { categories } => (0.0, (categories.len() - 1) as f64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("search space must contain at least one variable")]
    Empty,
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("variable `{0}`: lower bound must be below upper bound")]
    Bounds(String),
    #[error("variable `{0}`: bounds must be finite")]
    NonFinite(String),
    #[error("variable `{0}`: need at least two distinct categories")]
    Categories(String),
    #[error("variable `{name}` is conditional on unknown variable `{parent}`")]
    UnknownParent { name: String, parent: String },
    #[error("variable `{name}`: parent `{parent}` is not categorical")]
    ParentNotCategorical { name: String, parent: String },
    #[error("variable `{name}`: parent `{parent}` has no category `{value}`")]
    UnknownCategory { name: String, parent: String, value: String },
    #[error("conditional dependencies form a cycle through `{0}`")]
    Cycle(String),
}

/// Validated, immutable search space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct SearchSpace {
    variables: Vec<VariableSpec>,
    /// Parent index and the required category index, per variable.
    parents: Vec<Option<(usize, usize)>>,
    /// Parents-before-children order, stable with respect to declaration order.
    order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    variables: Vec<VariableSpec>,
}

impl TryFrom<SpaceRepr> for SearchSpace {
    type Error = SpaceError;
    fn try_from(r: SpaceRepr) -> Result<Self, SpaceError> {
        SearchSpace::new(r.variables)
    }
}

impl From<SearchSpace> for SpaceRepr {
    fn from(s: SearchSpace) -> Self {
        SpaceRepr { variables: s.variables }
    }
}

impl SearchSpace {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self, SpaceError> {
        if variables.is_empty() {
            return Err(SpaceError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.as_str(), i).is_some() {
                return Err(SpaceError::DuplicateName(v.name.clone()));
            }
            match &v.kind {
                VarKind::Continuous { lower, upper } => {
                    if !lower.is_finite() || !upper.is_finite() {
                        return Err(SpaceError::NonFinite(v.name.clone()));
                    }
                    if lower >= upper {
                        return Err(SpaceError::Bounds(v.name.clone()));
                    }
                }
                VarKind::Integer { lower, upper } => {
                    if lower >= upper {
                        return Err(SpaceError::Bounds(v.name.clone()));
                    }
                }
                VarKind::Categorical { categories } => {
                    let mut seen = BTreeMap::new();
                    if categories.len() < 2 || categories.iter().any(|c| seen.insert(c, ()).is_some()) {
                        return Err(SpaceError::Categories(v.name.clone()));
                    }
                }
            }
        }
        let mut parents = Vec::with_capacity(variables.len());
        for v in &variables {
            let Some(cond) = &v.condition else {
                parents.push(None);
                continue;
            };
            let &p = index.get(cond.parent.as_str()).ok_or_else(|| SpaceError::UnknownParent {
                name: v.name.clone(),
                parent: cond.parent.clone(),
            })?;
            let VarKind::Categorical { categories } = &variables[p].kind else {
                return Err(SpaceError::ParentNotCategorical {
                    name: v.name.clone(),
                    parent: cond.parent.clone(),
                });
            };
            let c = categories.iter().position(|c| *c == cond.value).ok_or_else(|| {
                SpaceError::UnknownCategory {
                    name: v.name.clone(),
                    parent: cond.parent.clone(),
                    value: cond.value.clone(),
                }
            })?;
            parents.push(Some((p, c)));
        }

        // Kahn-style ordering: repeatedly take the first unplaced variable
        // whose parent is already placed.
        let n = variables.len();
        let mut placed = alloc::vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n).find(|&i| {
                !placed[i] && parents[i].is_none_or(|(p, _)| placed[p])
            });
            match next {
                Some(i) => {
                    placed[i] = true;
                    order.push(i);
                }
                None => {
                    let stuck = (0..n).find(|&i| !placed[i]).unwrap_or(0);
                    return Err(SpaceError::Cycle(variables[stuck].name.clone()));
                }
            }
        }
        Ok(Self { variables, parents, order })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Variable indices with every parent before its children.
    pub fn dependency_order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_continuous(&self) -> bool {
        self.variables.iter().all(VariableSpec::is_continuous)
    }

    pub fn has_conditions(&self) -> bool {
        self.parents.iter().any(Option::is_some)
    }

    /// Activity flags implied by the conditional rules for `values`.
    pub fn activity(&self, values: &[Value]) -> Vec<bool> {
        let mut active = alloc::vec![true; self.variables.len()];
        for &i in &self.order {
            if let Some((p, c)) = self.parents[i] {
                active[i] = active[p] && values[p] == Value::Cat(c);
            }
        }
        active
    }

    /// Builds a point from raw values, deriving the activity flags.
    pub fn point(&self, values: Vec<Value>) -> Point {
        let active = self.activity(&values);
        Point { values, active }
    }

    /// Label of category `index` for categorical variable `var`.
    pub fn category_label(&self, var: usize, index: usize) -> Option<&str> {
        match &self.variables.get(var)?.kind {
            VarKind::Categorical { categories } => categories.get(index).map(String::as_str),
            _ => None,
        }
    }
}

/// Assignment to one variable. Categories are stored by index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Int(i64),
    Real(f64),
    Cat(usize),
}

impl Value {
    /// `Real` or `Int` as a float, or the category index as a float.
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Real(x) => x,
            Value::Int(k) => k as f64,
            Value::Cat(c) => c as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub values: Vec<Value>,
    pub active: Vec<bool>,
}

impl Point {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First offending variable of an invalid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub variable: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.variable, self.reason)
    }
}

/// Checks bounds, kinds, categories and activity flags, reporting the first
/// offending variable in declaration order.
pub fn validate_point(space: &SearchSpace, p: &Point) -> Result<(), Violation> {
    let violation = |name: &str, reason: &str| Violation { variable: name.to_string(), reason: reason.to_string() };
    if p.values.len() != space.dim() || p.active.len() != space.dim() {
        return Err(violation(
            "<point>",
            &format!("has {} values for a {}-dimensional space", p.values.len(), space.dim()),
        ));
    }
    for (var, value) in space.variables.iter().zip(&p.values) {
        let ok = match (&var.kind, value) {
            (VarKind::Continuous { lower, upper }, Value::Real(x)) => {
                if !x.is_finite() {
                    return Err(violation(&var.name, "is not finite"));
                }
                lower <= x && x <= upper
            }
            (VarKind::Integer { lower, upper }, Value::Int(k)) => lower <= k && k <= upper,
            (VarKind::Categorical { categories }, Value::Cat(c)) => *c < categories.len(),
            _ => return Err(violation(&var.name, "has a value of the wrong kind")),
        };
        if !ok {
            return Err(violation(&var.name, "out of bounds"));
        }
    }
    let implied = space.activity(&p.values);
    for (i, (&want, &got)) in implied.iter().zip(&p.active).enumerate() {
        if want != got {
            let reason = if want { "must be active" } else { "must be inactive" };
            return Err(violation(&space.variables[i].name, reason));
        }
    }
    Ok(())
}

/// Draws one value uniformly for variable `var`.
pub fn sample_value(var: &VariableSpec, rng: &mut Rng) -> Value {
    match &var.kind {
        VarKind::Continuous { lower, upper } => Value::Real(rng.uniform(*lower, *upper)),
        VarKind::Integer { lower, upper } => Value::Int(rng.int_inclusive(*lower, *upper)),
        VarKind::Categorical { categories } => Value::Cat(rng.below(categories.len() as u64) as usize),
    }
}

/// Uniform random point. Values are drawn in dependency order (parents
/// before children, otherwise declaration order), one draw sequence per
/// variable; activity flags are computed afterwards.
pub fn sample_uniform(space: &SearchSpace, rng: &mut Rng) -> Point {
    let mut values = alloc::vec![Value::Cat(0); space.dim()];
    for &i in &space.order {
        values[i] = sample_value(&space.variables[i], rng);
    }
    space.point(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn conditional_space() -> SearchSpace {
        SearchSpace::new(vec![
            VariableSpec::continuous("c", 0.0, 1.0).when("parent", "a"),
            VariableSpec::categorical("parent", &["a", "b"]),
        ])
        .unwrap()
    }

    #[test]
    fn interior_point_is_valid() {
        let s = SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap();
        assert!(validate_point(&s, &s.point(vec![Value::Real(0.5)])).is_ok());
    }

    #[test]
    fn out_of_bounds_is_named() {
        let s = SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap();
        let err = validate_point(&s, &s.point(vec![Value::Real(1.5)])).unwrap_err();
        assert_eq!(err.to_string(), "x out of bounds");
    }

    #[test]
    fn inactive_child_flagged_active_is_rejected() {
        let s = conditional_space();
        let p = Point { values: vec![Value::Real(0.3), Value::Cat(1)], active: vec![true, true] };
        assert_eq!(validate_point(&s, &p).unwrap_err().to_string(), "c must be inactive");
        assert!(validate_point(&s, &s.point(p.values.clone())).is_ok());
    }

    #[test]
    fn child_before_parent_is_ordered() {
        let s = conditional_space();
        assert_eq!(s.dependency_order(), &[1, 0]);
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        assert_eq!(SearchSpace::new(vec![]), Err(SpaceError::Empty));
        assert!(matches!(
            SearchSpace::new(vec![VariableSpec::continuous("x", 1.0, 1.0)]),
            Err(SpaceError::Bounds(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![VariableSpec::categorical("k", &["a", "a"])]),
            Err(SpaceError::Categories(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![
                VariableSpec::integer("i", 0, 3),
                VariableSpec::integer("j", 0, 3).when("i", "a"),
            ]),
            Err(SpaceError::ParentNotCategorical { .. })
        ));
        assert!(matches!(
            SearchSpace::new(vec![
                VariableSpec::categorical("a", &["x", "y"]).when("b", "x"),
                VariableSpec::categorical("b", &["x", "y"]).when("a", "x"),
            ]),
            Err(SpaceError::Cycle(_))
        ));
        assert!(matches!(
            SearchSpace::new(vec![
                VariableSpec::integer("i", 0, 3),
                VariableSpec::integer("i", 0, 3),
            ]),
            Err(SpaceError::DuplicateName(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = conditional_space();
        let a = sample_uniform(&s, &mut Rng::new(17));
        let b = sample_uniform(&s, &mut Rng::new(17));
        assert_eq!(a, b);
        assert!(validate_point(&s, &a).is_ok());
    }

    #[test]
    fn categorical_frequencies_are_uniform() {
        let labels: Vec<String> = (0..8).map(|i| format!("o{i}")).collect();
        let s = SearchSpace::new(vec![VariableSpec::categorical("k", &labels)]).unwrap();
        let mut rng = Rng::new(2024);
        let mut counts = [0usize; 8];
        let n = 80_000;
        for _ in 0..n {
            if let Value::Cat(c) = sample_uniform(&s, &mut rng).values[0] {
                counts[c] += 1;
            }
        }
        let expected = n as f64 / 8.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 7 degrees of freedom, 0.999 quantile
        assert!(chi2 < 24.32, "chi2 = {chi2}");
        for &c in &counts {
            assert!((c as f64 / n as f64 - 0.125).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn integer_sampling_hits_every_value() {
        let s = SearchSpace::new(vec![VariableSpec::integer("i", 0, 3)]).unwrap();
        let mut rng = Rng::new(5);
        let mut seen = [0usize; 4];
        for _ in 0..40_000 {
            if let Value::Int(k) = sample_uniform(&s, &mut rng).values[0] {
                seen[k as usize] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
    }
}
