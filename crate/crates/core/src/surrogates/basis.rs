//! Ridge-regularised least squares on fixed basis expansions.
//!
//! The fitted coefficients minimise
//!
//! ```text
//! (1/n) Σ_i (φ(x_i)·c - y_i)² + λ ‖c‖²
//! ```
//!
//! where `φ` prepends a constant 1 to one of four expansions: the identity
//! (linear), all degree-≤2 monomials (quadratic), `n_basis` rectified
//! hinges `max(0, w·x + b)` (piecewise linear) or `n_basis` random cosine
//! features `√(2/m) cos(w·x + b)` (random Fourier). The loss is averaged so
//! duplicating every observation leaves the solution unchanged.
//!
//! The normal equations `(ΦᵀΦ + nλI) c = Φᵀy` are solved by Cholesky when
//! there are no more features than observations; otherwise the equivalent
//! dual system `(ΦΦᵀ + nλI) a = y`, `c = Φᵀa` is solved instead.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Family, FitError, Predict};
use crate::linalg::{cholesky, cholesky_solve, dot, Matrix};
use crate::math;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeastSquaresFamily {
    Linear,
    Quadratic,
    PiecewiseLinear,
    RandomFourier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresConfig {
    pub family: LeastSquaresFamily,
    /// λ in the objective above.
    pub ridge: f64,
    /// Number of hinges or cosines; ignored by linear and quadratic.
    pub n_basis: usize,
    pub seed: u64,
    /// Cosine-feature lengthscale relative to each variable's range.
    pub lengthscale: f64,
}

impl LeastSquaresConfig {
    pub fn new(family: LeastSquaresFamily) -> Self {
        Self { family, ridge: 1e-6, n_basis: 100, seed: 0, lengthscale: 0.5 }
    }

    pub fn ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    pub fn n_basis(mut self, n: usize) -> Self {
        self.n_basis = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
pub enum FeatureMap {
    Identity { dim: usize },
    Quadratic { dim: usize },
    Relu { weights: Matrix, biases: Vec<f64> },
    Cosine { weights: Matrix, biases: Vec<f64> },
}

impl FeatureMap {
    /// Hinge directions have entries uniform on {-1, 0, 1}, normalised to
    /// unit length (all-zero draws are redrawn); each hinge passes through
    /// a point drawn uniformly from the encoded box.
    pub fn relu(n_basis: usize, lo: &[f64], hi: &[f64], rng: &mut Rng) -> Self {
        let d = lo.len();
        let mut weights = Matrix::zeros(n_basis, d);
        let mut biases = Vec::with_capacity(n_basis);
        for k in 0..n_basis {
            let w = loop {
                let w: Vec<f64> = (0..d).map(|_| rng.below(3) as f64 - 1.0).collect();
                let norm = math::sqrt(dot(&w, &w));
                if norm > 0.0 {
                    break w.into_iter().map(|v| v / norm).collect::<Vec<_>>();
                }
            };
            let anchor: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| rng.uniform(a, b)).collect();
            biases.push(-dot(&w, &anchor));
            weights.data[k * d..(k + 1) * d].copy_from_slice(&w);
        }
        FeatureMap::Relu { weights, biases }
    }

    /// Frequencies `w_j ~ N(0, 1 / (ℓ (hi_j - lo_j))²)`, phases uniform on
    /// `[0, 2π)`.
    pub fn cosine(n_basis: usize, lengthscale: f64, lo: &[f64], hi: &[f64], rng: &mut Rng) -> Self {
        let d = lo.len();
        let mut weights = Matrix::zeros(n_basis, d);
        let mut biases = Vec::with_capacity(n_basis);
        for k in 0..n_basis {
            for j in 0..d {
                let width = (hi[j] - lo[j]).max(f64::MIN_POSITIVE);
                weights[(k, j)] = rng.normal() / (lengthscale * width);
            }
            biases.push(rng.uniform(0.0, 2.0 * core::f64::consts::PI));
        }
        FeatureMap::Cosine { weights, biases }
    }

    pub fn len(&self) -> usize {
        1 + match self {
            FeatureMap::Identity { dim } => *dim,
            FeatureMap::Quadratic { dim } => dim + dim * (dim + 1) / 2,
            FeatureMap::Relu { biases, .. } | FeatureMap::Cosine { biases, .. } => biases.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Feature vector, constant term first.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut phi = Vec::with_capacity(self.len());
        phi.push(1.0);
        match self {
            FeatureMap::Identity { .. } => phi.extend_from_slice(x),
            FeatureMap::Quadratic { .. } => {
                phi.extend_from_slice(x);
                for i in 0..x.len() {
                    for j in i..x.len() {
                        phi.push(x[i] * x[j]);
                    }
                }
            }
            FeatureMap::Relu { weights, biases } => {
                for (k, b) in biases.iter().enumerate() {
                    phi.push((dot(weights.row(k), x) + b).max(0.0));
                }
            }
            FeatureMap::Cosine { weights, biases } => {
                let scale = math::sqrt(2.0 / biases.len() as f64);
                for (k, b) in biases.iter().enumerate() {
                    phi.push(scale * math::cos(dot(weights.row(k), x) + b));
                }
            }
        }
        phi
    }

    /// Gradient of `φ(x)·c` with respect to `x`. Hinges use the one-sided
    /// derivative (zero at the kink).
    pub fn gradient(&self, x: &[f64], coef: &[f64]) -> Vec<f64> {
        let d = x.len();
        let mut g = vec![0.0; d];
        match self {
            FeatureMap::Identity { .. } => g.copy_from_slice(&coef[1..=d]),
            FeatureMap::Quadratic { .. } => {
                g.copy_from_slice(&coef[1..=d]);
                let mut k = d + 1;
                for i in 0..d {
                    for j in i..d {
                        g[i] += coef[k] * x[j];
                        g[j] += coef[k] * x[i];
                        k += 1;
                    }
                }
            }
            FeatureMap::Relu { weights, biases } => {
                for (k, b) in biases.iter().enumerate() {
                    if dot(weights.row(k), x) + b > 0.0 {
                        for (gj, wj) in g.iter_mut().zip(weights.row(k)) {
                            *gj += coef[k + 1] * wj;
                        }
                    }
                }
            }
            FeatureMap::Cosine { weights, biases } => {
                let scale = math::sqrt(2.0 / biases.len() as f64);
                for (k, b) in biases.iter().enumerate() {
                    let s = -scale * math::sin(dot(weights.row(k), x) + b) * coef[k + 1];
                    for (gj, wj) in g.iter_mut().zip(weights.row(k)) {
                        *gj += s * wj;
                    }
                }
            }
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisModel {
    pub features: FeatureMap,
    pub coef: Vec<f64>,
    pub ridge: f64,
}

impl BasisModel {
    /// Builds the feature map for `config` over the encoded box `[lo, hi]`
    /// and solves for the coefficients.
    pub fn fit(x: &[Vec<f64>], y: &[f64], lo: &[f64], hi: &[f64], config: &LeastSquaresConfig) -> Result<Self, FitError> {
        let d = lo.len();
        let mut rng = Rng::stream(config.seed, 0xBA515);
        let features = match config.family {
            LeastSquaresFamily::Linear => FeatureMap::Identity { dim: d },
            LeastSquaresFamily::Quadratic => FeatureMap::Quadratic { dim: d },
            LeastSquaresFamily::PiecewiseLinear | LeastSquaresFamily::RandomFourier if config.n_basis == 0 => {
                return Err(FitError::InvalidParameter(format!("n_basis must be at least 1, got {}", config.n_basis)));
            }
            LeastSquaresFamily::PiecewiseLinear => FeatureMap::relu(config.n_basis, lo, hi, &mut rng),
            LeastSquaresFamily::RandomFourier => {
                if !(config.lengthscale > 0.0) {
                    return Err(FitError::InvalidParameter(format!("lengthscale must be positive, got {}", config.lengthscale)));
                }
                FeatureMap::cosine(config.n_basis, config.lengthscale, lo, hi, &mut rng)
            }
        };
        Self::fit_with(features, x, y, config.ridge)
    }

    /// Solves for the coefficients on a given feature map.
    pub fn fit_with(features: FeatureMap, x: &[Vec<f64>], y: &[f64], ridge: f64) -> Result<Self, FitError> {
        if x.is_empty() {
            return Err(FitError::Empty);
        }
        if ridge.is_nan() || ridge < 0.0 {
            return Err(FitError::InvalidParameter(format!("ridge must be nonnegative, got {ridge}")));
        }
        let n = x.len();
        let m = features.len();
        let rows: Vec<Vec<f64>> = x.iter().map(|xi| features.expand(xi)).collect();
        let phi = Matrix::from_rows(&rows);
        let shift = n as f64 * ridge;
        let coef = if m <= n || ridge == 0.0 {
            let mut a = phi.gram();
            a.add_diagonal(shift);
            let l = cholesky(&a).ok_or(FitError::RegularisationRequired)?;
            cholesky_solve(&l, &phi.tr_mul_vec(y))
        } else {
            let mut a = phi.outer_gram();
            a.add_diagonal(shift);
            let l = cholesky(&a).ok_or(FitError::RegularisationRequired)?;
            phi.tr_mul_vec(&cholesky_solve(&l, y))
        };
        Ok(Self { features, coef, ridge })
    }

    pub fn family(&self) -> Family {
        match self.features {
            FeatureMap::Identity { .. } => Family::Linear,
            FeatureMap::Quadratic { .. } => Family::Quadratic,
            FeatureMap::Relu { .. } => Family::PiecewiseLinear,
            FeatureMap::Cosine { .. } => Family::RandomFourier,
        }
    }

    pub fn n_basis(&self) -> usize {
        self.features.len() - 1
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.features.gradient(x, &self.coef)
    }
}

impl Predict for BasisModel {
    fn predict(&self, x: &[f64]) -> f64 {
        dot(&self.features.expand(x), &self.coef)
    }
}

/// Infinity norm of `Φᵀ(Φc - y)/n + λc`, half the gradient of the
/// objective at the fitted coefficients.
pub fn normal_equation_residual(model: &BasisModel, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut g: Vec<f64> = model.coef.iter().map(|c| model.ridge * c).collect();
    for (xi, yi) in x.iter().zip(y) {
        let phi = model.features.expand(xi);
        let r = (dot(&phi, &model.coef) - yi) / n;
        for (gk, pk) in g.iter_mut().zip(&phi) {
            *gk += pk * r;
        }
    }
    g.iter().fold(0.0, |a, v| a.max(v.abs()))
}
