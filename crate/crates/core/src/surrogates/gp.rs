//! Zero-mean Gaussian process regression with an isotropic Matérn-5/2
//! kernel
//!
//! ```text
//! k(r) = σ_f² (1 + √5 r/ℓ + 5 r²/(3ℓ²)) exp(-√5 r/ℓ)
//! ```
//!
//! on Euclidean distances `r` of encoded points, plus `σ_n²` on the
//! diagonal. Hyperparameters can be fitted by maximising the log marginal
//! likelihood with multistart gradient ascent in log-parameter space, using
//! the analytic gradient `½ tr((ααᵀ - K⁻¹) ∂K/∂θ)`. Each start takes
//! `steps` accept/reject moves along the gradient; the step length grows by
//! 1.2 on acceptance and halves on rejection. Box constraints:
//! `ℓ ∈ [1e-3, 1e3] · diag` (diag = diagonal of the encoded box),
//! `σ_f² ∈ [1e-6, 1e6] · s` and `σ_n² ∈ [1e-8, 1e2 · s]` with `s` the mean
//! squared (normalised) target.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FitError, Predict};
use crate::linalg::{cholesky, cholesky_inverse, cholesky_solve, dot, solve_lower, Matrix};
use crate::math;
use crate::rng::Rng;

/// First jitter rung, relative to `trace(K)/n`.
pub const JITTER_START: f64 = 1e-10;
/// Last jitter rung, relative to `trace(K)/n`.
pub const JITTER_STOP: f64 = 1e-2;

const SQRT5: f64 = 2.236_067_977_499_79;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpHyper {
    pub lengthscale: f64,
    pub signal_var: f64,
    pub noise_var: f64,
}

impl Default for GpHyper {
    fn default() -> Self {
        Self { lengthscale: 1.0, signal_var: 1.0, noise_var: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    /// Fixed hyperparameters, or the first start when optimising.
    pub hyper: GpHyper,
    pub optimise: bool,
    pub restarts: usize,
    pub steps: usize,
    /// Standardise targets before fitting; predictions are mapped back.
    pub normalize_y: bool,
    pub seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self { hyper: GpHyper::default(), optimise: false, restarts: 8, steps: 200, normalize_y: false, seed: 0 }
    }
}

#[inline]
pub fn matern52(r: f64, hyper: &GpHyper) -> f64 {
    let s = SQRT5 * r / hyper.lengthscale;
    hyper.signal_var * (1.0 + s + s * s / 3.0) * math::exp(-s)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn pairwise_distances(x: &[Vec<f64>]) -> Matrix {
    let n = x.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let r = distance(&x[i], &x[j]);
            d[(i, j)] = r;
            d[(j, i)] = r;
        }
    }
    d
}

/// Kernel matrix including the noise diagonal.
pub fn kernel_matrix(x: &[Vec<f64>], hyper: &GpHyper) -> Matrix {
    kernel_from_distances(&pairwise_distances(x), hyper)
}

fn kernel_from_distances(dist: &Matrix, hyper: &GpHyper) -> Matrix {
    let n = dist.rows;
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = matern52(dist[(i, j)], hyper);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += hyper.noise_var;
    }
    k
}

/// Cholesky with the jitter ladder; returns the factor and the jitter used.
fn factorise(k: &Matrix) -> Result<(Matrix, f64), FitError> {
    if let Some(l) = cholesky(k) {
        return Ok((l, 0.0));
    }
    let n = k.rows as f64;
    let base = (k.trace() / n).abs().max(f64::MIN_POSITIVE);
    let mut attempts = Vec::new();
    let mut rel = JITTER_START;
    while rel <= JITTER_STOP * (1.0 + 1e-12) {
        let jitter = rel * base;
        attempts.push(jitter);
        let mut kj = k.clone();
        kj.add_diagonal(jitter);
        if let Some(l) = cholesky(&kj) {
            return Ok((l, jitter));
        }
        rel *= 2.0;
    }
    Err(FitError::Factorisation { attempts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpModel {
    pub hyper: GpHyper,
    pub x: Vec<Vec<f64>>,
    /// Cholesky factor of `K + (σ_n² + jitter) I`.
    pub chol: Matrix,
    /// `K⁻¹ y` on normalised targets.
    pub alpha: Vec<f64>,
    pub jitter: f64,
    pub y_mean: f64,
    pub y_scale: f64,
    pub log_marginal_likelihood: f64,
}

impl GpModel {
    /// Fits the posterior; `box_diagonal` scales the lengthscale bounds.
    pub fn fit(x: &[Vec<f64>], y: &[f64], box_diagonal: f64, config: &GpConfig) -> Result<Self, FitError> {
        if x.is_empty() {
            return Err(FitError::Empty);
        }
        let h = config.hyper;
        if !(h.noise_var > 0.0 && h.signal_var > 0.0 && h.lengthscale > 0.0) {
            return Err(FitError::InvalidParameter(alloc::format!("hyperparameters must be positive: {h:?}")));
        }
        let (y_mean, y_scale) = if config.normalize_y {
            let m = math::mean(y);
            let s = math::sqrt(math::variance(y));
            (m, if s > 0.0 { s } else { 1.0 })
        } else {
            (0.0, 1.0)
        };
        let yn: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();
        let dist = pairwise_distances(x);
        let hyper = if config.optimise {
            let bounds = Bounds::new(box_diagonal, &yn);
            optimise_hypers(&dist, &yn, h, &bounds, config)
        } else {
            h
        };
        let k = kernel_from_distances(&dist, &hyper);
        let (chol, jitter) = factorise(&k)?;
        let alpha = cholesky_solve(&chol, &yn);
        let lml = lml_from_factor(&chol, &alpha, &yn);
        Ok(Self { hyper, x: x.to_vec(), chol, alpha, jitter, y_mean, y_scale, log_marginal_likelihood: lml })
    }

    fn cross_kernel(&self, x: &[f64]) -> Vec<f64> {
        self.x.iter().map(|xi| matern52(distance(xi, x), &self.hyper)).collect()
    }

    /// Latent posterior mean and variance (no observation noise).
    pub fn predict_mean_var(&self, x: &[f64]) -> (f64, f64) {
        let ks = self.cross_kernel(x);
        let mean = dot(&ks, &self.alpha);
        let v = solve_lower(&self.chol, &ks);
        let var = (self.hyper.signal_var - dot(&v, &v)).max(0.0);
        (self.y_mean + self.y_scale * mean, var * self.y_scale * self.y_scale)
    }

    pub fn n_train(&self) -> usize {
        self.x.len()
    }
}

impl Predict for GpModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.y_mean + self.y_scale * dot(&self.cross_kernel(x), &self.alpha)
    }

    fn variance(&self, x: &[f64]) -> Option<f64> {
        Some(self.predict_mean_var(x).1)
    }
}

fn lml_from_factor(l: &Matrix, alpha: &[f64], y: &[f64]) -> f64 {
    let n = y.len();
    let log_det: f64 = (0..n).map(|i| math::ln(l[(i, i)])).sum();
    -0.5 * dot(y, alpha) - log_det - 0.5 * n as f64 * math::ln(2.0 * core::f64::consts::PI)
}

/// Log marginal likelihood and its gradient with respect to
/// (ln ℓ, ln σ_f², ln σ_n²); `None` if the kernel is not positive definite.
pub(crate) fn lml_and_gradient(dist: &Matrix, y: &[f64], hyper: &GpHyper) -> Option<(f64, [f64; 3])> {
    let n = y.len();
    let k = kernel_from_distances(dist, hyper);
    let l = cholesky(&k)?;
    let alpha = cholesky_solve(&l, y);
    let lml = lml_from_factor(&l, &alpha, y);
    let kinv = cholesky_inverse(&l);
    let mut grad = [0.0; 3];
    for i in 0..n {
        for j in 0..n {
            let w = alpha[i] * alpha[j] - kinv[(i, j)];
            let s = SQRT5 * dist[(i, j)] / hyper.lengthscale;
            let e = math::exp(-s);
            // ∂k/∂ln ℓ = σ_f² e^{-s} s² (1 + s) / 3
            grad[0] += w * hyper.signal_var * e * s * s * (1.0 + s) / 3.0;
            // ∂k/∂ln σ_f² = k_signal
            grad[1] += w * hyper.signal_var * (1.0 + s + s * s / 3.0) * e;
        }
        grad[2] += (alpha[i] * alpha[i] - kinv[(i, i)]) * hyper.noise_var;
    }
    Some((lml, [0.5 * grad[0], 0.5 * grad[1], 0.5 * grad[2]]))
}

pub(crate) struct Bounds {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Bounds {
    fn new(box_diagonal: f64, y: &[f64]) -> Self {
        let diag = if box_diagonal > 0.0 { box_diagonal } else { 1.0 };
        let s = (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).max(1e-12);
        Self {
            lo: [math::ln(1e-3 * diag), math::ln(1e-6 * s), math::ln(1e-8)],
            hi: [math::ln(1e3 * diag), math::ln(1e6 * s), math::ln(1e2 * s).max(math::ln(1e-8))],
        }
    }

    fn clamp(&self, t: [f64; 3]) -> [f64; 3] {
        [t[0].clamp(self.lo[0], self.hi[0]), t[1].clamp(self.lo[1], self.hi[1]), t[2].clamp(self.lo[2], self.hi[2])]
    }
}

fn to_hyper(t: [f64; 3]) -> GpHyper {
    GpHyper { lengthscale: math::exp(t[0]), signal_var: math::exp(t[1]), noise_var: math::exp(t[2]) }
}

fn optimise_hypers(dist: &Matrix, y: &[f64], start: GpHyper, bounds: &Bounds, config: &GpConfig) -> GpHyper {
    let mut rng = Rng::stream(config.seed, 0x6B);
    let mut best: Option<(f64, [f64; 3])> = None;
    for r in 0..config.restarts.max(1) {
        let theta0 = if r == 0 {
            bounds.clamp([math::ln(start.lengthscale), math::ln(start.signal_var), math::ln(start.noise_var)])
        } else {
            // log-uniform over the box, noise start capped at 1e-2 · s
            let hi_noise = bounds.hi[2].min(bounds.lo[2].max(bounds.hi[1] - math::ln(1e4)));
            [
                rng.uniform(bounds.lo[0], bounds.hi[0]),
                rng.uniform(bounds.lo[1], bounds.hi[1]),
                rng.uniform(bounds.lo[2], hi_noise.max(bounds.lo[2])),
            ]
        };
        if let Some((f, t)) = ascend(dist, y, theta0, bounds, config.steps) {
            if best.is_none_or(|(bf, _)| f > bf) {
                best = Some((f, t));
            }
        }
    }
    best.map_or(start, |(_, t)| to_hyper(t))
}

fn ascend(dist: &Matrix, y: &[f64], theta0: [f64; 3], bounds: &Bounds, steps: usize) -> Option<(f64, [f64; 3])> {
    let mut theta = theta0;
    let (mut f, mut g) = lml_and_gradient(dist, y, &to_hyper(theta))?;
    let mut step = 0.1;
    for _ in 0..steps {
        let norm = math::sqrt(g.iter().map(|v| v * v).sum());
        if !(norm > 0.0) || step < 1e-10 {
            break;
        }
        let cand = bounds.clamp([
            theta[0] + step * g[0] / norm,
            theta[1] + step * g[1] / norm,
            theta[2] + step * g[2] / norm,
        ]);
        match lml_and_gradient(dist, y, &to_hyper(cand)) {
            Some((fc, gc)) if fc > f => {
                theta = cand;
                f = fc;
                g = gc;
                step *= 1.2;
            }
            _ => step *= 0.5,
        }
    }
    Some((f, theta))
}
