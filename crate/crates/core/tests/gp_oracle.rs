use nalgebra::{DMatrix, DVector};
use surrobench_core::rng::Rng;
use surrobench_core::surrogates::{kernel_matrix, GpConfig, GpHyper, GpModel, Predict};

fn matern(a: &[f64], b: &[f64], h: &GpHyper) -> f64 {
    let r = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let s = 5f64.sqrt() * r / h.lengthscale;
    h.signal_var * (1.0 + s + s * s / 3.0) * (-s).exp()
}

fn random_data(n: usize, d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = Rng::new(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.next_f64()).collect()).collect();
    let y = x.iter().map(|v| v.iter().map(|t| (3.0 * t).sin()).sum::<f64>() + 0.1 * rng.normal()).collect();
    (x, y)
}

#[test]
fn posterior_matches_dense_solve() {
    let (x, y) = random_data(15, 3, 11);
    let h = GpHyper { lengthscale: 0.4, signal_var: 1.7, noise_var: 1e-4 };
    let model = GpModel::fit(&x, &y, 3f64.sqrt(), &GpConfig { hyper: h, ..Default::default() }).unwrap();
    assert_eq!(model.jitter, 0.0);

    let n = x.len();
    let k = DMatrix::from_fn(n, n, |i, j| matern(&x[i], &x[j], &h) + if i == j { h.noise_var } else { 0.0 });
    let kinv = k.clone().try_inverse().unwrap();
    let yv = DVector::from_vec(y.clone());
    let mut rng = Rng::new(5);
    for _ in 0..50 {
        let xs: Vec<f64> = (0..3).map(|_| rng.uniform(-0.2, 1.2)).collect();
        let ks = DVector::from_fn(n, |i, _| matern(&x[i], &xs, &h));
        let mean = (ks.transpose() * &kinv * &yv)[0];
        let var = h.signal_var - (ks.transpose() * &kinv * &ks)[0];
        let (m, v) = model.predict_mean_var(&xs);
        assert!((m - mean).abs() < 1e-8, "mean {m} vs {mean}");
        assert!((v - var.max(0.0)).abs() < 1e-8, "var {v} vs {var}");
        assert_eq!(model.predict(&xs), m);
    }
}

#[test]
fn kernel_matrix_is_psd_after_jitter() {
    let mut rng = Rng::new(8);
    for trial in 0..20 {
        let n = 5 + trial;
        // clustered and duplicated points stress the factorisation
        let mut x: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| 0.5 + 1e-7 * rng.normal()).collect()).collect();
        x[1] = x[0].clone();
        let y: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let h = GpHyper { lengthscale: 0.8, signal_var: 1.0, noise_var: 1e-12 };
        let model = GpModel::fit(&x, &y, 1.0, &GpConfig { hyper: h, ..Default::default() }).unwrap();
        let mut k = kernel_matrix(&x, &h);
        k.add_diagonal(model.jitter);
        let m = DMatrix::from_fn(n, n, |i, j| k[(i, j)]);
        let min = m.symmetric_eigen().eigenvalues.min();
        assert!(min >= -1e-8 * n as f64, "min eigenvalue {min}");
    }
}

#[test]
fn optimised_hyperparameters_stay_in_bounds() {
    let (x, y) = random_data(25, 2, 3);
    let diag = 2f64.sqrt();
    let cfg = GpConfig { optimise: true, restarts: 4, steps: 50, ..Default::default() };
    let m = GpModel::fit(&x, &y, diag, &cfg).unwrap();
    assert!(m.hyper.lengthscale >= 1e-3 * diag * (1.0 - 1e-12));
    assert!(m.hyper.lengthscale <= 1e3 * diag * (1.0 + 1e-12));
    assert!(m.hyper.noise_var >= 1e-8 * (1.0 - 1e-12));
}
