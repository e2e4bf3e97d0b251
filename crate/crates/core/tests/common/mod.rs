#![allow(dead_code)]

use hurot_core::experiments::{random_instance, Layout, WeightKind};
use hurot_core::DiscreteMeasure;

pub fn line(xs: &[f64], ws: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::new(1, xs.iter().map(|x| vec![*x]).collect(), ws.to_vec()).unwrap()
}

pub fn dirac(x: f64) -> DiscreteMeasure {
    line(&[x], &[1.0])
}

pub fn instance(seed: u64, n: usize, m: usize) -> (DiscreteMeasure, DiscreteMeasure) {
    random_instance(seed, n, m, Layout::UnitSquare, WeightKind::Uniform)
}

pub fn diagrams(seed: u64, n: usize, m: usize) -> (DiscreteMeasure, DiscreteMeasure) {
    random_instance(seed, n, m, Layout::Triangle, WeightKind::Unit)
}

/// Same support as `mu`, total mass moved to `mass`.
pub fn with_mass(mu: &DiscreteMeasure, mass: f64) -> DiscreteMeasure {
    let m: f64 = mu.weights().iter().sum();
    mu.with_weights(mu.weights().iter().map(|w| w * mass / m).collect()).unwrap()
}

pub fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Plain scaling-form Sinkhorn (no log domain) for moderate ε. `prox`
/// maps the raw log-integral `p` to the potential, e.g. `|p| -p` for
/// balanced. Returns the plan `a_i K_ij b_j w_ij`.
pub fn scaling_plan(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    eps: f64,
    normalizer: f64,
    prox: impl Fn(f64) -> f64,
    iters: usize,
) -> Vec<Vec<f64>> {
    let a = alpha.weights();
    let b = beta.weights();
    let k: Vec<Vec<f64>> = alpha
        .points()
        .map(|x| beta.points().map(|y| (-sq(x, y) / eps).exp()).collect())
        .collect();
    let (n, m) = (a.len(), b.len());
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; m];
    for _ in 0..iters {
        for i in 0..n {
            let s: f64 = (0..m).map(|j| k[i][j] * v[j] * b[j] / normalizer).sum();
            u[i] = (prox(eps * s.ln()) / eps).exp();
        }
        for j in 0..m {
            let s: f64 = (0..n).map(|i| k[i][j] * u[i] * a[i] / normalizer).sum();
            v[j] = (prox(eps * s.ln()) / eps).exp();
        }
    }
    (0..n)
        .map(|i| (0..m).map(|j| u[i] * k[i][j] * v[j] * a[i] * b[j] / normalizer).collect())
        .collect()
}
