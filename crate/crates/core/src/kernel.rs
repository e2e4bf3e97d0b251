//! Ground costs, Gibbs kernels and kernel quadratic forms.

use crate::math::{exp, sqrt};
use crate::measure::DiscreteMeasure;
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    SqEuclidean,
    Euclidean,
    /// Precomputed `n × m` costs; row `i` is atom `i` of the first measure.
    ExplicitMatrix(Matrix),
}

pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn cost_matrix(spec: &CostSpec, alpha: &DiscreteMeasure, beta: &DiscreteMeasure) -> Result<Matrix> {
    let shape = (alpha.len(), beta.len());
    match spec {
        CostSpec::ExplicitMatrix(c) => {
            c.check_shape(shape)?;
            Ok(c.clone())
        }
        _ => {
            if alpha.dim() != beta.dim() {
                return Err(Error::DimMismatch(alpha.dim(), beta.dim()));
            }
            let euclid = matches!(spec, CostSpec::Euclidean);
            Ok(Matrix::from_fn(shape.0, shape.1, |i, j| {
                let d2 = sq_dist(alpha.point(i), beta.point(j));
                if euclid {
                    sqrt(d2)
                } else {
                    d2
                }
            }))
        }
    }
}

pub fn gibbs_kernel(c: &Matrix, epsilon: f64) -> Matrix {
    c.map(|v| exp(-v / epsilon))
}

/// `<mu, nu>_K = Σ_ij K(x_i, y_j) mu_i nu_j` with `K = exp(-c/ε)`.
pub fn kernel_inner(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    spec: &CostSpec,
    epsilon: f64,
) -> Result<f64> {
    let k = gibbs_kernel(&cost_matrix(spec, mu, nu)?, epsilon);
    Ok(bilinear(&k, mu.weights(), nu.weights()))
}

/// `‖mu − nu‖²_K`, expanded into the three inner products.
pub fn kernel_norm_sq(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    spec: &CostSpec,
    epsilon: f64,
) -> Result<f64> {
    let mm = kernel_inner(mu, mu, &self_spec(spec)?, epsilon)?;
    let nn = kernel_inner(nu, nu, &self_spec(spec)?, epsilon)?;
    let mn = kernel_inner(mu, nu, spec, epsilon)?;
    Ok(mm + nn - 2.0 * mn)
}

/// Signed double integral `∬ c d(α−β) d(α−β)`.
pub fn mmd(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, spec: &CostSpec) -> Result<f64> {
    let aa = bilinear(&cost_matrix(&self_spec(spec)?, alpha, alpha)?, alpha.weights(), alpha.weights());
    let bb = bilinear(&cost_matrix(&self_spec(spec)?, beta, beta)?, beta.weights(), beta.weights());
    let ab = bilinear(&cost_matrix(spec, alpha, beta)?, alpha.weights(), beta.weights());
    Ok(aa + bb - 2.0 * ab)
}

fn bilinear(k: &Matrix, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .enumerate()
        .map(|(i, &ai)| ai * k.row(i).iter().zip(b).map(|(kij, bj)| kij * bj).sum::<f64>())
        .sum()
}

// Self-interaction terms need a cost on (mu, mu); explicit matrices only cover
// the cross term, so they are rejected there.
fn self_spec(spec: &CostSpec) -> Result<CostSpec> {
    match spec {
        CostSpec::ExplicitMatrix(_) => Err(Error::UnsupportedKind),
        s => Ok(s.clone()),
    }
}
