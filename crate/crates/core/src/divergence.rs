//! Entropy functions, their conjugates, the `aprox` operator and the
//! divergence / entropy evaluators used by the primal objectives.

use crate::math::{abs, exp, ln, xlogx};
use crate::measure::DiscreteMeasure;
use crate::otb::BoundaryDomain;
use crate::solver::TransportPlan;
use crate::{Error, Matrix, MassStats, Result};

/// Relative slack under which a near-feasible marginal is treated as exact.
/// Sinkhorn only reaches hard marginal constraints up to its stopping tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Conjugate arguments up to this far beyond the TV domain are clamped
/// instead of producing `+inf`.
pub const TV_CONJUGATE_SLACK: f64 = 1e-9;

/// Marginal penalty of the unbalanced problem.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalDivergence {
    /// Hard marginal constraints.
    Balanced,
    /// `rho · KL`.
    Kl { rho: f64 },
    /// Total variation, `φ(p) = |1 − p|`.
    Tv,
    /// Boundary-transport divergence on hat-renormalized marginals.
    OtbSpatial(BoundaryDomain),
}

impl MarginalDivergence {
    pub fn kl(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidConfig("KL strength rho must be positive"));
        }
        Ok(MarginalDivergence::Kl { rho })
    }

    /// `φ(0)`, the price of destroying a unit of mass.
    pub fn phi_at_zero(&self) -> f64 {
        match self {
            MarginalDivergence::Balanced => f64::INFINITY,
            MarginalDivergence::Kl { rho } => *rho,
            MarginalDivergence::Tv | MarginalDivergence::OtbSpatial(_) => 1.0,
        }
    }

    /// Slope `κ` of a linear `aprox` (`None` when the operator is not linear).
    pub fn aprox_slope(&self, epsilon: f64) -> Option<f64> {
        match self {
            MarginalDivergence::Balanced => Some(1.0),
            MarginalDivergence::Kl { rho } => Some(rho / (rho + epsilon)),
            _ => None,
        }
    }
}

/// `φ(p)`; the spatial kind evaluates `φ(x, p)` and needs the location `x`.
pub fn phi(div: &MarginalDivergence, p: f64, x: Option<&[f64]>) -> Result<f64> {
    if p < 0.0 {
        if let (MarginalDivergence::OtbSpatial(_), None) = (div, x) {
            return Err(Error::MissingLocation);
        }
        return Ok(f64::INFINITY);
    }
    Ok(match div {
        MarginalDivergence::Balanced => {
            if p == 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        MarginalDivergence::Kl { rho } => rho * (xlogx(p) - p + 1.0),
        MarginalDivergence::Tv => abs(1.0 - p),
        MarginalDivergence::OtbSpatial(domain) => {
            let x = x.ok_or(Error::MissingLocation)?;
            let c = domain.boundary_cost(x)?;
            phi_boundary(c, p, 0.0)
        }
    })
}

// |1 − c z| on [0, 1/c] (with `slack` relative overshoot accepted), +inf beyond.
fn phi_boundary(c: f64, z: f64, slack: f64) -> f64 {
    let cz = c * z;
    if z < 0.0 || cz > 1.0 + slack {
        f64::INFINITY
    } else {
        abs(1.0 - cz)
    }
}

/// Legendre transform `φ*(q) = sup_{p ≥ 0} pq − φ(p)`.
pub fn phi_star(div: &MarginalDivergence, q: f64) -> Result<f64> {
    match div {
        MarginalDivergence::Balanced => Ok(q),
        MarginalDivergence::Kl { rho } => Ok(rho * (exp(q / rho) - 1.0)),
        MarginalDivergence::Tv => Ok(if q > 1.0 { f64::INFINITY } else { q.max(-1.0) }),
        MarginalDivergence::OtbSpatial(_) => Err(Error::UnsupportedKind),
    }
}

/// Anisotropic proximity operator `argmin_q ε e^{(p−q)/ε} + φ*(q)`.
pub fn aprox(div: &MarginalDivergence, epsilon: f64, p: f64) -> Result<f64> {
    match div {
        MarginalDivergence::Balanced => Ok(p),
        MarginalDivergence::Kl { rho } => Ok(rho / (rho + epsilon) * p),
        MarginalDivergence::Tv => Ok(p.clamp(-1.0, 1.0)),
        MarginalDivergence::OtbSpatial(_) => Err(Error::UnsupportedKind),
    }
}

/// `−φ*(−f)`, the per-unit-mass dual term of a potential value.
/// Returns `-inf` for potentials outside the conjugate's domain.
pub(crate) fn neg_conj_neg(div: &MarginalDivergence, f: f64) -> f64 {
    match div {
        MarginalDivergence::Balanced => f,
        MarginalDivergence::Kl { rho } => rho * (1.0 - exp(-f / rho)),
        MarginalDivergence::Tv => {
            if -f > 1.0 + TV_CONJUGATE_SLACK {
                f64::NEG_INFINITY
            } else {
                f.min(1.0)
            }
        }
        // handled per atom with the boundary cost
        MarginalDivergence::OtbSpatial(_) => f64::NAN,
    }
}

/// `D_φ(μ | ν) = Σ ν_i φ(μ_i / ν_i)` plus the recession term on atoms where
/// `ν_i = 0`. Both measures must live on the same atoms.
pub fn eval_divergence(div: &MarginalDivergence, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::ShapeMismatch {
            expected: (nu.len(), 1),
            got: (mu.len(), 1),
        });
    }
    match div {
        MarginalDivergence::OtbSpatial(domain) => {
            let costs = nu
                .points()
                .enumerate()
                .map(|(i, x)| domain.boundary_cost(x).map_err(|_| Error::OutsideDomain(i)))
                .collect::<Result<alloc::vec::Vec<f64>>>()?;
            Ok(divergence_on_weights(div, mu.weights(), nu.weights(), Some(&costs)))
        }
        _ => Ok(divergence_on_weights(div, mu.weights(), nu.weights(), None)),
    }
}

/// Weight-level divergence. For the spatial kind `nu` is the hat measure and
/// `boundary_costs` holds `c_Δ` of each atom.
pub(crate) fn divergence_on_weights(
    div: &MarginalDivergence,
    mu: &[f64],
    nu: &[f64],
    boundary_costs: Option<&[f64]>,
) -> f64 {
    match div {
        MarginalDivergence::Balanced => {
            let gap: f64 = mu.iter().zip(nu).map(|(a, b)| abs(a - b)).sum();
            let scale = mu.iter().sum::<f64>().max(nu.iter().sum::<f64>());
            if gap <= FEASIBILITY_TOL * scale {
                0.0
            } else {
                f64::INFINITY
            }
        }
        MarginalDivergence::Kl { rho } => {
            let mut acc = 0.0;
            for (&m, &n) in mu.iter().zip(nu) {
                if n == 0.0 {
                    if m > 0.0 {
                        return f64::INFINITY;
                    }
                } else {
                    if m > 0.0 {
                        acc += m * ln(m / n);
                    }
                    acc += n - m;
                }
            }
            rho * acc
        }
        MarginalDivergence::Tv => mu.iter().zip(nu).map(|(a, b)| abs(a - b)).sum(),
        MarginalDivergence::OtbSpatial(_) => {
            let costs = boundary_costs.expect("spatial divergence needs boundary costs");
            boundary_divergence(mu, nu, costs)
        }
    }
}

/// Spatial divergence against a hat measure `nu` with boundary costs `c_Δ`.
pub(crate) fn boundary_divergence(mu: &[f64], nu: &[f64], costs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((&m, &n), &c) in mu.iter().zip(nu).zip(costs) {
        if n == 0.0 {
            // φ(x, ·) is +inf beyond 1/c_Δ, so any mass there is infeasible
            if m > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let v = phi_boundary(c, m / n, FEASIBILITY_TOL);
        if v.is_infinite() {
            return v;
        }
        acc += n * v;
    }
    acc
}

/// Unnormalized `KL(π | r) = Σ π log(π/r) − π + r`.
pub fn eval_kl(pi: &TransportPlan, reference: &Matrix) -> Result<f64> {
    reference.check_shape(pi.weights().shape())?;
    Ok(kl_matrix(pi.weights().as_slice(), reference.as_slice()))
}

pub(crate) fn kl_matrix(pi: &[f64], reference: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&p, &r) in pi.iter().zip(reference) {
        if r == 0.0 {
            if p > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        if p > 0.0 {
            acc += p * ln(p / r);
        }
        acc += r - p;
    }
    acc
}

/// Homogeneous regularizer
/// `R(π | α, β) = ½ (KL(π | α/m(α) ⊗ β) + KL(π | α ⊗ β/m(β)))`.
pub fn eval_r(pi: &TransportPlan, alpha: &DiscreteMeasure, beta: &DiscreteMeasure) -> Result<f64> {
    pi.weights().check_shape((alpha.len(), beta.len()))?;
    r_on_weights(pi.weights(), alpha.weights(), beta.weights())
}

pub(crate) fn r_on_weights(pi: &Matrix, a: &[f64], b: &[f64]) -> Result<f64> {
    let ma: f64 = a.iter().sum();
    let mb: f64 = b.iter().sum();
    MassStats::from_masses(ma, mb)?;
    let first = Matrix::from_fn(a.len(), b.len(), |i, j| a[i] / ma * b[j]);
    let second = Matrix::from_fn(a.len(), b.len(), |i, j| a[i] * (b[j] / mb));
    Ok(0.5 * (kl_matrix(pi.as_slice(), first.as_slice()) + kl_matrix(pi.as_slice(), second.as_slice())))
}
