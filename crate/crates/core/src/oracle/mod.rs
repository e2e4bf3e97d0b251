//! Exact, unregularized reference solvers for small instances.

mod flow;
mod hungarian;

pub use flow::{transportation, Transport, FLOW_SCALE};
pub use hungarian::hungarian;

use crate::kernel::{cost_matrix, CostSpec};
use crate::math::abs;
use crate::measure::total_mass;
use crate::{DiscreteMeasure, Error, Matrix, Result};

/// `min ⟨c, π⟩` over plans with marginals `α` and `β`.
pub fn exact_balanced_ot(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, cost: &CostSpec) -> Result<f64> {
    let (ma, mb) = (total_mass(alpha), total_mass(beta));
    if abs(ma - mb) > 1e-9 * ma.max(mb) {
        return Err(Error::Infeasible(ma, mb));
    }
    if alpha.is_empty() || beta.is_empty() {
        return Ok(0.0);
    }
    let c = cost_matrix(cost, alpha, beta)?;
    Ok(transportation(alpha.weights(), beta.weights(), &c)?.cost)
}

/// Optimal partial transport: `min ⟨c, π⟩ + TV(π₁, α) + TV(π₂, β)`.
///
/// Each side gets a slack node; destroying or creating a unit of mass costs 1.
pub fn exact_partial_ot_tv(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, cost: &CostSpec) -> Result<f64> {
    let (n, m) = (alpha.len(), beta.len());
    let c = if n > 0 && m > 0 {
        cost_matrix(cost, alpha, beta)?
    } else {
        Matrix::zeros(n, m)
    };
    let mut supply = alpha.weights().to_vec();
    supply.push(total_mass(beta));
    let mut demand = beta.weights().to_vec();
    demand.push(total_mass(alpha));
    let aug = Matrix::from_fn(n + 1, m + 1, |i, j| match (i < n, j < m) {
        (true, true) => c.get(i, j),
        (false, false) => 0.0,
        _ => 1.0,
    });
    Ok(transportation(&supply, &demand, &aug)?.cost)
}
