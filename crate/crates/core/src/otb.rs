//! Transport with boundary: boundary geometry, hat measures, the regularized
//! solver and its Sinkhorn divergence, and the exact unregularized value.

use alloc::vec::Vec;

use crate::divergence::MarginalDivergence;
use crate::kernel::{cost_matrix, CostSpec};
use crate::math::sqrt;
use crate::oracle;
use crate::solver::{self, Estimate, SolveResult, SolverConfig};
use crate::{DiscreteMeasure, Error, Matrix, Result};

/// Shape of the domain Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// `{(t1, t2) : t1 < t2}` with the diagonal as boundary.
    HalfPlane,
    /// Product of closed intervals, one per axis.
    Box(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundCost {
    SqEuclidean,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDomain {
    kind: DomainKind,
    cost: GroundCost,
}

impl BoundaryDomain {
    pub fn new(kind: DomainKind, cost: GroundCost) -> Result<Self> {
        if let DomainKind::Box(bounds) = &kind {
            if bounds.is_empty() {
                return Err(Error::InvalidConfig("box needs at least one axis"));
            }
            if bounds.iter().any(|(lo, hi)| !(lo < hi && lo.is_finite() && hi.is_finite())) {
                return Err(Error::InvalidConfig("box bounds must satisfy lo < hi"));
            }
        }
        Ok(BoundaryDomain { kind, cost })
    }

    /// The persistence-diagram half-plane with squared Euclidean cost.
    pub fn half_plane() -> Self {
        BoundaryDomain {
            kind: DomainKind::HalfPlane,
            cost: GroundCost::SqEuclidean,
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn ground_cost(&self) -> GroundCost {
        self.cost
    }

    pub fn cost_spec(&self) -> CostSpec {
        match self.cost {
            GroundCost::SqEuclidean => CostSpec::SqEuclidean,
            GroundCost::Euclidean => CostSpec::Euclidean,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::HalfPlane => 2,
            DomainKind::Box(b) => b.len(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimMismatch(self.dim(), x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain(0));
        }
        let inside = match &self.kind {
            DomainKind::HalfPlane => x[0] <= x[1],
            DomainKind::Box(b) => x.iter().zip(b).all(|(v, (lo, hi))| lo <= v && v <= hi),
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutsideDomain(0))
        }
    }

    // Euclidean distance to the boundary.
    fn distance(&self, x: &[f64]) -> f64 {
        match &self.kind {
            DomainKind::HalfPlane => (x[1] - x[0]) / sqrt(2.0),
            DomainKind::Box(b) => x
                .iter()
                .zip(b)
                .map(|(v, (lo, hi))| (v - lo).min(hi - v))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `c_Δ(x) = c(x, ∂Ω)`. Errors with `OutsideDomain(0)` for points outside Ω.
    pub fn boundary_cost(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let d = self.distance(x);
        Ok(match self.cost {
            GroundCost::SqEuclidean => match self.kind {
                // exact form avoids the rounding of squaring d
                DomainKind::HalfPlane => (x[1] - x[0]) * (x[1] - x[0]) / 2.0,
                DomainKind::Box(_) => d * d,
            },
            GroundCost::Euclidean => d,
        })
    }

    /// Nearest boundary point `P(x)`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(match &self.kind {
            DomainKind::HalfPlane => {
                let mid = 0.5 * (x[0] + x[1]);
                alloc::vec![mid, mid]
            }
            DomainKind::Box(b) => {
                let mut best = (f64::INFINITY, 0, 0.0);
                for (k, (v, (lo, hi))) in x.iter().zip(b).enumerate() {
                    if v - lo < best.0 {
                        best = (v - lo, k, *lo);
                    }
                    if hi - v < best.0 {
                        best = (hi - v, k, *hi);
                    }
                }
                let mut p = x.to_vec();
                p[best.1] = best.2;
                p
            }
        })
    }
}

/// Hat measure `c_Δ(x) dμ` with the indices of atoms lying on the boundary.
/// Those atoms keep their position with weight 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HatMeasure {
    pub measure: DiscreteMeasure,
    pub boundary_atoms: Vec<usize>,
}

pub(crate) struct HatWeights {
    pub(crate) hat: Vec<f64>,
    pub(crate) costs: Vec<f64>,
}

pub(crate) fn hat_weights(domain: &BoundaryDomain, mu: &DiscreteMeasure) -> Result<HatWeights> {
    if mu.dim() != domain.dim() {
        return Err(Error::DimMismatch(domain.dim(), mu.dim()));
    }
    let costs = mu
        .points()
        .enumerate()
        .map(|(i, x)| domain.boundary_cost(x).map_err(|_| Error::OutsideDomain(i)))
        .collect::<Result<Vec<f64>>>()?;
    let hat = costs.iter().zip(mu.weights()).map(|(c, w)| c * w).collect();
    Ok(HatWeights { hat, costs })
}

pub fn hat_measure(domain: &BoundaryDomain, mu: &DiscreteMeasure) -> Result<HatMeasure> {
    let h = hat_weights(domain, mu)?;
    let boundary_atoms = h
        .costs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == 0.0)
        .map(|(i, _)| i)
        .collect();
    Ok(HatMeasure {
        measure: mu.with_weights(h.hat)?,
        boundary_atoms,
    })
}

/// `Pers(μ) = ∫ c_Δ dμ`.
pub fn total_persistence(domain: &BoundaryDomain, mu: &DiscreteMeasure) -> Result<f64> {
    Ok(hat_weights(domain, mu)?.hat.iter().sum())
}

/// Regularized transport with boundary. `cfg.model` selects the reference
/// measure; the homogeneous choice gives `FG_ε`.
pub fn rotb_solve(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    domain: &BoundaryDomain,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let div = MarginalDivergence::OtbSpatial(domain.clone());
    solver::solve(alpha, beta, &domain.cost_spec(), &div, cfg)
}

/// `FG_ε(α, β)` with the null conventions `FG_ε(0, β) = (1 + ε/2) Pers(β)`.
pub fn rotb_cost(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, domain: &BoundaryDomain, cfg: &SolverConfig) -> Result<Estimate> {
    let div = MarginalDivergence::OtbSpatial(domain.clone());
    solver::transport_cost(alpha, beta, &domain.cost_spec(), &div, cfg)
}

/// `SkFG_ε = FG_ε(α, β) − ½ FG_ε(α, α) − ½ FG_ε(β, β)`.
pub fn rotb_sinkhorn_divergence(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    domain: &BoundaryDomain,
    cfg: &SolverConfig,
) -> Result<Estimate> {
    let div = MarginalDivergence::OtbSpatial(domain.clone());
    solver::sinkhorn_divergence(alpha, beta, &domain.cost_spec(), &div, cfg)
}

/// One entry of an optimal partial matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Matched(usize, usize),
    /// `x_i` sent to the boundary.
    AlphaToBoundary(usize),
    /// `y_j` taken from the boundary.
    BoundaryToBeta(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgExact {
    pub cost: f64,
    /// Present when both measures have unit weights.
    pub matching: Option<Vec<Pairing>>,
}

/// Unregularized transport with boundary. Unit weights go through an
/// assignment on the augmented matrix, general weights through min-cost flow
/// with a boundary reservoir.
pub fn fg_exact(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, domain: &BoundaryDomain) -> Result<FgExact> {
    let ha = hat_weights(domain, alpha)?;
    let hb = hat_weights(domain, beta)?;
    let (n, m) = (alpha.len(), beta.len());
    let c = if n > 0 && m > 0 {
        cost_matrix(&domain.cost_spec(), alpha, beta)?
    } else {
        Matrix::zeros(n, m)
    };
    let unit = alpha.weights().iter().chain(beta.weights()).all(|w| *w == 1.0);
    if unit {
        let size = n + m;
        let aug = Matrix::from_fn(size, size, |r, s| match (r < n, s < m) {
            (true, true) => c.get(r, s),
            (true, false) => ha.costs[r],
            (false, true) => hb.costs[s],
            (false, false) => 0.0,
        });
        let (_, assignment) = oracle::hungarian(&aug)?;
        let mut cost = 0.0;
        let mut matching = Vec::new();
        for (r, &s) in assignment.iter().enumerate() {
            match (r < n, s < m) {
                (true, true) => {
                    cost += c.get(r, s);
                    matching.push(Pairing::Matched(r, s));
                }
                (true, false) => {
                    cost += ha.costs[r];
                    matching.push(Pairing::AlphaToBoundary(r));
                }
                (false, true) => {
                    cost += hb.costs[s];
                    matching.push(Pairing::BoundaryToBeta(s));
                }
                (false, false) => {}
            }
        }
        return Ok(FgExact {
            cost,
            matching: Some(matching),
        });
    }
    let ma: f64 = alpha.weights().iter().sum();
    let mb: f64 = beta.weights().iter().sum();
    let mut supply = alpha.weights().to_vec();
    supply.push(mb);
    let mut demand = beta.weights().to_vec();
    demand.push(ma);
    let aug = Matrix::from_fn(n + 1, m + 1, |i, j| match (i < n, j < m) {
        (true, true) => c.get(i, j),
        (true, false) => ha.costs[i],
        (false, true) => hb.costs[j],
        (false, false) => 0.0,
    });
    let t = oracle::transportation(&supply, &demand, &aug)?;
    Ok(FgExact {
        cost: t.cost,
        matching: None,
    })
}
