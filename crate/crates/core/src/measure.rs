//! Discrete non-negative measures and their mass statistics.

use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// A weighted point cloud in `R^dim`.
///
/// Zero weights are allowed and kept in place so that plan matrices stay
/// indexed by atom position.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive"));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure("points and weights differ in length"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimMismatch(dim, p.len()));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite coordinate"));
            }
            coords.extend_from_slice(p);
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure("weights must be finite and non-negative"));
        }
        Ok(DiscreteMeasure {
            dim,
            coords,
            weights,
        })
    }

    /// Every atom gets weight 1.
    pub fn uniform_unit(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        Self::new(dim, points, alloc::vec![1.0; n])
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), Vec::new())
    }

    /// Same support, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::InvalidMeasure("weights length differs from support"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure("weights must be finite and non-negative"));
        }
        Ok(DiscreteMeasure {
            dim: self.dim,
            coords: self.coords.clone(),
            weights,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        total_mass(self)
    }
}

pub fn total_mass(mu: &DiscreteMeasure) -> f64 {
    mu.weights.iter().sum()
}

/// Arithmetic, geometric and harmonic means of two total masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassStats {
    pub mass_a: f64,
    pub mass_g: f64,
    pub mass_h: f64,
}

impl MassStats {
    pub fn from_masses(ma: f64, mb: f64) -> Result<Self> {
        if !(ma > 0.0 && mb > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(MassStats {
            mass_a: 0.5 * (ma + mb),
            mass_g: sqrt(ma * mb),
            mass_h: 2.0 / (1.0 / ma + 1.0 / mb),
        })
    }
}

pub fn mass_stats(alpha: &DiscreteMeasure, beta: &DiscreteMeasure) -> Result<MassStats> {
    MassStats::from_masses(alpha.total_mass(), beta.total_mass())
}

pub fn scale(mu: &DiscreteMeasure, lambda: f64) -> Result<DiscreteMeasure> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveScale(lambda));
    }
    Ok(DiscreteMeasure {
        dim: mu.dim,
        coords: mu.coords.clone(),
        weights: mu.weights.iter().map(|w| w * lambda).collect(),
    })
}

/// Divides both measures by the geometric mean of their masses.
pub fn normalize_pair(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let mg = mass_stats(alpha, beta)?.mass_g;
    let div = |mu: &DiscreteMeasure| DiscreteMeasure {
        dim: mu.dim,
        coords: mu.coords.clone(),
        weights: mu.weights.iter().map(|w| w / mg).collect(),
    };
    Ok((div(alpha), div(beta)))
}
