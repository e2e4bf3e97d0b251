//! Entropic unbalanced optimal transport with a homogeneous regularizer.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! machinery: discrete measures, marginal divergences, Gibbs kernels, the
//! standard and homogeneous Sinkhorn engines, regularized transport with
//! boundary, exact min-cost-flow oracles and the homogeneity sweep helpers.
//! File formats, threading and the command line live in the `hurot` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod divergence;
pub mod experiments;
pub mod kernel;
pub mod matrix;
pub mod measure;
pub mod oracle;
pub mod otb;
pub mod solver;

pub use divergence::MarginalDivergence;
pub use error::{Error, Result};
pub use kernel::CostSpec;
pub use matrix::Matrix;
pub use measure::{DiscreteMeasure, MassStats};
pub use otb::{BoundaryDomain, DomainKind, GroundCost};
pub use solver::{
    Estimate, Init, Model, Potentials, SolveResult, SolverConfig, SymmetricResult, TransportPlan,
};
