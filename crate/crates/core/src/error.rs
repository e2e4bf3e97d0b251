use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure has zero total mass")]
    ZeroMass,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("spatially varying divergence needs a location")]
    MissingLocation,
    #[error("operation not supported for this divergence kind")]
    UnsupportedKind,
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("infeasible: unequal masses ({0} vs {1})")]
    Infeasible(f64, f64),
    #[error("sinkhorn did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("point {0} lies outside the domain")]
    OutsideDomain(usize),
    #[error("log-log slope needs positive values and lambdas")]
    NonPositiveValues,
    #[error("invalid measure: {0}")]
    InvalidMeasure(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
