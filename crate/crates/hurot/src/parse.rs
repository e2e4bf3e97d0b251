//! Command-line syntax for divergences, costs, domains and lambda grids.

use std::path::Path;

use hurot_core::experiments::GridScale;
use hurot_core::otb::{BoundaryDomain, DomainKind, GroundCost};
use hurot_core::{CostSpec, MarginalDivergence, Model};

use crate::io::{read_cost_matrix, IoError};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("unknown {what} `{value}`")]
    Unknown { what: &'static str, value: String },
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

fn number(s: &str) -> Result<f64, ParseError> {
    s.trim().parse::<f64>().map_err(|_| ParseError::Number(s.to_string()))
}

/// `sqeuclidean`, `euclidean` or `matrix:<path.csv>`.
pub fn parse_cost(s: &str) -> Result<CostSpec, ParseError> {
    match s {
        "sqeuclidean" => Ok(CostSpec::SqEuclidean),
        "euclidean" => Ok(CostSpec::Euclidean),
        _ => match s.strip_prefix("matrix:") {
            Some(path) => Ok(CostSpec::ExplicitMatrix(read_cost_matrix(Path::new(path))?)),
            None => Err(ParseError::Unknown {
                what: "cost",
                value: s.to_string(),
            }),
        },
    }
}

/// Ground cost of a boundary domain; explicit matrices are not allowed.
pub fn ground_cost(cost: &CostSpec) -> Result<GroundCost, ParseError> {
    match cost {
        CostSpec::SqEuclidean => Ok(GroundCost::SqEuclidean),
        CostSpec::Euclidean => Ok(GroundCost::Euclidean),
        CostSpec::ExplicitMatrix(_) => Err(ParseError::Invalid(
            "boundary transport needs sqeuclidean or euclidean cost".into(),
        )),
    }
}

/// `halfplane` or `box:lo1,hi1,lo2,hi2,...`.
pub fn parse_domain(s: &str, cost: GroundCost) -> Result<BoundaryDomain, ParseError> {
    let kind = if s == "halfplane" {
        DomainKind::HalfPlane
    } else if let Some(rest) = s.strip_prefix("box:") {
        let v = rest.split(',').map(number).collect::<Result<Vec<f64>, _>>()?;
        if v.is_empty() || v.len() % 2 != 0 {
            return Err(ParseError::Invalid(format!("box needs lo,hi pairs: `{s}`")));
        }
        DomainKind::Box(v.chunks(2).map(|c| (c[0], c[1])).collect())
    } else {
        return Err(ParseError::Unknown {
            what: "domain",
            value: s.to_string(),
        });
    };
    BoundaryDomain::new(kind, cost).map_err(|e| ParseError::Invalid(e.to_string()))
}

/// `balanced`, `kl:rho=<float>`, `tv` or `otb:<domain>`.
pub fn parse_divergence(s: &str, cost: &CostSpec) -> Result<MarginalDivergence, ParseError> {
    if s == "balanced" {
        return Ok(MarginalDivergence::Balanced);
    }
    if s == "tv" {
        return Ok(MarginalDivergence::Tv);
    }
    if let Some(rho) = s.strip_prefix("kl:rho=") {
        return MarginalDivergence::kl(number(rho)?).map_err(|e| ParseError::Invalid(e.to_string()));
    }
    if let Some(domain) = s.strip_prefix("otb:") {
        return Ok(MarginalDivergence::OtbSpatial(parse_domain(domain, ground_cost(cost)?)?));
    }
    Err(ParseError::Unknown {
        what: "divergence",
        value: s.to_string(),
    })
}

pub fn parse_model(s: &str) -> Result<Model, ParseError> {
    match s {
        "standard" => Ok(Model::Standard),
        "homogeneous" => Ok(Model::Homogeneous),
        _ => Err(ParseError::Unknown {
            what: "model",
            value: s.to_string(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub num: usize,
    pub scale: GridScale,
}

/// `min:max:num:lin|log`.
pub fn parse_grid(s: &str) -> Result<Grid, ParseError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(ParseError::Invalid(format!("lambda grid must be min:max:num:lin|log, got `{s}`")));
    }
    let num = parts[2]
        .parse::<usize>()
        .map_err(|_| ParseError::Number(parts[2].to_string()))?;
    let scale = match parts[3] {
        "lin" => GridScale::Linear,
        "log" => GridScale::Log,
        other => {
            return Err(ParseError::Unknown {
                what: "grid scale",
                value: other.to_string(),
            })
        }
    };
    Ok(Grid {
        min: number(parts[0])?,
        max: number(parts[1])?,
        num,
        scale,
    })
}
