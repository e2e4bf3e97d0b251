//! Measure JSON, solve-result JSON, sweep CSV and cost-matrix CSV.
//!
//! Floats are written with 17 significant digits so that every `f64`
//! survives a round trip.

use std::io::{self, Write};
use std::path::Path;

use hurot_core::experiments::SweepResult;
use hurot_core::{DiscreteMeasure, Matrix, SolveResult};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid input: {0}")]
    Core(#[from] hurot_core::Error),
}

/// `1.2345678901234567e-3`; non-finite values become `null` in JSON.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Digits17);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

pub fn measure_from_json(text: &str) -> Result<DiscreteMeasure, IoError> {
    let m: MeasureJson = serde_json::from_str(text)?;
    let weights = m.weights.unwrap_or_else(|| vec![1.0; m.points.len()]);
    Ok(DiscreteMeasure::new(m.dim, m.points, weights)?)
}

pub fn measure_to_json(mu: &DiscreteMeasure) -> String {
    to_json(&MeasureJson {
        dim: mu.dim(),
        points: mu.points().map(<[f64]>::to_vec).collect(),
        weights: Some(mu.weights().to_vec()),
    })
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure, IoError> {
    measure_from_json(&read(path)?)
}

#[derive(Serialize)]
struct SolveJson<'a> {
    dual_value: f64,
    primal_value: f64,
    gap: f64,
    iterations: usize,
    converged: bool,
    f: &'a [f64],
    g: &'a [f64],
    plan: Vec<Vec<f64>>,
}

pub fn solve_result_to_json(r: &SolveResult) -> String {
    to_json(&SolveJson {
        dual_value: r.dual_value,
        primal_value: r.primal_value,
        gap: r.duality_gap,
        iterations: r.iterations,
        converged: r.converged,
        f: &r.potentials.f,
        g: &r.potentials.g,
        plan: r.plan.weights().to_rows(),
    })
}

pub const SWEEP_HEADER: [&str; 5] = ["lambda", "value", "slope_local", "iterations", "converged"];

pub fn sweep_to_csv(r: &SweepResult) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for k in 0..r.lambdas.len() {
        w.write_record([
            fmt17(r.lambdas[k]),
            fmt17(r.values[k]),
            fmt17(r.slopes[k]),
            r.iterations[k].to_string(),
            r.converged[k].to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Read {
        path: "<memory>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}

/// Headerless numeric CSV, one matrix row per line.
pub fn cost_matrix_from_csv(text: &str) -> Result<Matrix, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| hurot_core::Error::InvalidConfig("non-numeric cost entry")))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(Matrix::from_rows(&rows)?)
}

pub fn read_cost_matrix(path: &Path) -> Result<Matrix, IoError> {
    cost_matrix_from_csv(&read(path)?)
}
