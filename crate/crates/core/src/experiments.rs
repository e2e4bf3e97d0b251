//! Homogeneity sweeps, log-log slope fits and the random instance generator.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::divergence::MarginalDivergence;
use crate::kernel::CostSpec;
use crate::math::{abs, exp, ln};
use crate::measure::{scale, total_mass, DiscreteMeasure};
use crate::solver::{self, Estimate, Model, SolverConfig, TransportPlan};
use crate::{Error, Result};

/// Threshold on the jump of consecutive local log-log slopes.
pub const BREAKPOINT_JUMP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `OT(λα, λβ)`.
    Cost,
    /// `Sk(λα, λβ)`.
    SinkhornDiv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub num_points: usize,
    pub scale: GridScale,
    pub metric: Metric,
    pub model: Model,
    /// Seed of the instance the sweep was run on.
    pub seed: u64,
}

impl SweepSpec {
    /// A single point is allowed when `lambda_min == lambda_max`.
    pub fn validate(&self) -> Result<()> {
        let ok_range = if self.num_points == 1 {
            self.lambda_min == self.lambda_max
        } else {
            self.num_points >= 2 && self.lambda_min < self.lambda_max
        };
        if !ok_range || !(self.lambda_min > 0.0) || !self.lambda_max.is_finite() {
            return Err(Error::InvalidConfig("invalid lambda grid"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.num_points;
        if n == 1 {
            return Ok(vec![self.lambda_min]);
        }
        let t = |k: usize| k as f64 / (n - 1) as f64;
        Ok((0..n)
            .map(|k| {
                if k == n - 1 {
                    return self.lambda_max;
                }
                match self.scale {
                    GridScale::Linear => self.lambda_min + t(k) * (self.lambda_max - self.lambda_min),
                    GridScale::Log => exp(ln(self.lambda_min) + t(k) * (ln(self.lambda_max) - ln(self.lambda_min))),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// Local log-log slope at each grid point: the slope of the segment
    /// ending there, or of the first segment at index 0.
    pub slopes: Vec<f64>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    /// Cross plans at the first and last grid points.
    pub plan_snapshots: Vec<(f64, TransportPlan)>,
}

/// One grid point: the metric at `(λα, λβ)` and the cross plan.
pub fn sweep_point(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
    metric: Metric,
    lambda: f64,
) -> Result<(Estimate, TransportPlan)> {
    let a = scale(alpha, lambda)?;
    let b = scale(beta, lambda)?;
    let cross = solver::solve(&a, &b, cost, div, cfg)?;
    let est = match metric {
        Metric::Cost => Estimate {
            value: cross.dual_value,
            iterations: cross.iterations,
            converged: cross.converged,
        },
        Metric::SinkhornDiv => solver::sinkhorn_divergence(&a, &b, cost, div, cfg)?,
    };
    Ok((est, cross.plan))
}

/// Assembles a result from per-point outcomes given in grid order.
pub fn assemble(lambdas: Vec<f64>, points: Vec<(Estimate, TransportPlan)>) -> SweepResult {
    let n = lambdas.len();
    let values: Vec<f64> = points.iter().map(|(e, _)| e.value).collect();
    let slopes = local_slopes(&lambdas, &values);
    let iterations = points.iter().map(|(e, _)| e.iterations).collect();
    let converged = points.iter().map(|(e, _)| e.converged).collect();
    let mut plan_snapshots = Vec::new();
    for (k, (_, plan)) in points.into_iter().enumerate() {
        if k == 0 || k + 1 == n {
            plan_snapshots.push((lambdas[k], plan));
        }
    }
    SweepResult {
        lambdas,
        values,
        slopes,
        iterations,
        converged,
        plan_snapshots,
    }
}

/// Evaluates the metric on every grid point, in order. `spec.model`
/// overrides `cfg.model`.
pub fn lambda_sweep(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
    spec: &SweepSpec,
) -> Result<SweepResult> {
    let lambdas = spec.grid()?;
    let cfg = cfg.clone().with_model(spec.model);
    let points = lambdas
        .iter()
        .map(|&l| sweep_point(alpha, beta, cost, div, &cfg, spec.metric, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(lambdas, points))
}

fn segment_slopes(lambdas: &[f64], values: &[f64]) -> Vec<f64> {
    lambdas
        .windows(2)
        .zip(values.windows(2))
        .map(|(l, v)| (ln(v[1]) - ln(v[0])) / (ln(l[1]) - ln(l[0])))
        .collect()
}

fn local_slopes(lambdas: &[f64], values: &[f64]) -> Vec<f64> {
    let seg = segment_slopes(lambdas, values);
    if seg.is_empty() {
        return vec![f64::NAN; lambdas.len()];
    }
    let mut out = Vec::with_capacity(lambdas.len());
    out.push(seg[0]);
    out.extend_from_slice(&seg);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    /// Grid indices where consecutive segment slopes differ by more than
    /// [`BREAKPOINT_JUMP`].
    pub breakpoints: Vec<usize>,
}

/// Least-squares slope of `log values` against `log lambdas`.
pub fn loglog_slope(lambdas: &[f64], values: &[f64]) -> Result<LogLogFit> {
    if lambdas.len() != values.len() {
        return Err(Error::ShapeMismatch {
            expected: (lambdas.len(), 1),
            got: (values.len(), 1),
        });
    }
    if lambdas.iter().chain(values).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveValues);
    }
    let n = lambdas.len() as f64;
    let xs: Vec<f64> = lambdas.iter().map(|&l| ln(l)).collect();
    let ys: Vec<f64> = values.iter().map(|&v| ln(v)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let seg = segment_slopes(lambdas, values);
    let breakpoints = seg
        .windows(2)
        .enumerate()
        .filter(|(_, w)| abs(w[1] - w[0]) > BREAKPOINT_JUMP)
        .map(|(k, _)| k + 1)
        .collect();
    Ok(LogLogFit { slope, breakpoints })
}

/// `max |b − r·a| / max(r·a)`; zero iff `b = r·a`.
pub fn plan_proportionality(plan_a: &TransportPlan, plan_b: &TransportPlan, expected_ratio: f64) -> Result<f64> {
    let (a, b) = (plan_a.weights(), plan_b.weights());
    b.check_shape(a.shape())?;
    let scale = a.as_slice().iter().fold(0.0f64, |m, v| m.max(expected_ratio * v));
    let dev = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0f64, |m, (x, y)| m.max(abs(y - expected_ratio * x)));
    if scale == 0.0 {
        return Ok(if dev == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(dev / scale)
}

/// `|OT(λα, λβ) − λ OT(α, β) − ελ(λ−1)m² + ε λ m log λ|` for the standard
/// balanced problem.
pub fn closed_form_balanced_residual(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    cfg: &SolverConfig,
    lambda: f64,
) -> Result<f64> {
    let cfg = cfg.clone().with_model(Model::Standard);
    let div = MarginalDivergence::Balanced;
    let base = solver::transport_cost(alpha, beta, cost, &div, &cfg)?.value;
    let scaled = solver::transport_cost(&scale(alpha, lambda)?, &scale(beta, lambda)?, cost, &div, &cfg)?.value;
    let m = total_mass(alpha);
    let eps = cfg.epsilon;
    let rhs = lambda * base + eps * lambda * (lambda - 1.0) * m * m - eps * ln(lambda) * lambda * m;
    Ok(abs(scaled - rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Uniform in `[0, 1]²`.
    UnitSquare,
    /// Uniform in `{0 ≤ t1 < t2 ≤ 1}` (birth/death pairs).
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Uniform in `[0, 1]`.
    Uniform,
    Unit,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` random atoms from stream `stream` of the generator keyed by `seed`.
pub fn generate(n: usize, seed: u64, stream: u64, layout: Layout, weights: WeightKind) -> DiscreteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let p = match layout {
            Layout::UnitSquare => vec![unit_f64(&mut rng), unit_f64(&mut rng)],
            Layout::Triangle => loop {
                let (u, v) = (unit_f64(&mut rng), unit_f64(&mut rng));
                if u != v {
                    break vec![u.min(v), u.max(v)];
                }
            },
        };
        points.push(p);
    }
    let w = (0..n)
        .map(|_| match weights {
            WeightKind::Uniform => unit_f64(&mut rng),
            WeightKind::Unit => 1.0,
        })
        .collect();
    DiscreteMeasure::new(2, points, w).expect("generated atoms are valid")
}

/// `(α, β)` with `n` and `m` atoms drawn from streams 0 and 1 of `seed`.
pub fn random_instance(seed: u64, n: usize, m: usize, layout: Layout, weights: WeightKind) -> (DiscreteMeasure, DiscreteMeasure) {
    (generate(n, seed, 0, layout, weights), generate(m, seed, 1, layout, weights))
}
