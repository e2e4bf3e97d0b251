//! Sinkhorn solvers for the standard and the homogeneous model, plan
//! recovery, objectives, transport costs and Sinkhorn divergences.

mod engine;

use alloc::vec;
use alloc::vec::Vec;

use crate::divergence::MarginalDivergence;
use crate::kernel::{cost_matrix, CostSpec};
use crate::measure::{total_mass, DiscreteMeasure};
use crate::otb;
use crate::{Error, Matrix, Result};

pub(crate) use engine::{Problem, Rule};

/// Which reference measure the entropic term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `ε KL(π | α⊗β)`.
    Standard,
    /// `ε R(π | α, β)`, equivalently the standard solver on `(α, β)/m_g`.
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Zeros,
    Warm(Potentials),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub model: Model,
    /// Sup-norm change of the potentials below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
}

impl SolverConfig {
    /// Defaults: `tol = 1e-9`, `max_iter = 10000`, zero initialization.
    pub fn new(epsilon: f64, model: Model) -> Self {
        SolverConfig {
            epsilon,
            model,
            tol: 1e-9,
            max_iter: 10_000,
            init: Init::Zeros,
        }
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Non-negative plan with cached marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    weights: Matrix,
    marginal_1: Vec<f64>,
    marginal_2: Vec<f64>,
}

impl TransportPlan {
    pub fn new(weights: Matrix) -> Result<Self> {
        if weights.as_slice().iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidMeasure("plan entries must be finite and non-negative"));
        }
        Ok(TransportPlan {
            marginal_1: weights.row_sums(),
            marginal_2: weights.col_sums(),
            weights,
        })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn marginal_1(&self) -> &[f64] {
        &self.marginal_1
    }

    pub fn marginal_2(&self) -> &[f64] {
        &self.marginal_2
    }

    pub fn mass(&self) -> f64 {
        self.marginal_1.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub potentials: Potentials,
    pub plan: TransportPlan,
    pub dual_value: f64,
    pub primal_value: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveResult {
    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged(self.iterations))
        }
    }
}

/// A scalar value together with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricResult {
    pub f: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Builds the engine problem for any divergence kind. For the spatial kind
/// the measures are replaced by their hat measures and the domain's ground
/// cost is used.
pub(crate) fn build_problem(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    model: Model,
    epsilon: f64,
) -> Result<Problem> {
    match div {
        MarginalDivergence::OtbSpatial(domain) => {
            let c = cost_matrix(&domain.cost_spec(), alpha, beta)?;
            let ha = otb::hat_weights(domain, alpha)?;
            let hb = otb::hat_weights(domain, beta)?;
            Problem::new(
                c,
                ha.hat,
                hb.hat,
                Rule::Boundary(ha.costs),
                Rule::Boundary(hb.costs),
                model,
                epsilon,
            )
        }
        _ => {
            let c = cost_matrix(cost, alpha, beta)?;
            Problem::new(
                c,
                alpha.weights().to_vec(),
                beta.weights().to_vec(),
                Rule::Aprox(div.clone()),
                Rule::Aprox(div.clone()),
                model,
                epsilon,
            )
        }
    }
}

fn initial(init: &Init, n: usize, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    match init {
        Init::Zeros => Ok((vec![0.0; n], vec![0.0; m])),
        Init::Warm(p) => {
            if p.f.len() != n || p.g.len() != m {
                return Err(Error::ShapeMismatch {
                    expected: (n, m),
                    got: (p.f.len(), p.g.len()),
                });
            }
            Ok((p.f.clone(), p.g.clone()))
        }
    }
}

fn finish(problem: &Problem, run: engine::Run) -> Result<SolveResult> {
    let engine::Run {
        mut f,
        mut g,
        iterations,
        converged,
    } = run;
    if problem.is_balanced() && !f.is_empty() {
        let shift = f.iter().sum::<f64>() / f.len() as f64;
        f.iter_mut().for_each(|v| *v -= shift);
        g.iter_mut().for_each(|v| *v += shift);
    }
    let plan = problem.plan(&f, &g);
    let dual_value = problem.dual(&f, &g);
    let primal_value = problem.primal(&plan);
    Ok(SolveResult {
        potentials: Potentials { f, g },
        plan: TransportPlan::new(plan)?,
        dual_value,
        primal_value,
        duality_gap: primal_value - dual_value,
        iterations,
        converged,
    })
}

fn solve_model(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
    model: Model,
) -> Result<SolveResult> {
    cfg.validate()?;
    let problem = build_problem(alpha, beta, cost, div, model, cfg.epsilon)?;
    let (n, m) = problem.shape();
    let (f0, g0) = initial(&cfg.init, n, m)?;
    let run = problem.run(f0, g0, cfg.tol, cfg.max_iter);
    finish(&problem, run)
}

/// Standard unbalanced Sinkhorn (`cfg.model` is ignored).
pub fn sinkhorn_standard(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    solve_model(alpha, beta, cost, div, cfg, Model::Standard)
}

/// Homogeneous Sinkhorn: the standard iteration on `(α, β)/m_g`, with the
/// plan `exp((f⊕g − c)/ε) α⊗β/m_g` (`cfg.model` is ignored).
pub fn sinkhorn_homogeneous(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    if let MarginalDivergence::OtbSpatial(_) = div {
        return Err(Error::UnsupportedKind);
    }
    solve_model(alpha, beta, cost, div, cfg, Model::Homogeneous)
}

/// Solves with the model named in `cfg`. The spatial kind runs boundary
/// transport with the domain's own ground cost.
pub fn solve(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    solve_model(alpha, beta, cost, div, cfg, cfg.model)
}

/// The first `count` iterates `(f_t, g_t)`, `t = 1..=count`, without
/// stopping or recentering.
pub fn sinkhorn_iterates(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
    count: usize,
) -> Result<Vec<Potentials>> {
    cfg.validate()?;
    let problem = build_problem(alpha, beta, cost, div, cfg.model, cfg.epsilon)?;
    let (n, m) = problem.shape();
    let (mut f, mut g) = initial(&cfg.init, n, m)?;
    let mut scratch = (vec![0.0; n], vec![0.0; m]);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        problem.step(&mut f, &mut g, &mut scratch);
        out.push(Potentials {
            f: f.clone(),
            g: g.clone(),
        });
    }
    Ok(out)
}

/// Self-transport `OT(α, α)` through the averaged symmetric iteration.
/// The value is the dual objective of the problem `(α, α)` at `(f, f)`.
pub fn sinkhorn_symmetric(
    alpha: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<SymmetricResult> {
    cfg.validate()?;
    let problem = build_problem(alpha, alpha, cost, div, cfg.model, cfg.epsilon)?;
    let n = problem.shape().0;
    let f0 = match &cfg.init {
        Init::Zeros => vec![0.0; n],
        Init::Warm(p) => {
            if p.f.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    got: (p.f.len(), p.g.len()),
                });
            }
            p.f.clone()
        }
    };
    let run = problem.run_symmetric(f0, cfg.tol, cfg.max_iter);
    let value = problem.dual(&run.f, &run.g);
    Ok(SymmetricResult {
        f: run.f,
        value,
        iterations: run.iterations,
        converged: run.converged,
    })
}

/// Masses entering the null-measure conventions and the mass bias: total
/// masses, or total persistence for the spatial kind.
fn effective_masses(alpha: &DiscreteMeasure, beta: &DiscreteMeasure, div: &MarginalDivergence) -> Result<(f64, f64)> {
    match div {
        MarginalDivergence::OtbSpatial(domain) => Ok((
            otb::total_persistence(domain, alpha)?,
            otb::total_persistence(domain, beta)?,
        )),
        _ => Ok((total_mass(alpha), total_mass(beta))),
    }
}

/// Optimal dual value of the model in `cfg`. When a measure has zero mass the
/// null conventions apply: `OT(0, 0) = 0`, and `OT(0, β)` is `φ(0) m(β)` for
/// the standard model, `(φ(0) + ε/2) m(β)` for the homogeneous one.
pub fn transport_cost(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let (ma, mb) = effective_masses(alpha, beta, div)?;
    if ma == 0.0 || mb == 0.0 {
        return null_cost(ma + mb, div, cfg).map(|value| Estimate {
            value,
            iterations: 0,
            converged: true,
        });
    }
    let r = solve(alpha, beta, cost, div, cfg)?;
    Ok(Estimate {
        value: r.dual_value,
        iterations: r.iterations,
        converged: r.converged,
    })
}

fn null_cost(other: f64, div: &MarginalDivergence, cfg: &SolverConfig) -> Result<f64> {
    if other == 0.0 {
        return Ok(0.0);
    }
    if let MarginalDivergence::Balanced = div {
        return Err(Error::Infeasible(0.0, other));
    }
    let per_unit = match cfg.model {
        Model::Standard => div.phi_at_zero(),
        Model::Homogeneous => div.phi_at_zero() + 0.5 * cfg.epsilon,
    };
    Ok(per_unit * other)
}

fn self_cost(mu: &DiscreteMeasure, mass: f64, cost: &CostSpec, div: &MarginalDivergence, cfg: &SolverConfig) -> Result<Estimate> {
    if mass == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let s = sinkhorn_symmetric(mu, cost, div, cfg)?;
    Ok(Estimate {
        value: s.value,
        iterations: s.iterations,
        converged: s.converged,
    })
}

/// `OT(α, β) − ½ OT(α, α) − ½ OT(β, β)`, plus the mass bias
/// `(ε/2)(m(α) − m(β))²` in the standard model only.
pub fn sinkhorn_divergence(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<Estimate> {
    let cross = transport_cost(alpha, beta, cost, div, cfg)?;
    let (ma, mb) = effective_masses(alpha, beta, div)?;
    let aa = self_cost(alpha, ma, cost, div, cfg)?;
    let bb = self_cost(beta, mb, cost, div, cfg)?;
    let mut value = cross.value - 0.5 * aa.value - 0.5 * bb.value;
    if cfg.model == Model::Standard {
        value += 0.5 * cfg.epsilon * (ma - mb) * (ma - mb);
    }
    Ok(Estimate {
        value,
        iterations: cross.iterations.max(aa.iterations).max(bb.iterations),
        converged: cross.converged && aa.converged && bb.converged,
    })
}

/// Dual objective of the model in `cfg` at arbitrary potentials.
pub fn dual_objective(
    potentials: &Potentials,
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<f64> {
    cfg.validate()?;
    let problem = build_problem(alpha, beta, cost, div, cfg.model, cfg.epsilon)?;
    let (n, m) = problem.shape();
    if potentials.f.len() != n || potentials.g.len() != m {
        return Err(Error::ShapeMismatch {
            expected: (n, m),
            got: (potentials.f.len(), potentials.g.len()),
        });
    }
    Ok(problem.dual(&potentials.f, &potentials.g))
}

/// Primal objective `⟨c, π⟩ + D(π₁|α) + D(π₂|β) + ε·(KL or R)`.
pub fn primal_objective(
    plan: &TransportPlan,
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
) -> Result<f64> {
    cfg.validate()?;
    let problem = build_problem(alpha, beta, cost, div, cfg.model, cfg.epsilon)?;
    plan.weights().check_shape(problem.shape())?;
    Ok(problem.primal(plan.weights()))
}
