//! Log-domain Sinkhorn fixed point shared by every model.
//!
//! A problem is described by two sides. Each side carries the reference
//! weights entering the dual objective, the log of the weights the *other*
//! potential is integrated against, and the rule turning a soft-min into a
//! potential value (`−aprox` or the boundary clamp).

use alloc::vec;
use alloc::vec::Vec;

use super::Model;
use crate::divergence::{self, MarginalDivergence};
use crate::math::{abs, exp, ln, log_sum_exp, sqrt};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone)]
pub(crate) enum Rule {
    Aprox(MarginalDivergence),
    /// Boundary transport: `f = min(c_Δ, −ε log c_Δ − p)`.
    Boundary(Vec<f64>),
}

#[derive(Debug, Clone)]
pub(crate) struct Side {
    pub(crate) weights: Vec<f64>,
    pub(crate) log_ref: Vec<f64>,
    pub(crate) mass: f64,
    pub(crate) rule: Rule,
}

impl Side {
    fn new(weights: Vec<f64>, rule: Rule) -> Self {
        let mass = weights.iter().sum();
        Side {
            log_ref: Vec::new(),
            weights,
            mass,
            rule,
        }
    }

    #[inline]
    fn potential(&self, i: usize, p: f64, eps: f64) -> f64 {
        match &self.rule {
            Rule::Aprox(div) => {
                // aprox never fails for the non-spatial kinds
                -divergence::aprox(div, eps, p).unwrap_or(f64::NAN)
            }
            Rule::Boundary(c) => {
                let ci = c[i];
                if ci == 0.0 {
                    0.0
                } else {
                    ci.min(-eps * ln(ci) - p)
                }
            }
        }
    }

    /// `Σ_i w_i · (−φ*(−f_i))`.
    fn dual_term(&self, f: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, (&w, &fi)) in self.weights.iter().zip(f).enumerate() {
            if w == 0.0 {
                continue;
            }
            acc += w * match &self.rule {
                Rule::Aprox(div) => divergence::neg_conj_neg(div, fi),
                Rule::Boundary(c) => (fi / c[i]).min(1.0),
            };
        }
        acc
    }

    fn divergence(&self, marginal: &[f64]) -> f64 {
        match &self.rule {
            Rule::Aprox(div) => divergence::divergence_on_weights(div, marginal, &self.weights, None),
            Rule::Boundary(c) => divergence::boundary_divergence(marginal, &self.weights, c),
        }
    }

    fn is_balanced(&self) -> bool {
        matches!(self.rule, Rule::Aprox(MarginalDivergence::Balanced))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    cost: Matrix,
    cost_t: Matrix,
    eps: f64,
    model: Model,
    a: Side,
    b: Side,
    /// added to `ln w_i + ln w_j` in the plan exponent
    log_plan_offset: f64,
    /// constant term `K` in `−ε (m(π) − K)`
    mass_const: f64,
}

/// Outcome of running the fixed point from some initialization.
pub(crate) struct Run {
    pub(crate) f: Vec<f64>,
    pub(crate) g: Vec<f64>,
    pub(crate) iterations: usize,
    pub(crate) converged: bool,
}

impl Problem {
    /// `a_rule`/`b_rule` decide the update; the weights are the reference
    /// measures (hat measures for boundary transport).
    pub(crate) fn new(
        cost: Matrix,
        a_weights: Vec<f64>,
        b_weights: Vec<f64>,
        a_rule: Rule,
        b_rule: Rule,
        model: Model,
        eps: f64,
    ) -> Result<Self> {
        cost.check_shape((a_weights.len(), b_weights.len()))?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive"));
        }
        let mut a = Side::new(a_weights, a_rule);
        let mut b = Side::new(b_weights, b_rule);
        if !(a.mass > 0.0 && b.mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        if a.is_balanced() && abs(a.mass - b.mass) > 1e-9 * a.mass {
            return Err(Error::Infeasible(a.mass, b.mass));
        }
        let (norm, log_plan_offset, mass_const) = match model {
            Model::Standard => (1.0, 0.0, a.mass * b.mass),
            Model::Homogeneous => {
                let mg = sqrt(a.mass * b.mass);
                (mg, -ln(mg), 0.5 * (a.mass + b.mass))
            }
        };
        a.log_ref = a.weights.iter().map(|w| ln(w / norm)).collect();
        b.log_ref = b.weights.iter().map(|w| ln(w / norm)).collect();
        let cost_t = cost.transpose();
        Ok(Problem {
            cost,
            cost_t,
            eps,
            model,
            a,
            b,
            log_plan_offset,
            mass_const,
        })
    }

    pub(crate) fn shape(&self) -> (usize, usize) {
        self.cost.shape()
    }

    pub(crate) fn is_balanced(&self) -> bool {
        self.a.is_balanced()
    }

    // ε · ln Σ_j exp((other_j − C_ij)/ε + log_ref_j)
    #[inline]
    fn soft_min(eps: f64, row: &[f64], other: &[f64], log_ref: &[f64]) -> f64 {
        let terms = row
            .iter()
            .zip(other)
            .zip(log_ref)
            .map(move |((&c, &o), &l)| (o - c) / eps + l);
        eps * log_sum_exp(terms)
    }

    /// New `f` from `g` (integrating against the second side).
    pub(crate) fn update_f(&self, g: &[f64], f_out: &mut [f64]) {
        for (i, out) in f_out.iter_mut().enumerate() {
            let p = Self::soft_min(self.eps, self.cost.row(i), g, &self.b.log_ref);
            *out = self.a.potential(i, p, self.eps);
        }
    }

    /// New `g` from `f` (integrating against the first side).
    pub(crate) fn update_g(&self, f: &[f64], g_out: &mut [f64]) {
        for (j, out) in g_out.iter_mut().enumerate() {
            let p = Self::soft_min(self.eps, self.cost_t.row(j), f, &self.a.log_ref);
            *out = self.b.potential(j, p, self.eps);
        }
    }

    /// One full alternating sweep; returns the sup-norm change.
    pub(crate) fn step(&self, f: &mut Vec<f64>, g: &mut Vec<f64>, scratch: &mut (Vec<f64>, Vec<f64>)) -> f64 {
        let (nf, ng) = scratch;
        self.update_f(g, nf);
        self.update_g(nf, ng);
        let df = sup_diff(f, nf);
        let dg = sup_diff(g, ng);
        core::mem::swap(f, nf);
        core::mem::swap(g, ng);
        df.max(dg)
    }

    pub(crate) fn run(&self, f0: Vec<f64>, g0: Vec<f64>, tol: f64, max_iter: usize) -> Run {
        let (n, m) = self.shape();
        let (mut f, mut g) = (f0, g0);
        let mut scratch = (vec![0.0; n], vec![0.0; m]);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            let delta = self.step(&mut f, &mut g, &mut scratch);
            iterations += 1;
            if !delta.is_finite() {
                break;
            }
            if delta < tol {
                converged = true;
                break;
            }
        }
        Run {
            f,
            g,
            iterations,
            converged,
        }
    }

    /// Symmetric problem `(α, α)`: damped iteration `f ← ½(f + T(f))`.
    pub(crate) fn run_symmetric(&self, f0: Vec<f64>, tol: f64, max_iter: usize) -> Run {
        let n = self.shape().0;
        let mut f = f0;
        let mut t = vec![0.0; n];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            self.update_f(&f, &mut t);
            let mut delta: f64 = 0.0;
            for (fi, ti) in f.iter_mut().zip(&t) {
                let next = 0.5 * (*fi + ti);
                delta = delta.max(abs(next - *fi));
                *fi = next;
            }
            iterations += 1;
            if !delta.is_finite() {
                break;
            }
            if delta < tol {
                converged = true;
                break;
            }
        }
        Run {
            g: f.clone(),
            f,
            iterations,
            converged,
        }
    }

    #[inline]
    fn log_plan(&self, i: usize, j: usize, f: f64, g: f64) -> f64 {
        (f + g - self.cost.get(i, j)) / self.eps
            + ln(self.a.weights[i])
            + ln(self.b.weights[j])
            + self.log_plan_offset
    }

    /// `exp((f⊕g − c)/ε) · ref`, with `ref = α⊗β` or `α⊗β / m_g`.
    pub(crate) fn plan(&self, f: &[f64], g: &[f64]) -> Matrix {
        let (n, m) = self.shape();
        Matrix::from_fn(n, m, |i, j| {
            if self.a.weights[i] == 0.0 || self.b.weights[j] == 0.0 {
                0.0
            } else {
                exp(self.log_plan(i, j, f[i], g[j]))
            }
        })
    }

    pub(crate) fn dual(&self, f: &[f64], g: &[f64]) -> f64 {
        let mass = self.plan(f, g).sum();
        self.a.dual_term(f) + self.b.dual_term(g) - self.eps * (mass - self.mass_const)
    }

    pub(crate) fn primal(&self, plan: &Matrix) -> f64 {
        let transport: f64 = plan
            .as_slice()
            .iter()
            .zip(self.cost.as_slice())
            .map(|(p, c)| p * c)
            .sum();
        let d1 = self.a.divergence(&plan.row_sums());
        let d2 = self.b.divergence(&plan.col_sums());
        let reg = match self.model {
            Model::Standard => {
                let reference = Matrix::from_fn(plan.rows(), plan.cols(), |i, j| {
                    self.a.weights[i] * self.b.weights[j]
                });
                divergence::kl_matrix(plan.as_slice(), reference.as_slice())
            }
            Model::Homogeneous => divergence::r_on_weights(plan, &self.a.weights, &self.b.weights)
                .unwrap_or(f64::INFINITY),
        };
        transport + d1 + d2 + self.eps * reg
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc: f64, (x, y)| {
        let d = abs(x - y);
        if d.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(d)
        }
    })
}
