mod common;

use common::*;
use hurot_core::experiments::*;
use hurot_core::measure::{scale, total_mass};
use hurot_core::otb::BoundaryDomain;
use hurot_core::solver::solve;
use hurot_core::{CostSpec, Error, MarginalDivergence as Div, Matrix, Model, SolverConfig, TransportPlan};

const SQ: CostSpec = CostSpec::SqEuclidean;

fn spec(min: f64, max: f64, n: usize, metric: Metric, model: Model) -> SweepSpec {
    SweepSpec {
        lambda_min: min,
        lambda_max: max,
        num_points: n,
        scale: GridScale::Log,
        metric,
        model,
        seed: 0,
    }
}

#[test]
fn generator_is_deterministic() {
    let a = generate(6, 7, 0, Layout::UnitSquare, WeightKind::Uniform);
    assert_eq!(a, generate(6, 7, 0, Layout::UnitSquare, WeightKind::Uniform));
    assert_ne!(a, generate(6, 8, 0, Layout::UnitSquare, WeightKind::Uniform));
    assert_ne!(a, generate(6, 7, 1, Layout::UnitSquare, WeightKind::Uniform));
    assert!(a.points().flatten().all(|c| (0.0..1.0).contains(c)));
    assert!(a.weights().iter().all(|w| (0.0..1.0).contains(w)));
    let t = generate(50, 3, 0, Layout::Triangle, WeightKind::Unit);
    assert!(t.points().all(|p| 0.0 <= p[0] && p[0] < p[1] && p[1] <= 1.0));
    assert!(t.weights().iter().all(|w| *w == 1.0));
    assert!(generate(0, 1, 0, Layout::UnitSquare, WeightKind::Unit).is_empty());
}

#[test]
fn grids() {
    let g = spec(0.01, 100.0, 5, Metric::Cost, Model::Homogeneous).grid().unwrap();
    let expected = [0.01, 0.1, 1.0, 10.0, 100.0];
    for (x, y) in g.iter().zip(expected) {
        assert!(rel(*x, y) < 1e-14);
    }
    let mut lin = spec(1.0, 3.0, 3, Metric::Cost, Model::Standard);
    lin.scale = GridScale::Linear;
    assert_eq!(lin.grid().unwrap(), vec![1.0, 2.0, 3.0]);
    assert_eq!(spec(1.0, 1.0, 1, Metric::Cost, Model::Standard).grid().unwrap(), vec![1.0]);
    assert!(spec(2.0, 1.0, 3, Metric::Cost, Model::Standard).grid().is_err());
    assert!(spec(0.0, 1.0, 3, Metric::Cost, Model::Standard).grid().is_err());
    assert!(spec(1.0, 2.0, 1, Metric::Cost, Model::Standard).grid().is_err());
}

#[test]
fn slope_of_a_power_law() {
    let lambdas: Vec<f64> = (0..10).map(|k| 1.5f64.powi(k)).collect();
    let values: Vec<f64> = lambdas.iter().map(|l| 3.0 * l.powf(1.7)).collect();
    let fit = loglog_slope(&lambdas, &values).unwrap();
    assert!((fit.slope - 1.7).abs() < 1e-12);
    assert!(fit.breakpoints.is_empty());
}

#[test]
fn slope_break_is_located() {
    // slope 1 up to λ = 8, then slope 2
    let lambdas: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
    let values: Vec<f64> = lambdas.iter().map(|&l| if l <= 8.0 { l } else { l * l / 8.0 }).collect();
    let fit = loglog_slope(&lambdas, &values).unwrap();
    assert_eq!(fit.breakpoints, vec![3]);
    assert_eq!(loglog_slope(&[1.0, 2.0], &[1.0, 0.0]).unwrap_err(), Error::NonPositiveValues);
    assert_eq!(loglog_slope(&[-1.0, 2.0], &[1.0, 1.0]).unwrap_err(), Error::NonPositiveValues);
}

#[test]
fn proportionality() {
    let a = TransportPlan::new(Matrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.0]]).unwrap()).unwrap();
    let b = TransportPlan::new(a.weights().map(|v| 2.0 * v)).unwrap();
    assert_eq!(plan_proportionality(&a, &b, 2.0).unwrap(), 0.0);
    // one entry off by 0.4 against a largest scaled entry of 4
    let c = TransportPlan::new(Matrix::from_rows(&[vec![2.0, 4.0], vec![1.4, 0.0]]).unwrap()).unwrap();
    assert!((plan_proportionality(&a, &c, 2.0).unwrap() - 0.1).abs() < 1e-15);
    let d = TransportPlan::new(Matrix::zeros(1, 2)).unwrap();
    assert!(matches!(plan_proportionality(&a, &d, 1.0), Err(Error::ShapeMismatch { .. })));
}

#[test]
fn kl_plans_scale_with_the_predicted_power() {
    let (a, b) = instance(2, 5, 7);
    let cfg = SolverConfig::new(1.0, Model::Standard);
    let kl = Div::kl(1.0).unwrap();
    let base = solve(&a, &b, &SQ, &kl, &cfg).unwrap();
    let r = solve(&scale(&a, 10.0).unwrap(), &scale(&b, 10.0).unwrap(), &SQ, &kl, &cfg).unwrap();
    let dev = plan_proportionality(&base.plan, &r.plan, 10f64.powf(4.0 / 3.0)).unwrap();
    assert!(dev < 1e-6);
}

#[test]
fn closed_form_residual() {
    let (a, b) = instance(3, 4, 4);
    let b = with_mass(&b, total_mass(&a));
    let cfg = SolverConfig::new(1.0, Model::Standard);
    assert_eq!(closed_form_balanced_residual(&a, &b, &SQ, &cfg, 1.0).unwrap(), 0.0);
    for lambda in [0.5, 2.0, 10.0] {
        assert!(closed_form_balanced_residual(&a, &b, &SQ, &cfg, lambda).unwrap() < 1e-7);
    }
    let c = with_mass(&b, 2.0 * total_mass(&a));
    assert!(matches!(
        closed_form_balanced_residual(&a, &c, &SQ, &cfg, 2.0),
        Err(Error::Infeasible(..))
    ));
}

#[test]
fn homogeneous_sweeps_are_linear() {
    let (a, b) = instance(4, 5, 6);
    let cfg = SolverConfig::new(1.0, Model::Standard);
    for div in [Div::Tv, Div::kl(1.0).unwrap()] {
        for metric in [Metric::Cost, Metric::SinkhornDiv] {
            let r = lambda_sweep(&a, &b, &SQ, &div, &cfg, &spec(0.01, 100.0, 9, metric, Model::Homogeneous)).unwrap();
            let ratio0 = r.values[0] / r.lambdas[0];
            for (l, v) in r.lambdas.iter().zip(&r.values) {
                assert!(rel(v / l, ratio0) < 1e-9);
            }
            assert!(r.iterations.iter().all(|&i| i == r.iterations[0]));
            assert!(r.slopes.iter().all(|s| (s - 1.0).abs() < 1e-6));
            assert!(r.converged.iter().all(|c| *c));
        }
    }
}

#[test]
fn standard_balanced_divergence_sweep_is_linear() {
    let (a, b) = instance(5, 4, 5);
    let b = with_mass(&b, total_mass(&a));
    let cfg = SolverConfig::new(1.0, Model::Standard);
    let r = lambda_sweep(&a, &b, &SQ, &Div::Balanced, &cfg, &spec(0.1, 10.0, 5, Metric::SinkhornDiv, Model::Standard))
        .unwrap();
    for (l, v) in r.lambdas.iter().zip(&r.values) {
        assert!(rel(*v, l * r.values[0] / r.lambdas[0]) < 1e-8);
    }
}

#[test]
fn tv_sweep_is_not_homogeneous() {
    let (a, b) = instance(10, 5, 7);
    let cfg = SolverConfig::new(1.0, Model::Standard);
    let r = lambda_sweep(&a, &b, &SQ, &Div::Tv, &cfg, &spec(1.0, 100.0, 20, Metric::SinkhornDiv, Model::Standard)).unwrap();
    let ratio = r.values[19] / (100.0 * r.values[0]);
    assert!((ratio - 1.0).abs() > 0.05);
    let fit = loglog_slope(&r.lambdas, &r.values).unwrap();
    assert!(fit.breakpoints.iter().any(|&k| (2.0..=3.0).contains(&r.lambdas[k].ln())));
    let (first, last) = (&r.plan_snapshots[0], &r.plan_snapshots[1]);
    assert_eq!((first.0, last.0), (1.0, 100.0));
    assert!(plan_proportionality(&first.1, &last.1, 100.0).unwrap() > 0.05);
}

#[test]
fn sweeps_are_reproducible_and_keep_order() {
    let (a, b) = diagrams(6, 4, 5);
    let div = Div::OtbSpatial(BoundaryDomain::half_plane());
    let cfg = SolverConfig::new(1.0, Model::Homogeneous);
    let s = spec(0.01, 100.0, 6, Metric::SinkhornDiv, Model::Homogeneous);
    let r1 = lambda_sweep(&a, &b, &SQ, &div, &cfg, &s).unwrap();
    let r2 = lambda_sweep(&a, &b, &SQ, &div, &cfg, &s).unwrap();
    assert_eq!(r1, r2);
    assert!(r1.lambdas.windows(2).all(|w| w[0] < w[1]));
    let fit = loglog_slope(&r1.lambdas, &r1.values).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-6);
    assert!(fit.breakpoints.is_empty());
}

#[test]
fn single_point_sweep() {
    let (a, b) = instance(7, 3, 3);
    let cfg = SolverConfig::new(1.0, Model::Homogeneous);
    let r = lambda_sweep(&a, &b, &SQ, &Div::Tv, &cfg, &spec(1.0, 1.0, 1, Metric::Cost, Model::Homogeneous)).unwrap();
    assert_eq!(r.values.len(), 1);
    assert_eq!(r.values[0], solve(&a, &b, &SQ, &Div::Tv, &cfg).unwrap().dual_value);
    assert!(r.slopes[0].is_nan());
    assert_eq!(r.plan_snapshots.len(), 1);
}
