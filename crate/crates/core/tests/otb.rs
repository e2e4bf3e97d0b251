mod common;

use common::*;
use hurot_core::measure::scale;
use hurot_core::otb::*;
use hurot_core::solver::{dual_objective, primal_objective};
use hurot_core::{DiscreteMeasure, Error, MarginalDivergence, Model, SolverConfig};

fn hp() -> BoundaryDomain {
    BoundaryDomain::half_plane()
}

fn diagram(points: &[[f64; 2]]) -> DiscreteMeasure {
    DiscreteMeasure::uniform_unit(2, points.iter().map(|p| p.to_vec()).collect()).unwrap()
}

fn cfg(eps: f64) -> SolverConfig {
    SolverConfig::new(eps, Model::Homogeneous)
}

#[test]
fn boundary_geometry_examples() {
    let d = hp();
    assert_eq!(d.boundary_cost(&[0.0, 2.0]).unwrap(), 2.0);
    assert_eq!(d.project(&[0.0, 2.0]).unwrap(), vec![1.0, 1.0]);
    assert_eq!(d.boundary_cost(&[1.0, 1.0]).unwrap(), 0.0);
    assert_eq!(d.boundary_cost(&[2.0, 1.0]), Err(Error::OutsideDomain(0)));
    assert_eq!(d.boundary_cost(&[2.0]), Err(Error::DimMismatch(2, 1)));

    let e = BoundaryDomain::new(DomainKind::HalfPlane, GroundCost::Euclidean).unwrap();
    assert!((e.boundary_cost(&[0.0, 2.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);

    let b = BoundaryDomain::new(DomainKind::Box(vec![(0.0, 1.0), (0.0, 1.0)]), GroundCost::SqEuclidean).unwrap();
    assert_eq!(b.boundary_cost(&[0.5, 0.3]).unwrap(), 0.3 * 0.3);
    assert_eq!(b.project(&[0.5, 0.3]).unwrap(), vec![0.5, 0.0]);
    assert_eq!(b.project(&[0.9, 0.5]).unwrap(), vec![1.0, 0.5]);
    assert_eq!(b.boundary_cost(&[1.5, 0.5]), Err(Error::OutsideDomain(0)));
    assert!(BoundaryDomain::new(DomainKind::Box(vec![(1.0, 0.0)]), GroundCost::SqEuclidean).is_err());
}

#[test]
fn projection_attains_the_boundary_cost() {
    let (a, _) = diagrams(1, 8, 1);
    let d = hp();
    for x in a.points() {
        let p = d.project(x).unwrap();
        assert!((sq(x, &p) - d.boundary_cost(x).unwrap()).abs() < 1e-15);
        assert_eq!(d.boundary_cost(&p).unwrap(), 0.0);
    }
}

#[test]
fn hat_measure_and_persistence() {
    let d = hp();
    let mu = diagram(&[[0.0, 2.0], [1.0, 1.0]]);
    let h = hat_measure(&d, &mu).unwrap();
    assert_eq!(h.measure.weights(), &[2.0, 0.0]);
    assert_eq!(h.boundary_atoms, vec![1]);
    assert_eq!(total_persistence(&d, &mu).unwrap(), 2.0);
    assert_eq!(total_persistence(&d, &DiscreteMeasure::empty(2).unwrap()).unwrap(), 0.0);

    let (a, _) = diagrams(2, 5, 1);
    let l = scale(&a, 3.5).unwrap();
    let ha = hat_measure(&d, &a).unwrap().measure;
    let hl = hat_measure(&d, &l).unwrap().measure;
    for (x, y) in ha.weights().iter().zip(hl.weights()) {
        assert!((3.5 * x - y).abs() <= 1e-15 * y);
    }
    let p = total_persistence(&d, &a).unwrap();
    assert!(rel(total_persistence(&d, &l).unwrap(), 3.5 * p) < 1e-15);

    let outside = diagram(&[[0.0, 1.0], [3.0, 1.0]]);
    assert_eq!(hat_measure(&d, &outside).unwrap_err(), Error::OutsideDomain(1));
}

#[test]
fn erasing_into_the_boundary() {
    let beta = diagram(&[[0.0, 2.0]]);
    let empty = DiscreteMeasure::empty(2).unwrap();
    let v = rotb_cost(&empty, &beta, &hp(), &cfg(1.0)).unwrap().value;
    assert_eq!(v, 3.0);
    assert_eq!(rotb_cost(&empty, &empty, &hp(), &cfg(1.0)).unwrap().value, 0.0);
    // a diagram sitting on the diagonal has no persistence either
    let flat = diagram(&[[0.5, 0.5]]);
    assert_eq!(rotb_cost(&flat, &beta, &hp(), &cfg(0.5)).unwrap().value, 1.25 * 2.0);
}

#[test]
fn rotb_is_scale_free() {
    let (a, b) = diagrams(3, 5, 6);
    let d = hp();
    let base = rotb_solve(&a, &b, &d, &cfg(1.0)).unwrap();
    assert!(base.converged);
    for lambda in [0.01, 100.0] {
        let r = rotb_solve(&scale(&a, lambda).unwrap(), &scale(&b, lambda).unwrap(), &d, &cfg(1.0)).unwrap();
        assert!(max_abs_diff(&base.potentials.f, &r.potentials.f) < 1e-12);
        assert!(max_abs_diff(&base.potentials.g, &r.potentials.g) < 1e-12);
        for (x, y) in base.plan.weights().as_slice().iter().zip(r.plan.weights().as_slice()) {
            assert!((lambda * x - y).abs() <= 1e-10 * lambda * x);
        }
        assert!(rel(r.dual_value, lambda * base.dual_value) < 1e-9);
    }
}

#[test]
fn rotb_duality_gap() {
    let d = hp();
    let div = MarginalDivergence::OtbSpatial(d.clone());
    for seed in 0..4 {
        let (a, b) = diagrams(40 + seed, 5, 7);
        for model in [Model::Homogeneous, Model::Standard] {
            let c = SolverConfig::new(0.5, model);
            let r = rotb_solve(&a, &b, &d, &c).unwrap();
            assert!(r.converged);
            let p = primal_objective(&r.plan, &a, &b, &d.cost_spec(), &div, &c).unwrap();
            let j = dual_objective(&r.potentials, &a, &b, &d.cost_spec(), &div, &c).unwrap();
            assert!((p - j).abs() < 1e-6 * (1.0 + j.abs()), "{model:?}: {p} vs {j}");
            // potentials never exceed the boundary cost
            for (f, x) in r.potentials.f.iter().zip(a.points()) {
                assert!(*f <= d.boundary_cost(x).unwrap());
            }
        }
    }
}

#[test]
fn rotb_sinkhorn_divergence_properties() {
    let d = hp();
    let (a, b) = diagrams(5, 5, 10);
    // the residual is driven by the stopping tolerance
    let aa = rotb_sinkhorn_divergence(&a, &a, &d, &cfg(1.0)).unwrap().value;
    assert!(aa.abs() < 1e-8);
    let aa = rotb_sinkhorn_divergence(&a, &a, &d, &cfg(1.0).with_tol(1e-13)).unwrap().value;
    assert!(aa.abs() < 1e-11);
    let ab = rotb_sinkhorn_divergence(&a, &b, &d, &cfg(1.0)).unwrap().value;
    assert!(ab > 1e-3);
    for lambda in [0.01, 0.1, 10.0, 100.0] {
        let v = rotb_sinkhorn_divergence(&scale(&a, lambda).unwrap(), &scale(&b, lambda).unwrap(), &d, &cfg(1.0))
            .unwrap()
            .value;
        assert!(rel(v, lambda * ab) < 1e-9);
    }
}

#[test]
fn boundary_atoms_are_ignored() {
    let d = hp();
    let (a, b) = diagrams(6, 4, 5);
    let base = rotb_cost(&a, &b, &d, &cfg(1.0)).unwrap().value;
    let mut pts: Vec<Vec<f64>> = a.points().map(|p| p.to_vec()).collect();
    pts.push(vec![0.3, 0.3 + 1e-7]);
    let padded = DiscreteMeasure::uniform_unit(2, pts).unwrap();
    let v = rotb_cost(&padded, &b, &d, &cfg(1.0)).unwrap().value;
    assert!((v - base).abs() < 1e-9);
}

#[test]
fn exact_fg_examples() {
    let d = hp();
    let (a, _) = diagrams(7, 4, 1);
    let empty = DiscreteMeasure::empty(2).unwrap();
    let r = fg_exact(&a, &empty, &d).unwrap();
    assert!(rel(r.cost, total_persistence(&d, &a).unwrap()) < 1e-14);
    assert_eq!(r.matching.unwrap().len(), 4);
    assert_eq!(fg_exact(&a, &a, &d).unwrap().cost, 0.0);

    // near pair matched, far pair sent to the diagonal
    for (x, y) in [([0.0, 1.0], [0.1, 1.1]), ([0.0, 1.0], [3.0, 3.5])] {
        let r = fg_exact(&diagram(&[x]), &diagram(&[y]), &d).unwrap();
        let expected = sq(&x, &y).min(d.boundary_cost(&x).unwrap() + d.boundary_cost(&y).unwrap());
        assert!((r.cost - expected).abs() < 1e-15);
    }
}

// Every admissible partial matching, by recursion over the atoms of α.
fn enumerate(a: &[Vec<f64>], b: &[Vec<f64>], d: &BoundaryDomain) -> f64 {
    fn go(i: usize, used: &mut Vec<bool>, a: &[Vec<f64>], b: &[Vec<f64>], d: &BoundaryDomain) -> f64 {
        if i == a.len() {
            return b
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(y, _)| d.boundary_cost(y).unwrap())
                .sum();
        }
        let mut best = d.boundary_cost(&a[i]).unwrap() + go(i + 1, used, a, b, d);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(sq(&a[i], &b[j]) + go(i + 1, used, a, b, d));
                used[j] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; b.len()], a, b, d)
}

#[test]
fn exact_fg_matches_enumeration() {
    let d = hp();
    for seed in 0..30 {
        for (n, m) in [(1, 1), (2, 3), (3, 2), (3, 3), (0, 2)] {
            let (a, b) = diagrams(seed, n, m);
            let pa: Vec<Vec<f64>> = a.points().map(|p| p.to_vec()).collect();
            let pb: Vec<Vec<f64>> = b.points().map(|p| p.to_vec()).collect();
            let r = fg_exact(&a, &b, &d).unwrap();
            assert!((r.cost - enumerate(&pa, &pb, &d)).abs() < 1e-12);
        }
    }
}

#[test]
fn general_weights_use_flow() {
    let d = hp();
    for seed in 0..10 {
        let (a, b) = diagrams(seed, 3, 4);
        let unit = fg_exact(&a, &b, &d).unwrap();
        let doubled = fg_exact(&scale(&a, 2.0).unwrap(), &scale(&b, 2.0).unwrap(), &d).unwrap();
        assert!(doubled.matching.is_none());
        assert!((doubled.cost - 2.0 * unit.cost).abs() < 1e-8);
    }
}

#[test]
fn small_epsilon_approaches_the_exact_value() {
    let d = hp();
    for seed in 0..4 {
        let (a, b) = diagrams(60 + seed, 3, 4);
        let exact = fg_exact(&a, &b, &d).unwrap().cost;
        let c = cfg(1e-3).with_max_iter(100_000);
        let v = rotb_cost(&a, &b, &d, &c).unwrap().value;
        assert!((v - exact).abs() < 5e-2 * (1.0 + exact));
    }
}
