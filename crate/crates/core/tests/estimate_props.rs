mod common;

use std::collections::BTreeMap;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use uvnet::estimate::{
    normalize_factor, point_estimate_gaussian, point_estimate_lp, posterior_set, verify_map_equivalence,
    EstimateProblem, EstimateStatus, GaussianFactor, GaussianProblem,
};
use uvnet::geometry::{HPolytope, Region, Verdict};
use uvnet::network::{Dag, UncertaintyNetwork};
use uvnet::uncertainty::VariableSignature;

fn dims(net: &UncertaintyNetwork) -> BTreeMap<usize, usize> {
    net.variables().iter().map(|(&i, s)| (i, s.dim)).collect()
}

/// Value of every node at the estimate: evidence or `x̂`.
fn assignment(p: &EstimateProblem, x_hat: &BTreeMap<usize, Vec<f64>>) -> BTreeMap<usize, Vec<f64>> {
    let mut all: BTreeMap<usize, Vec<f64>> = p.evidence.iter().cloned().collect();
    all.extend(x_hat.clone());
    all
}

/// `max_row a·(z − z̄) − β h`, the tightest scaled row of node `i`'s factor.
fn binding_gap(p: &EstimateProblem, at: &BTreeMap<usize, Vec<f64>>, i: usize, beta: f64) -> f64 {
    let net = &p.network;
    let poly = net.factor_region(i).unwrap().as_polytope().unwrap();
    let cf = normalize_factor(&poly).unwrap();
    let mut z: Vec<f64> = Vec::new();
    for par in net.dag().parents(i).unwrap() {
        z.extend(&at[par]);
    }
    z.extend(&at[&i]);
    cf.rows
        .iter()
        .zip(&cf.h)
        .map(|(a, h)| {
            let lhs: f64 = a
                .iter()
                .zip(z.iter().zip(&cf.center))
                .map(|(ak, (zk, ck))| ak * (zk - ck))
                .sum::<f64>();
            lhs - beta * h
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Evidence drawn from a simulated joint sample, so posteriors tend to be nonempty.
fn consistent_problem(r: &mut ChaCha8Rng, n: usize) -> EstimateProblem {
    let net = random_network(r, n, 2, 1);
    let joint = net.joint_by_id().unwrap();
    let z = joint.sample_points(1, r.random()).unwrap().remove(0);
    let d = dims(&net);
    let (mut evidence, query) = random_split(r, &d);
    let mut at = 0;
    let mut values = BTreeMap::new();
    for (&i, &di) in &d {
        values.insert(i, z[at..at + di].to_vec());
        at += di;
    }
    if r.random_bool(0.7) {
        for (i, v) in evidence.iter_mut() {
            *v = values[i].clone();
        }
    }
    EstimateProblem::new(net, evidence, query).unwrap()
}

/// Star with an ∞-ball root around `c0` and children `y_k − x` in an ∞-ball around `c_k`.
fn ball_star(c0: &[f64], r0: f64, kids: &[(Vec<f64>, f64)]) -> UncertaintyNetwork {
    let n = c0.len();
    let k = kids.len();
    let dag = Dag::new(1..=k + 1, (2..=k + 1).map(|i| (1, i))).unwrap();
    let vars = (1..=k + 1)
        .map(|i| (i, VariableSignature::new(format!("x{i}"), n).unwrap()))
        .collect();
    let lo: Vec<f64> = c0.iter().map(|c| c - r0).collect();
    let hi: Vec<f64> = c0.iter().map(|c| c + r0).collect();
    let mut factors = BTreeMap::from([(1, Region::boxed(lo, hi).unwrap())]);
    for (idx, (c, rad)) in kids.iter().enumerate() {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..n {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; 2 * n];
                a[j] = -s;
                a[n + j] = s;
                rows.push(a);
                rhs.push(rad + s * c[j]);
            }
        }
        factors.insert(idx + 2, Region::polytope(rows, rhs).unwrap());
    }
    UncertaintyNetwork::new(dag, vars, factors).unwrap()
}

proptest! {
    #![proptest_config(prop_config(48))]

    #[test]
    fn every_factor_binds_or_is_unscaled(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = consistent_problem(&mut r, n);
        let res = point_estimate_lp(&p).unwrap();
        prop_assert_eq!(res.status, EstimateStatus::Optimal);
        let at = assignment(&p, &res.x_hat);
        for (&i, &b) in &res.beta {
            prop_assert!(b >= 0.0);
            let gap = binding_gap(&p, &at, i, b);
            prop_assert!(gap <= 1e-6, "node {} violates its scaled set by {}", i, gap);
            prop_assert!(b <= 1e-9 || gap >= -1e-6, "node {} has slack {} with β = {}", i, gap, b);
        }
    }

    #[test]
    fn nonempty_posterior_bounds_the_objective(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = consistent_problem(&mut r, n);
        let res = point_estimate_lp(&p).unwrap();
        let post = posterior_set(&p).unwrap();
        if post.is_empty() == Verdict::False {
            prop_assert!(res.objective <= res.beta.len() as f64 + 1e-9);
        }
        if res.beta.values().all(|b| *b <= 1.0 + 1e-10) {
            let x: Vec<f64> = p.query.iter().flat_map(|i| res.x_hat[i].iter().copied()).collect();
            prop_assert!(post.contains(&x).unwrap());
        }
    }

    #[test]
    fn estimate_moves_with_the_evidence(
        seed in any::<u64>(),
        n in 1usize..=2,
        k in 1usize..=3,
        shift in proptest::collection::vec(-5.0f64..5.0, 2),
    ) {
        let mut r = rng(seed);
        let t = &shift[..n];
        let c0: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let r0 = r.random_range(0.5..3.0);
        let kids: Vec<(Vec<f64>, f64)> = (0..k)
            .map(|_| ((0..n).map(|_| r.random_range(-1.0..1.0)).collect(), r.random_range(0.25..2.0)))
            .collect();
        let ys: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| r.random_range(-6.0..6.0)).collect()).collect();
        let solve = |c0: &[f64], ys: &[Vec<f64>]| {
            let evidence = ys.iter().enumerate().map(|(i, y)| (i + 2, y.clone())).collect();
            point_estimate_lp(&EstimateProblem::new(ball_star(c0, r0, &kids), evidence, vec![1]).unwrap()).unwrap()
        };
        let base = solve(&c0, &ys);
        let moved_c0: Vec<f64> = c0.iter().zip(t).map(|(a, b)| a + b).collect();
        let moved_ys: Vec<Vec<f64>> = ys.iter().map(|y| y.iter().zip(t).map(|(a, b)| a + b).collect()).collect();
        let moved = solve(&moved_c0, &moved_ys);
        prop_assert!((base.objective - moved.objective).abs() < 1e-7);
        if base.unique && moved.unique {
            for (a, b) in base.x_hat[&1].iter().zip(&moved.x_hat[&1]).zip(t).map(|((a, b), s)| (a + s, *b)) {
                prop_assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn normalization_centers_every_factor(seed in any::<u64>(), n in 1usize..=3, scale in 0.25f64..4.0) {
        let mut r = rng(seed);
        let p = random_polytope(&mut r, n, 3);
        let cf = normalize_factor(&p).unwrap();
        prop_assert!(cf.h.iter().all(|h| *h > 0.0));
        prop_assert!(p.contains(&cf.center));
        // A positive rescaling of the rows describes the same set and keeps the center.
        let scaled = HPolytope::new(
            p.rows().iter().map(|a| a.iter().map(|v| v * scale).collect()).collect(),
            p.rhs().iter().map(|b| b * scale).collect(),
        )
        .unwrap();
        let cs = normalize_factor(&scaled).unwrap();
        for (a, b) in cf.center.iter().zip(&cs.center) {
            prop_assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn gaussian_estimate_is_a_stationary_point(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let (dag, nodes) = random_linear_gaussian(&mut r, n, 2);
        let net = gaussian_network(dag, &nodes);
        let d = nodes.iter().map(|(&i, nd)| (i, nd.offset.len())).collect();
        let (evidence, query) = random_split(&mut r, &d);
        let p = GaussianProblem::new(net.clone(), evidence, query).unwrap();
        let report = verify_map_equivalence(&p, &net.log_densities()).unwrap();
        prop_assert!(report.gradient_max <= 1e-6, "gradient {}", report.gradient_max);
        prop_assert!(report.pass);
    }
}

#[test]
fn nonempty_posterior_does_not_bound_each_beta() {
    // Observations 0, 0 and 2 of a free scalar within radius 1: the posterior
    // is {1}, yet the program prefers x = 0 and enlarges the far factor twice.
    let dag = Dag::new(1..=4, [(1, 2), (1, 3), (1, 4)]).unwrap();
    let vars = (1..=4)
        .map(|i| (i, VariableSignature::new(format!("x{i}"), 1).unwrap()))
        .collect();
    let band = Region::polytope(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 1.0]).unwrap();
    let factors = BTreeMap::from([(1, Region::full(1)), (2, band.clone()), (3, band.clone()), (4, band)]);
    let net = UncertaintyNetwork::new(dag, vars, factors).unwrap();
    let p = EstimateProblem::new(net, vec![(2, vec![0.0]), (3, vec![0.0]), (4, vec![2.0])], vec![1]).unwrap();
    let post = posterior_set(&p).unwrap();
    assert_eq!(post.equals(&Region::interval(1.0, 1.0)).unwrap(), Verdict::True);
    let res = point_estimate_lp(&p).unwrap();
    assert!((res.objective - 2.0).abs() < 1e-9);
    assert!(res.x_hat[&1][0].abs() < 1e-9);
    assert!((res.beta[&4] - 2.0).abs() < 1e-9);
}

#[test]
fn factors_off_the_origin_are_recentered() {
    // Root in [3, 5] (negative right-hand side), child within 1 of it.
    let dag = Dag::new([1, 2], [(1, 2)]).unwrap();
    let vars = (1..=2)
        .map(|i| (i, VariableSignature::new(format!("x{i}"), 1).unwrap()))
        .collect();
    let band = Region::polytope(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 1.0]).unwrap();
    let factors = BTreeMap::from([(1, Region::interval(3.0, 5.0)), (2, band)]);
    let net = UncertaintyNetwork::new(dag, vars, factors).unwrap();
    let res = point_estimate_lp(&EstimateProblem::new(net, vec![(2, vec![10.0])], vec![1]).unwrap()).unwrap();
    assert_eq!(res.status, EstimateStatus::Optimal);
    assert!((res.objective - 6.0).abs() < 1e-9);
}

#[test]
fn degenerate_covariance_is_rejected() {
    let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    assert!(GaussianFactor::root(vec![0.0, 0.0], singular).is_err());
    assert!(GaussianFactor::scalar(vec![], 0.0, 0.0).is_err());
}

#[test]
fn gaussian_estimate_ignores_eta() {
    let mut r = rng(21);
    let (dag, nodes) = random_linear_gaussian(&mut r, 4, 2);
    let net = gaussian_network(dag, &nodes);
    let d = nodes.iter().map(|(&i, nd)| (i, nd.offset.len())).collect();
    let (evidence, query) = random_split(&mut r, &d);
    let base = GaussianProblem::new(net, evidence, query).unwrap();
    let a = point_estimate_gaussian(&base).unwrap();
    for eta in [0.5, 2.0] {
        let b = point_estimate_gaussian(&base.clone().with_eta(eta).unwrap()).unwrap();
        assert_eq!(a.x_hat.len(), b.x_hat.len());
        for (i, x) in &a.x_hat {
            for (u, v) in x.iter().zip(&b.x_hat[i]) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }
}
