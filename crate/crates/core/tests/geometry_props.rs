mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use uvnet::geometry::io::{parse_region, write_region};
use uvnet::geometry::{HPolytope, LpProblem, Region, Support, Verdict};

/// A random coordinate subset of `0..n`, nonempty and proper when `n > 1`.
fn keep_set(r: &mut impl Rng, n: usize) -> Vec<usize> {
    loop {
        let k: Vec<usize> = (0..n).filter(|_| r.random_bool(0.5)).collect();
        if !k.is_empty() && (k.len() < n || n == 1) {
            return k;
        }
    }
}

proptest! {
    #![proptest_config(prop_config(48))]

    #[test]
    fn projection_is_exactly_the_shadow(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let p = random_polytope(&mut r, n, 12 - 2 * n);
        let keep = keep_set(&mut r, n);
        let body = Region::from_polytope(p.clone());
        let proj = body.project(&keep).unwrap();
        for x in body.sample_points(200, seed).unwrap() {
            let z: Vec<f64> = keep.iter().map(|&k| x[k]).collect();
            prop_assert!(proj.contains(&z).unwrap());
        }
        for z in proj.sample_points(1000, seed ^ 1).unwrap() {
            let fixed: Vec<(usize, f64)> = keep.iter().copied().zip(z.iter().copied()).collect();
            let fibre = p.substitute(&fixed);
            prop_assert!(fibre.is_some_and(|f| !f.is_infeasible()), "no extension for {:?}", z);
        }
    }

    #[test]
    fn redundancy_removal_keeps_the_set(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let p = random_polytope(&mut r, n, 6);
        let mut padded = p.clone();
        // Push a few rows that are implied by the others.
        for k in 0..n {
            let mut a = vec![0.0; n];
            a[k] = 1.0;
            let top = p.maximize(&a).value().unwrap();
            padded.push_row(a, top + 1.0 + k as f64);
        }
        let lean = padded.without_redundant_rows();
        prop_assert!(lean.len() <= padded.len());
        let (a, b) = (Region::from_polytope(padded), Region::from_polytope(lean));
        prop_assert_eq!(a.equals(&b).unwrap(), Verdict::True);
    }

    #[test]
    fn nested_projection_composes(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let body = Region::from_polytope(random_polytope(&mut r, n, 4));
        let outer = keep_set(&mut r, n);
        let inner_pos = keep_set(&mut r, outer.len());
        let inner: Vec<usize> = inner_pos.iter().map(|&i| outer[i]).collect();
        let twice = body.project(&outer).unwrap().project(&inner_pos).unwrap();
        let once = body.project(&inner).unwrap();
        prop_assert_eq!(twice.equals(&once).unwrap(), Verdict::True);
    }

    #[test]
    fn slice_is_intersect_then_project(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = random_polytope(&mut r, n, 4);
        let body = Region::from_polytope(p.clone());
        let x = body.sample_points(1, seed).unwrap().remove(0);
        let fixed_at = keep_set(&mut r, n);
        let fixed: Vec<(usize, f64)> = fixed_at.iter().map(|&k| (k, x[k])).collect();
        let sliced = body.slice(&fixed).unwrap();

        let mut plane = HPolytope::unconstrained(n);
        for &(k, v) in &fixed {
            let mut a = vec![0.0; n];
            a[k] = 1.0;
            plane.push_row(a.clone(), v);
            plane.push_row(a.iter().map(|t| -t).collect(), -v);
        }
        let rest: Vec<usize> = (0..n).filter(|k| !fixed_at.contains(k)).collect();
        if rest.is_empty() {
            prop_assert_eq!(sliced.dim(), 0);
        } else {
            let via = body.intersect(&Region::from_polytope(plane)).unwrap().project(&rest).unwrap();
            prop_assert_eq!(sliced.equals(&via).unwrap(), Verdict::True);
        }
    }

    #[test]
    fn union_support_is_max_over_pieces(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=4) {
        let mut r = rng(seed);
        let pieces: Vec<HPolytope> = (0..k).map(|_| random_polytope(&mut r, n, 3)).collect();
        let c: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let best = pieces
            .iter()
            .map(|p| Region::from_polytope(p.clone()).linear_max(&c).unwrap())
            .map(|s| match s { Support::Value(v) => v, other => panic!("{other:?}") })
            .fold(f64::NEG_INFINITY, f64::max);
        match Region::union(pieces).unwrap().linear_max(&c).unwrap() {
            Support::Value(v) => prop_assert!((v - best).abs() < 1e-9),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn lp_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_polytope(&mut r, 3, 4);
        let c: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let oracle = vertices_3d(&p)
            .iter()
            .map(|v| v.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let got = LpProblem::new(c, p).unwrap().solve().value().unwrap();
        prop_assert!((got - oracle).abs() < 1e-8, "{} vs {}", got, oracle);
    }

    #[test]
    fn text_form_round_trips(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        let mut r = rng(seed);
        let region = if k == 1 {
            Region::from_polytope(random_polytope(&mut r, n, 3))
        } else {
            Region::union((0..k).map(|_| random_polytope(&mut r, n, 3)).collect()).unwrap()
        };
        let back = parse_region(&write_region(&region).unwrap()).unwrap();
        prop_assert_eq!(back.equals(&region).unwrap(), Verdict::True);
    }
}

#[test]
fn empty_and_full_are_explicit() {
    let e = Region::empty(2);
    let f = Region::full(2);
    assert!(!e.contains(&[0.0, 0.0]).unwrap());
    assert!(f.contains(&[1e9, -1e9]).unwrap());
    assert_eq!(e.is_empty(), Verdict::True);
    assert_eq!(f.is_empty(), Verdict::False);
    assert_eq!(e.is_subset(&f).unwrap(), Verdict::True);
}
