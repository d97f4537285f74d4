use super::*;
use crate::fixtures;

fn unit_square() -> Region {
    Region::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

fn triangle() -> Region {
    Region::polytope(
        vec![vec![1.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
        vec![1.0, 0.0, 0.0],
    )
    .unwrap()
}

#[test]
fn contains_examples() {
    assert!(triangle().contains(&[0.5, 0.4]).unwrap());
    let t = fixtures::tetrahedron();
    assert!(t.contains(&[1.0, 1.0, 0.0]).unwrap());
    assert!(!t.contains(&[1.0, 1.0, 1.0]).unwrap());
    assert!(matches!(t.contains(&[1.0, 1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn is_empty_examples() {
    let conflict = Region::polytope(vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0]).unwrap();
    assert_eq!(conflict.is_empty(), Verdict::True);
    assert_eq!(fixtures::diamond().is_empty(), Verdict::False);
    assert_eq!(Region::interval(0.0, 0.0).is_empty(), Verdict::False);
}

#[test]
fn oracle_emptiness_is_tri_state() {
    let b = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
    let never = Region::from_oracle(MembershipOracle::new(b.clone(), |_| false));
    assert_eq!(never.is_empty(), Verdict::SampledTrue);
    let sometimes = Region::from_oracle(MembershipOracle::new(b, |x| x[0] > 0.5));
    assert_eq!(sometimes.is_empty(), Verdict::False);
}

/// Grid oracle: the interval swept by sampling `r` on a grid over `[lo, hi]²`
/// and keeping the first coordinate of every member.
fn grid_interval_of_first(r: &Region, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let p = [lo + i as f64 * step, lo + j as f64 * step];
            if r.contains(&p).unwrap() {
                mn = mn.min(p[0]);
                mx = mx.max(p[0]);
            }
        }
    }
    (mn, mx)
}

#[test]
fn project_examples() {
    let (lo, hi) = grid_interval_of_first(&triangle(), -1.0, 2.0, 1e-3);
    assert!((lo - 0.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    let proj = triangle().project(&[0]).unwrap();
    assert_eq!(proj.equals(&Region::interval(lo, hi)).unwrap(), Verdict::True);

    let dy = fixtures::diamond().project(&[1]).unwrap();
    assert_eq!(dy.equals(&Region::interval(0.0, 5.0)).unwrap(), Verdict::True);

    let b = Region::boxed(vec![0.0, 2.0], vec![5.0, 3.0]).unwrap();
    let by = b.project(&[1]).unwrap();
    assert!(matches!(by.body(), Body::Box(_)));
    assert_eq!(by.equals(&Region::interval(2.0, 3.0)).unwrap(), Verdict::True);

    assert!(matches!(b.project(&[2]), Err(Error::IndexOutOfRange { .. })));
    assert!(b.project(&[]).is_err());
    assert!(matches!(b.project(&[0, 0]), Err(Error::DuplicateIndex(0))));
}

#[test]
fn intersect_examples() {
    let r = Region::interval(0.0, 2.0)
        .intersect(&Region::interval(1.0, 3.0))
        .unwrap();
    assert_eq!(r.equals(&Region::interval(1.0, 2.0)).unwrap(), Verdict::True);
    let e = Region::interval(0.0, 2.0)
        .intersect(&Region::interval(3.0, 4.0))
        .unwrap();
    assert!(matches!(e.body(), Body::Empty));
    assert!(Region::interval(0.0, 1.0).intersect(&unit_square()).is_err());
}

#[test]
fn tetrahedron_floor_slice_is_a_segment() {
    // Intersect with the plane x3 = 0 (two rows), then project to (x1, x2).
    let plane = Region::polytope(vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]], vec![0.0, 0.0]).unwrap();
    let cut = fixtures::tetrahedron().intersect(&plane).unwrap();
    let flat = cut.project(&[0, 1]).unwrap();
    let segment = Region::polytope(
        vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0]],
        vec![2.0, 0.0, 0.0, 0.0],
    )
    .unwrap();
    assert_eq!(flat.equals(&segment).unwrap(), Verdict::True);
    // Grid oracle at step 1e-2: members are exactly the diagonal points.
    for i in 0..=100 {
        for j in 0..=100 {
            let p = [i as f64 * 0.02 - 0.5, j as f64 * 0.02 - 0.5];
            let on_diag = (p[0] - p[1]).abs() < 1e-12 && p[0] >= -1e-12 && p[0] <= 1.0 + 1e-12;
            assert_eq!(flat.contains(&p).unwrap(), on_diag, "{p:?}");
        }
    }
}

#[test]
fn product_examples() {
    let p = Region::interval(0.0, 1.0).product(&Region::interval(2.0, 3.0)).unwrap();
    match p.body() {
        Body::Box(b) => {
            assert_eq!(b.lower(), &[0.0, 2.0]);
            assert_eq!(b.upper(), &[1.0, 3.0]);
        }
        other => panic!("{other:?}"),
    }
    let e = Region::empty(2).product(&unit_square()).unwrap();
    assert!(matches!(e.body(), Body::Empty));
    assert_eq!(e.dim(), 4);

    let sq = Region::from_polytope(unit_square().as_polytope().unwrap());
    let cube = sq.product(&Region::interval(0.0, 1.0)).unwrap();
    assert_eq!(cube.as_polytope().unwrap().len(), 6);
    let mut rng_state = 12345u64;
    let mut next = || {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 3.0 - 1.0
    };
    for _ in 0..1000 {
        let x = [next(), next(), next()];
        let expect = x.iter().all(|v| (0.0..=1.0).contains(v));
        assert_eq!(cube.contains(&x).unwrap(), expect);
    }
}

#[test]
fn slice_examples() {
    let d = fixtures::diamond();
    let at1 = d.slice(&[(0, 1.0)]).unwrap();
    assert_eq!(at1.equals(&Region::interval(1.5, 3.5)).unwrap(), Verdict::True);
    let at6 = d.slice(&[(0, 6.0)]).unwrap();
    assert!(matches!(at6.body(), Body::Empty));
    let sq = unit_square().slice(&[(0, 0.3)]).unwrap();
    assert_eq!(sq.equals(&Region::interval(0.0, 1.0)).unwrap(), Verdict::True);
    assert!(unit_square().slice(&[(0, 0.3), (1, 0.2)]).is_err());
}

#[test]
fn linear_max_examples() {
    assert_eq!(unit_square().linear_max(&[1.0, 0.0]).unwrap(), Support::Value(1.0));
    match fixtures::tetrahedron().linear_max(&[1.0, 1.0, 1.0]).unwrap() {
        Support::Value(v) => assert!((v - 2.0).abs() < 1e-12),
        s => panic!("{s:?}"),
    }
    let ray = Region::polytope(vec![vec![-1.0]], vec![0.0]).unwrap();
    assert_eq!(ray.linear_max(&[1.0]).unwrap(), Support::Unbounded);
    assert_eq!(Region::empty(1).linear_max(&[1.0]).unwrap(), Support::Empty);
    let o = Region::from_oracle(MembershipOracle::new(
        AxisBox::new(vec![0.0], vec![1.0]).unwrap(),
        |_| true,
    ));
    assert!(matches!(o.linear_max(&[1.0]), Err(Error::Unsupported(_))));
}

#[test]
fn subset_examples() {
    assert_eq!(
        Region::interval(1.0, 2.0)
            .is_subset(&Region::interval(0.0, 3.0))
            .unwrap(),
        Verdict::True
    );
    let cube = Region::boxed(vec![0.0; 3], vec![1.0; 3]).unwrap();
    // Vertex oracle: all four tetrahedron vertices lie in the cube.
    for v in fixtures::TETRAHEDRON_VERTICES {
        assert!(cube.contains(&v).unwrap());
    }
    assert_eq!(fixtures::tetrahedron().is_subset(&cube).unwrap(), Verdict::True);
    assert_eq!(cube.is_subset(&fixtures::tetrahedron()).unwrap(), Verdict::False);
}

#[test]
fn equality_examples() {
    let i = Region::interval(0.0, 1.0);
    let p = Region::polytope(vec![vec![-1.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
    assert_eq!(i.equals(&p).unwrap(), Verdict::True);
    let proj = triangle().project(&[0]).unwrap();
    assert_eq!(proj.equals(&i).unwrap(), Verdict::True);
    assert_eq!(i.equals(&Region::interval(0.0, 1.0 + 1e-6)).unwrap(), Verdict::False);
}

/// Brute-force LP oracle: evaluate the objective at every vertex.
fn vertex_min(c: &[f64], verts: &[[f64; 3]]) -> f64 {
    verts
        .iter()
        .map(|v| v.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn solve_lp_examples() {
    let sq = unit_square().as_polytope().unwrap();
    match solve_lp(&LpProblem::new(vec![-1.0, -1.0], sq).unwrap()) {
        LpOutcome::Optimal { point, value } => {
            assert!((value + 2.0).abs() < 1e-12);
            assert!((point[0] - 1.0).abs() < 1e-12 && (point[1] - 1.0).abs() < 1e-12);
        }
        o => panic!("{o:?}"),
    }
    let bad = HPolytope::new(vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0]).unwrap();
    assert_eq!(
        solve_lp(&LpProblem::new(vec![1.0], bad).unwrap()),
        LpOutcome::Infeasible
    );
    let tet = fixtures::tetrahedron().as_polytope().unwrap();
    let c = [-1.0, -1.0, -1.0];
    let expected = vertex_min(&c, &fixtures::TETRAHEDRON_VERTICES);
    assert!((expected + 2.0).abs() < 1e-15);
    match solve_lp(&LpProblem::new(c.to_vec(), tet).unwrap()) {
        LpOutcome::Optimal { point, value } => {
            assert!((value - expected).abs() < 1e-12);
            assert!((point.iter().sum::<f64>() - 2.0).abs() < 1e-9);
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn ellipsoid_regions() {
    let e = Region::from_ellipsoid(Ellipsoid::new(vec![0.0, 0.0], nalgebra::DMatrix::identity(2, 2), 1.0).unwrap());
    let s = e.slice(&[(0, 0.6)]).unwrap();
    assert_eq!(s.equals(&Region::interval(-0.8, 0.8)).unwrap(), Verdict::True);
    let p = e.project(&[1]).unwrap();
    assert_eq!(p.equals(&Region::interval(-1.0, 1.0)).unwrap(), Verdict::True);
    // Intersecting degrades to an oracle with sampled decisions.
    let half = Region::boxed(vec![0.0, -2.0], vec![2.0, 2.0]).unwrap();
    let cap = e.intersect(&half).unwrap();
    assert!(matches!(cap.body(), Body::Oracle(_)));
    assert!(cap.contains(&[0.5, 0.5]).unwrap());
    assert!(!cap.contains(&[-0.5, 0.5]).unwrap());
    assert_eq!(cap.is_subset(&e).unwrap(), Verdict::SampledTrue);
    assert_eq!(e.is_subset(&cap).unwrap(), Verdict::False);
}

#[test]
fn unions_distribute() {
    let u = Region::union(vec![
        Region::interval(0.0, 1.0).as_polytope().unwrap(),
        Region::interval(2.0, 3.0).as_polytope().unwrap(),
    ])
    .unwrap();
    let cut = u.intersect(&Region::interval(0.5, 2.5)).unwrap();
    assert!(cut.contains(&[0.7]).unwrap() && cut.contains(&[2.2]).unwrap());
    assert!(!cut.contains(&[1.5]).unwrap() && !cut.contains(&[2.7]).unwrap());
    assert_eq!(u.linear_max(&[1.0]).unwrap(), Support::Value(3.0));
    let planar = u.product(&Region::interval(0.0, 1.0)).unwrap();
    let back = planar.project(&[0]).unwrap();
    assert_eq!(back.equals(&u).unwrap(), Verdict::True);
    assert_eq!(Region::interval(0.0, 3.0).is_subset(&u).unwrap(), Verdict::False);
}

#[test]
fn embed_places_coordinates() {
    let r = Region::interval(1.0, 2.0).embed(3, &[2]).unwrap();
    assert!(r.contains(&[100.0, -5.0, 1.5]).unwrap());
    assert!(!r.contains(&[0.0, 0.0, 2.5]).unwrap());
}
