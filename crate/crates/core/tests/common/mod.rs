//! Random model generators and brute-force oracles shared by the
//! integration tests. Nothing here calls the algorithms it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uvnet::geometry::{HPolytope, Region};
use uvnet::network::{Dag, UncertaintyNetwork};
use uvnet::uncertainty::VariableSignature;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn round(v: f64) -> f64 {
    (v * 8.0).round() / 8.0
}

/// Bounded, nonempty polytope: a box around a random center plus up to
/// `max_extra` random rows that keep the center strictly inside.
pub fn random_polytope(r: &mut ChaCha8Rng, n: usize, max_extra: usize) -> HPolytope {
    let extra = r.random_range(0..=max_extra);
    let center: Vec<f64> = (0..n).map(|_| round(r.random_range(-1.0..1.0))).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..n {
        let half = round(r.random_range(0.5..2.0));
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; n];
            a[k] = s;
            rows.push(a);
            rhs.push(s * center[k] + half);
        }
    }
    for _ in 0..extra {
        let a: Vec<f64> = (0..n).map(|_| round(r.random_range(-1.0..1.0))).collect();
        if a.iter().all(|v| *v == 0.0) {
            continue;
        }
        let b = round(r.random_range(0.25..1.5));
        let ac: f64 = a.iter().zip(&center).map(|(x, y)| x * y).sum();
        rows.push(a);
        rhs.push(ac + b);
    }
    HPolytope::new(rows, rhs).unwrap()
}

/// `y − C x ∈ P` over `(x, y)`: every slice is a translate of `P`, so the
/// relation is always definite.
pub fn random_relation(r: &mut ChaCha8Rng, nx: usize, ny: usize, max_extra: usize) -> Region {
    let p = random_polytope(r, ny, max_extra);
    let c: Vec<Vec<f64>> = (0..ny)
        .map(|_| (0..nx).map(|_| round(r.random_range(-1.0..1.0))).collect())
        .collect();
    let mut rows = Vec::new();
    for a in p.rows() {
        let mut row = vec![0.0; nx + ny];
        for (k, ak) in a.iter().enumerate() {
            row[nx + k] = *ak;
            for j in 0..nx {
                row[j] -= ak * c[k][j];
            }
        }
        rows.push(row);
    }
    Region::polytope(rows, p.rhs().to_vec()).unwrap()
}

/// Random DAG on ids `1..=n` whose labels are not in topological order.
pub fn random_dag(r: &mut ChaCha8Rng, n: usize, p: f64) -> Dag {
    let mut label: Vec<usize> = (1..=n).collect();
    label.shuffle(r);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(p) {
                edges.push((label[i], label[j]));
            }
        }
    }
    Dag::new(1..=n, edges).unwrap()
}

/// Network with factors `x_i − C x_pa(i) ∈ P_i` (roots: `x_i ∈ P_i`).
pub fn random_network(r: &mut ChaCha8Rng, n: usize, max_dim: usize, max_extra: usize) -> UncertaintyNetwork {
    let dag = random_dag(r, n, 0.45);
    network_on(r, dag, max_dim, max_extra)
}

pub fn network_on(r: &mut ChaCha8Rng, dag: Dag, max_dim: usize, max_extra: usize) -> UncertaintyNetwork {
    let dims: BTreeMap<usize, usize> = dag.nodes().iter().map(|&i| (i, r.random_range(1..=max_dim))).collect();
    let vars = dims
        .iter()
        .map(|(&i, &d)| (i, VariableSignature::new(format!("x{i}"), d).unwrap()))
        .collect();
    let mut factors = BTreeMap::new();
    for &i in dag.nodes() {
        let pd: usize = dag.parents(i).unwrap().iter().map(|p| dims[p]).sum();
        let f = if pd == 0 {
            Region::from_polytope(random_polytope(r, dims[&i], max_extra))
        } else {
            random_relation(r, pd, dims[&i], max_extra)
        };
        factors.insert(i, f);
    }
    UncertaintyNetwork::new(dag, vars, factors).unwrap()
}

/// Interval-factor network (all dims 1): roots in an interval,
/// `x_i − Σ w_j x_j` in an interval otherwise.
pub fn interval_network(r: &mut ChaCha8Rng, n: usize) -> UncertaintyNetwork {
    let dag = random_dag(r, n, 0.45);
    network_on(r, dag, 1, 0)
}

// ---------------------------------------------------------------- d-separation

fn neighbors(dag: &Dag, i: usize) -> Vec<usize> {
    let mut v: Vec<usize> = dag.parents(i).unwrap().to_vec();
    v.extend_from_slice(dag.children(i).unwrap());
    v
}

fn descendants_or_self(dag: &Dag, i: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([i]);
    let mut stack = vec![i];
    while let Some(u) = stack.pop() {
        for &c in dag.children(u).unwrap() {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

fn has_edge(dag: &Dag, p: usize, c: usize) -> bool {
    dag.children(p).unwrap().contains(&c)
}

fn path_blocked(dag: &Dag, path: &[usize], c: &BTreeSet<usize>) -> bool {
    for w in path.windows(3) {
        let (u, j, v) = (w[0], w[1], w[2]);
        let collider = has_edge(dag, u, j) && has_edge(dag, v, j);
        if collider {
            if descendants_or_self(dag, j).is_disjoint(c) {
                return true;
            }
        } else if c.contains(&j) {
            return true;
        }
    }
    false
}

/// Every simple undirected path from A to B is blocked by C.
pub fn dsep_by_paths(dag: &Dag, a: &BTreeSet<usize>, b: &BTreeSet<usize>, c: &BTreeSet<usize>) -> bool {
    fn walk(dag: &Dag, path: &mut Vec<usize>, b: &BTreeSet<usize>, c: &BTreeSet<usize>) -> bool {
        let last = *path.last().unwrap();
        if path.len() > 1 && b.contains(&last) {
            return path_blocked(dag, path, c);
        }
        for n in neighbors(dag, last) {
            if path.contains(&n) {
                continue;
            }
            path.push(n);
            let ok = walk(dag, path, b, c);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    a.iter().all(|&s| walk(dag, &mut vec![s], b, c))
}

/// All labeled DAGs on `1..=n` (each unordered pair: absent, `i→j` or `j→i`).
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::new(1..=n, edges) {
            out.push(d);
        }
    }
    out
}

/// Random disjoint (A, B, C) with A, B nonempty.
pub fn random_query(r: &mut ChaCha8Rng, n: usize) -> (BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>) {
    loop {
        let (mut a, mut b, mut c) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for i in 1..=n {
            match r.random_range(0..4) {
                0 => a.insert(i),
                1 => b.insert(i),
                2 => c.insert(i),
                _ => false,
            };
        }
        if !a.is_empty() && !b.is_empty() {
            return (a, b, c);
        }
    }
}

/// Every (A, B, C) with A, B nonempty, disjoint, and min A < min B.
pub fn all_queries(nodes: &[usize]) -> Vec<(BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>)> {
    let n = nodes.len();
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let (mut a, mut b, mut c) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        let mut k = code;
        for &i in nodes {
            match k % 4 {
                0 => a.insert(i),
                1 => b.insert(i),
                2 => c.insert(i),
                _ => false,
            };
            k /= 4;
        }
        if !a.is_empty() && !b.is_empty() && a.first() < b.first() {
            out.push((a, b, c));
        }
    }
    out
}

// ------------------------------------------------------------------- geometry

/// Brute-force vertices of a 3-D polytope: feasible intersections of every
/// triple of rows.
pub fn vertices_3d(p: &HPolytope) -> Vec<[f64; 3]> {
    let (rows, rhs) = (p.rows(), p.rhs());
    let m = rows.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let a = DMatrix::from_fn(3, 3, |r, c| [&rows[i], &rows[j], &rows[k]][r][c]);
                let b = DVector::from_vec(vec![rhs[i], rhs[j], rhs[k]]);
                let Some(x) = a.clone().lu().solve(&b) else { continue };
                if (a.determinant()).abs() < 1e-9 {
                    continue;
                }
                let feasible = rows
                    .iter()
                    .zip(rhs)
                    .all(|(row, bb)| row.iter().zip(x.iter()).map(|(u, v)| u * v).sum::<f64>() <= bb + 1e-9);
                if feasible {
                    out.push([x[0], x[1], x[2]]);
                }
            }
        }
    }
    out
}

/// Points of `r` drawn by rejection from its bounding box.
pub fn rejection_points(r: &mut ChaCha8Rng, region: &Region, lo: &[f64], hi: &[f64], want: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    let mut tries = 0;
    while pts.len() < want && tries < want * 200 {
        tries += 1;
        let x: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| r.random_range(*l..=*h)).collect();
        if region.contains(&x).unwrap() {
            pts.push(x);
        }
    }
    pts
}

/// Minimum of `Σ_i ‖x − y_i‖_∞ / half` over the grid `[lo, hi]²` at `step`.
pub fn grid_min_linf(ys: &[[f64; 2]], half: f64, lo: f64, hi: f64, step: f64) -> (f64, [f64; 2]) {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..=n {
        let x0 = lo + i as f64 * step;
        for j in 0..=n {
            let x1 = lo + j as f64 * step;
            let v: f64 = ys.iter().map(|y| (x0 - y[0]).abs().max((x1 - y[1]).abs())).sum::<f64>() / half;
            if v < best.0 {
                best = (v, [x0, x1]);
            }
        }
    }
    best
}

// ------------------------------------------------------------------- Gaussian

/// A linear-Gaussian node: `x_i = F x_pa + c + e`, `e ~ N(0, Σ)`.
#[derive(Debug, Clone)]
pub struct LinearNode {
    pub parents: Vec<usize>,
    pub gain: DMatrix<f64>,
    pub offset: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// Joint mean and covariance of a linear-Gaussian network, blocks in
/// ascending id order.
pub fn gaussian_joint(nodes: &BTreeMap<usize, LinearNode>) -> (DVector<f64>, DMatrix<f64>, BTreeMap<usize, usize>) {
    let mut at = BTreeMap::new();
    let mut total = 0;
    for (&i, n) in nodes {
        at.insert(i, total);
        total += n.offset.len();
    }
    // x = B x + c + e  ⇒  x = (I − B)⁻¹ (c + e)
    let mut b = DMatrix::zeros(total, total);
    let mut c = DVector::zeros(total);
    let mut d = DMatrix::zeros(total, total);
    for (&i, n) in nodes {
        let (r0, di) = (at[&i], n.offset.len());
        c.rows_mut(r0, di).copy_from(&n.offset);
        d.view_mut((r0, r0), (di, di)).copy_from(&n.cov);
        let mut col = 0;
        for p in &n.parents {
            let dp = nodes[p].offset.len();
            b.view_mut((r0, at[p]), (di, dp)).copy_from(&n.gain.columns(col, dp));
            col += dp;
        }
    }
    let inv = (DMatrix::identity(total, total) - b).try_inverse().unwrap();
    let mean = &inv * c;
    let cov = &inv * d * inv.transpose();
    (mean, cov, at)
}

/// `E[x_I | x_J = y]` by Gaussian conditioning of the joint.
pub fn gaussian_conditional_mean(
    nodes: &BTreeMap<usize, LinearNode>,
    evidence: &[(usize, Vec<f64>)],
    query: &[usize],
) -> Vec<f64> {
    let (mean, cov, at) = gaussian_joint(nodes);
    let idx = |ids: &[usize]| -> Vec<usize> { ids.iter().flat_map(|i| at[i]..at[i] + nodes[i].offset.len()).collect() };
    let ev_ids: Vec<usize> = evidence.iter().map(|(i, _)| *i).collect();
    let (qi, ej) = (idx(query), idx(&ev_ids));
    let y: Vec<f64> = evidence.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let s_qj = DMatrix::from_fn(qi.len(), ej.len(), |r, c| cov[(qi[r], ej[c])]);
    let s_jj = DMatrix::from_fn(ej.len(), ej.len(), |r, c| cov[(ej[r], ej[c])]);
    let resid = DVector::from_fn(ej.len(), |r, _| y[r] - mean[ej[r]]);
    let shift = if ej.is_empty() {
        DVector::zeros(qi.len())
    } else {
        s_qj * s_jj.try_inverse().unwrap() * resid
    };
    qi.iter().enumerate().map(|(r, &q)| mean[q] + shift[r]).collect()
}

/// Random SPD matrix with eigenvalues in roughly `[0.2, 3]`.
pub fn random_spd(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| r.random_range(-1.0..1.0));
    &a * a.transpose() * 0.5 + DMatrix::identity(d, d) * r.random_range(0.2..1.0)
}

/// Random linear-Gaussian chain or star with proper root.
pub fn random_linear_gaussian(r: &mut ChaCha8Rng, n: usize, max_dim: usize) -> (Dag, BTreeMap<usize, LinearNode>) {
    let star = r.random_bool(0.5);
    let edges: Vec<(usize, usize)> = if star {
        (2..=n).map(|i| (1, i)).collect()
    } else {
        (2..=n).map(|i| (i - 1, i)).collect()
    };
    let dag = Dag::new(1..=n, edges).unwrap();
    let dims: BTreeMap<usize, usize> = (1..=n).map(|i| (i, r.random_range(1..=max_dim))).collect();
    let mut nodes = BTreeMap::new();
    for i in 1..=n {
        let parents = dag.parents(i).unwrap().to_vec();
        let pd: usize = parents.iter().map(|p| dims[p]).sum();
        let di = dims[&i];
        nodes.insert(
            i,
            LinearNode {
                parents,
                gain: DMatrix::from_fn(di, pd, |_, _| r.random_range(-1.5..1.5)),
                offset: DVector::from_fn(di, |_, _| r.random_range(-2.0..2.0)),
                cov: random_spd(r, di),
            },
        );
    }
    (dag, nodes)
}

pub fn gaussian_network(dag: Dag, nodes: &BTreeMap<usize, LinearNode>) -> uvnet::estimate::GaussianNetwork {
    let factors = nodes
        .iter()
        .map(|(&i, nd)| {
            let f = uvnet::estimate::GaussianFactor::new(nd.gain.clone(), nd.offset.clone(), nd.cov.clone());
            (i, f.unwrap())
        })
        .collect();
    uvnet::estimate::GaussianNetwork::new(dag, factors).unwrap()
}

/// Random split of `1..=n` into evidence (random values) and a nonempty query.
pub fn random_split(r: &mut ChaCha8Rng, dims: &BTreeMap<usize, usize>) -> (Vec<(usize, Vec<f64>)>, Vec<usize>) {
    let mut evidence = Vec::new();
    let mut query = Vec::new();
    for (&i, &d) in dims {
        if r.random_bool(0.5) {
            evidence.push((i, (0..d).map(|_| round(r.random_range(-3.0..3.0))).collect()));
        } else {
            query.push(i);
        }
    }
    if query.is_empty() {
        query.push(evidence.pop().unwrap().0);
    }
    (evidence, query)
}

/// Fixed-seed property-test configuration, so every run checks the same cases.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Default::default()
    }
}
