//! Point estimates from the scaling-variable program
//!
//! ```text
//! minimize Σ_i β_i  subject to  H_i(x_i, x_pa(i)) ≤ β_i h_i,  x_J = y_J,  β ≥ 0
//! ```
//!
//! with a linear-programming backend for polytopic factors and a
//! least-squares backend for Gaussian factors.

mod gaussian;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use gaussian::{
    point_estimate_gaussian, verify_map_equivalence, verify_map_equivalence_with, GaussianFactor, GaussianNetwork,
    GaussianProblem, LogDensity, MapReport, MAP_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::geometry::sampling::SAMPLE_BOX_LIMIT;
use crate::geometry::{plot::fmt_coord, solve_lp, Body, HPolytope, LpOutcome, LpProblem, Region};
use crate::network::UncertaintyNetwork;

/// Evidence on `J`, query `I`, with `I ∩ J = ∅` and `I ∪ J = V`.
#[derive(Debug, Clone)]
pub struct EstimateProblem {
    pub network: UncertaintyNetwork,
    pub evidence: Vec<(usize, Vec<f64>)>,
    pub query: Vec<usize>,
}

pub(crate) fn check_partition(
    nodes: &[usize],
    dims: impl Fn(usize) -> usize,
    evidence: &[(usize, Vec<f64>)],
    query: &[usize],
) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &i in evidence.iter().map(|(i, _)| i).chain(query) {
        if nodes.binary_search(&i).is_err() {
            return Err(Error::UnknownNode(i));
        }
        if !seen.insert(i) {
            return Err(Error::InvalidArgument(format!(
                "node {i} appears more than once in evidence and query"
            )));
        }
    }
    if seen.len() != nodes.len() {
        let missing = nodes.iter().find(|i| !seen.contains(i)).unwrap();
        return Err(Error::InvalidArgument(format!(
            "node {missing} is neither observed nor queried"
        )));
    }
    for (i, v) in evidence {
        if v.len() != dims(*i) {
            return Err(Error::DimensionMismatch {
                expected: dims(*i),
                found: v.len(),
            });
        }
    }
    Ok(())
}

impl EstimateProblem {
    pub fn new(network: UncertaintyNetwork, evidence: Vec<(usize, Vec<f64>)>, query: Vec<usize>) -> Result<Self> {
        check_partition(
            network.dag().nodes(),
            |i| network.variables()[&i].dim,
            &evidence,
            &query,
        )?;
        Ok(EstimateProblem {
            network,
            evidence,
            query,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateStatus {
    Optimal,
    InfeasibleEvidence,
    /// Unbounded program, or an unidentifiable query for the Gaussian backend.
    Unbounded,
    BackendUnsupported,
}

impl fmt::Display for EstimateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateStatus::Optimal => "optimal",
            EstimateStatus::InfeasibleEvidence => "infeasible-evidence",
            EstimateStatus::Unbounded => "unbounded",
            EstimateStatus::BackendUnsupported => "backend-unsupported",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub status: EstimateStatus,
    /// Estimate per query node.
    pub x_hat: BTreeMap<usize, Vec<f64>>,
    /// Scaling value per node.
    pub beta: BTreeMap<usize, f64>,
    /// `Σ β_i`.
    pub objective: f64,
    /// `false` when other optimizers exist.
    pub unique: bool,
    /// Why the backend gave up, when it did.
    pub note: Option<String>,
}

impl EstimateResult {
    fn failed(status: EstimateStatus, note: impl Into<String>) -> Self {
        EstimateResult {
            status,
            x_hat: BTreeMap::new(),
            beta: BTreeMap::new(),
            objective: f64::NAN,
            unique: false,
            note: Some(note.into()),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == EstimateStatus::Optimal
    }
}

impl fmt::Display for EstimateResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status {}", self.status)?;
        if let Some(n) = &self.note {
            writeln!(f, "note {n}")?;
        }
        if !self.is_optimal() {
            return Ok(());
        }
        writeln!(f, "objective {}", fmt_coord(self.objective))?;
        for (i, x) in &self.x_hat {
            let vals: Vec<String> = x.iter().map(|v| fmt_coord(*v)).collect();
            writeln!(f, "x {i} {}", vals.join(" "))?;
        }
        for (i, b) in &self.beta {
            writeln!(f, "beta {i} {}", fmt_coord(*b))?;
        }
        writeln!(f, "unique {}", if self.unique { "yes" } else { "no" })
    }
}

/// A factor in centered form `A (z − z̄) ≤ h` with `h > 0`.
#[derive(Debug, Clone)]
pub struct CenteredFactor {
    pub center: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub h: Vec<f64>,
}

/// Re-centers `A z ≤ b` at its Chebyshev center so every `h` component is
/// strictly positive; `Err` explains why that is impossible.
pub fn normalize_factor(p: &HPolytope) -> std::result::Result<CenteredFactor, String> {
    let p = p.without_redundant_rows();
    if p.is_empty_system() {
        return Ok(CenteredFactor {
            center: vec![0.0; p.dim()],
            rows: Vec::new(),
            h: Vec::new(),
        });
    }
    let (center, radius) = p
        .chebyshev_center(SAMPLE_BOX_LIMIT)
        .ok_or_else(|| "factor set is empty".to_string())?;
    if radius <= crate::geometry::EPS_FEAS {
        return Err("factor set has no interior, so no center gives h > 0".into());
    }
    let h: Vec<f64> = p
        .rows()
        .iter()
        .zip(p.rhs())
        .map(|(a, b)| b - a.iter().zip(&center).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    debug_assert!(h.iter().all(|v| *v > 0.0));
    Ok(CenteredFactor {
        center,
        rows: p.rows().to_vec(),
        h,
    })
}

fn factor_polytope(r: &Region) -> Option<HPolytope> {
    match r.body() {
        Body::Full | Body::Box(_) | Body::Polytope(_) => r.as_polytope(),
        Body::Union(ps) if ps.len() == 1 => Some(ps[0].clone()),
        _ => None,
    }
}

/// Where each coordinate of a node block comes from.
enum Coord {
    Known(f64),
    Free(usize),
}

fn layout(
    net: &UncertaintyNetwork,
    evidence: &[(usize, Vec<f64>)],
    query: &[usize],
) -> (BTreeMap<usize, Vec<Coord>>, usize) {
    let mut out = BTreeMap::new();
    let mut next = 0;
    for &i in query {
        let d = net.variables()[&i].dim;
        out.insert(i, (next..next + d).map(Coord::Free).collect());
        next += d;
    }
    for (i, v) in evidence {
        out.insert(*i, v.iter().map(|&x| Coord::Known(x)).collect());
    }
    (out, next)
}

/// Solves the scaling-variable program as one linear program over
/// `(x_I, β_V)`, after centering each factor so that `h > 0`.
///
/// The returned point is a simplex vertex; `unique` is decided by minimizing
/// and maximizing each coordinate of `x_I` over the optimal face.
pub fn point_estimate_lp(p: &EstimateProblem) -> Result<EstimateResult> {
    let net = &p.network;
    let nodes = net.dag().nodes().to_vec();
    let (coords, nx) = layout(net, &p.evidence, &p.query);
    let nb = nodes.len();
    let n = nx + nb;
    let mut poly = HPolytope::unconstrained(n);

    for (k, &i) in nodes.iter().enumerate() {
        let region = net.factor_region(i)?;
        let Some(hp) = factor_polytope(region) else {
            return Ok(EstimateResult::failed(
                EstimateStatus::BackendUnsupported,
                format!("factor of node {i} is not a single polytope"),
            ));
        };
        let cf = match normalize_factor(&hp) {
            Ok(cf) => cf,
            Err(why) => {
                return Ok(EstimateResult::failed(
                    EstimateStatus::BackendUnsupported,
                    format!("factor of node {i}: {why}"),
                ))
            }
        };
        // Factor coordinates: parents ascending, then the node itself.
        let mut block: Vec<&Coord> = Vec::new();
        for par in net.dag().parents(i)? {
            block.extend(coords[par].iter());
        }
        block.extend(coords[&i].iter());
        for (a, h) in cf.rows.iter().zip(&cf.h) {
            // a·(z − z̄) ≤ β h  ⇔  a_free·x − h β ≤ a·z̄ − a_known·y
            let mut row = vec![0.0; n];
            let mut rhs: f64 = a.iter().zip(&cf.center).map(|(x, y)| x * y).sum();
            for (aj, c) in a.iter().zip(&block) {
                match c {
                    Coord::Known(v) => rhs -= aj * v,
                    Coord::Free(j) => row[*j] += aj,
                }
            }
            row[nx + k] = -h;
            poly.push_row(row, rhs);
        }
        let mut nonneg = vec![0.0; n];
        nonneg[nx + k] = -1.0;
        poly.push_row(nonneg, 0.0);
    }

    let mut c = vec![0.0; n];
    for v in &mut c[nx..] {
        *v = 1.0;
    }
    let (point, value) = match solve_lp(&LpProblem::new(c.clone(), poly.clone())?) {
        LpOutcome::Optimal { point, value } => (point, value),
        LpOutcome::Infeasible => {
            return Ok(EstimateResult::failed(
                EstimateStatus::InfeasibleEvidence,
                "the scaled program has no feasible point",
            ))
        }
        LpOutcome::Unbounded => {
            return Ok(EstimateResult::failed(
                EstimateStatus::Unbounded,
                "objective unbounded below",
            ))
        }
    };

    // Optimal face: Σβ ≤ value + tol; probe each estimate coordinate.
    let tol = 1e-9 * value.abs().max(1.0);
    let mut face = poly;
    face.push_row(c, value + tol);
    let mut unique = true;
    'probe: for j in 0..nx {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let hi = face.maximize(&e);
        e[j] = -1.0;
        let lo = face.maximize(&e);
        match (hi.value(), lo.value()) {
            (Some(h), Some(l)) if h + l <= 1e-6 => {}
            _ => {
                unique = false;
                break 'probe;
            }
        }
    }

    let mut x_hat = BTreeMap::new();
    for &i in &p.query {
        let v = coords[&i]
            .iter()
            .map(|c| match c {
                Coord::Free(j) => point[*j],
                Coord::Known(v) => *v,
            })
            .collect();
        x_hat.insert(i, v);
    }
    let beta = nodes
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, point[nx + k].max(0.0)))
        .collect();
    Ok(EstimateResult {
        status: EstimateStatus::Optimal,
        x_hat,
        beta,
        objective: value,
        unique,
        note: None,
    })
}

/// The posterior set for the same evidence and query, blocks in query order.
pub fn posterior_set(p: &EstimateProblem) -> Result<Region> {
    p.network.network_posterior(&p.evidence, &p.query)
}
