//! Gaussian factors: the scaling-variable program with canonical sub-level
//! sets of Gaussian densities. At the optimum every constraint is tight, so
//! `β_i = H_i / η` with `H_i = ½ rᵢᵀ Σᵢ⁻¹ rᵢ`, and minimizing `Σ β_i` is a
//! weighted linear least-squares problem, i.e. the MAP estimate.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{check_partition, EstimateResult, EstimateStatus};
use crate::error::{Error, Result};
use crate::network::Dag;

/// Pass threshold for [`verify_map_equivalence`].
pub const MAP_TOLERANCE: f64 = 1e-6;

/// Eigenvalues of the normal matrix at or below this (relative) value make
/// the query unidentifiable.
const SINGULAR_TOL: f64 = 1e-12;

/// `X_i | x_pa ~ N(F x_pa + c, Σ)`, or a flat factor carrying no information.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFactor {
    gain: DMatrix<f64>,
    offset: DVector<f64>,
    covariance: Option<DMatrix<f64>>,
    precision: Option<DMatrix<f64>>,
}

impl GaussianFactor {
    /// `gain` is `dim × (Σ parent dims)`, parents ascending.
    pub fn new(gain: DMatrix<f64>, offset: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = offset.len();
        if gain.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: gain.nrows(),
            });
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: covariance.nrows(),
            });
        }
        if (&covariance - covariance.transpose()).amax() > 1e-12 {
            return Err(Error::InvalidArgument("covariance is not symmetric".into()));
        }
        let eig = covariance.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidArgument("covariance is not positive definite".into()));
        }
        let precision = covariance
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("covariance is not positive definite".into()))?
            .inverse();
        Ok(GaussianFactor {
            gain,
            offset,
            covariance: Some(covariance),
            precision: Some(precision),
        })
    }

    /// Root factor `N(mean, Σ)`.
    pub fn root(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        GaussianFactor::new(DMatrix::zeros(d, 0), DVector::from_vec(mean), covariance)
    }

    /// Scalar convenience: `x_i ~ N(Σ_k g_k x_pa_k + c, σ²)`.
    pub fn scalar(gains: Vec<f64>, offset: f64, variance: f64) -> Result<Self> {
        let k = gains.len();
        GaussianFactor::new(
            DMatrix::from_row_slice(1, k, &gains),
            DVector::from_element(1, offset),
            DMatrix::from_element(1, 1, variance),
        )
    }

    /// A factor with no information (an improper flat prior).
    pub fn flat(dim: usize, parent_dim: usize) -> Self {
        GaussianFactor {
            gain: DMatrix::zeros(dim, parent_dim),
            offset: DVector::zeros(dim),
            covariance: None,
            precision: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn parent_dim(&self) -> usize {
        self.gain.ncols()
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.gain
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn covariance(&self) -> Option<&DMatrix<f64>> {
        self.covariance.as_ref()
    }

    /// `½ rᵀ Σ⁻¹ r` with `r = x − F x_pa − c`, i.e. `−log` of the density
    /// divided by its maximum.
    pub fn energy(&self, x_pa: &[f64], x: &[f64]) -> f64 {
        match &self.precision {
            None => 0.0,
            Some(w) => {
                let r = self.residual(x_pa, x);
                0.5 * r.dot(&(w * &r))
            }
        }
    }

    fn residual(&self, x_pa: &[f64], x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x) - &self.gain * DVector::from_column_slice(x_pa) - &self.offset
    }
}

/// A DAG with one Gaussian factor per node.
#[derive(Debug, Clone)]
pub struct GaussianNetwork {
    dag: Dag,
    factors: BTreeMap<usize, GaussianFactor>,
}

impl GaussianNetwork {
    pub fn new(dag: Dag, factors: BTreeMap<usize, GaussianFactor>) -> Result<Self> {
        for &i in dag.nodes() {
            if !factors.contains_key(&i) {
                return Err(Error::InvalidArgument(format!("node {i} has no factor")));
            }
        }
        for (&i, f) in &factors {
            let parents = dag.parents(i)?;
            let pd: usize = parents
                .iter()
                .map(|p| factors.get(p).map_or(0, GaussianFactor::dim))
                .sum();
            if f.parent_dim() != pd {
                return Err(Error::DimensionMismatch {
                    expected: pd,
                    found: f.parent_dim(),
                });
            }
        }
        Ok(GaussianNetwork { dag, factors })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn factor(&self, i: usize) -> Result<&GaussianFactor> {
        self.factors.get(&i).ok_or(Error::UnknownNode(i))
    }

    pub fn dim(&self, i: usize) -> usize {
        self.factors[&i].dim()
    }

    /// Offsets of each node block in the ascending-id concatenation.
    pub fn offsets(&self) -> BTreeMap<usize, usize> {
        let mut at = 0;
        self.dag
            .nodes()
            .iter()
            .map(|&i| {
                let o = at;
                at += self.dim(i);
                (i, o)
            })
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.values().map(GaussianFactor::dim).sum()
    }

    /// Per-node `log Q_i` (density over its maximum) as functions of the
    /// full assignment, blocks in ascending node-id order.
    pub fn log_densities(&self) -> Vec<LogDensity> {
        let offsets = self.offsets();
        self.dag
            .nodes()
            .iter()
            .map(|&i| {
                let f = self.factors[&i].clone();
                let own = offsets[&i]..offsets[&i] + f.dim();
                let parents: Vec<std::ops::Range<usize>> = self
                    .dag
                    .parents(i)
                    .expect("known node")
                    .iter()
                    .map(|p| offsets[p]..offsets[p] + self.dim(*p))
                    .collect();
                Box::new(move |z: &[f64]| {
                    let x_pa: Vec<f64> = parents.iter().flat_map(|r| z[r.clone()].iter().copied()).collect();
                    -f.energy(&x_pa, &z[own.clone()])
                }) as LogDensity
            })
            .collect()
    }
}

/// Log-density callable over the full ascending-id assignment.
pub type LogDensity = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone)]
pub struct GaussianProblem {
    pub network: GaussianNetwork,
    pub evidence: Vec<(usize, Vec<f64>)>,
    pub query: Vec<usize>,
    /// Level `η` of the canonical sets; the estimate does not depend on it.
    pub eta: f64,
}

impl GaussianProblem {
    pub fn new(network: GaussianNetwork, evidence: Vec<(usize, Vec<f64>)>, query: Vec<usize>) -> Result<Self> {
        check_partition(network.dag().nodes(), |i| network.dim(i), &evidence, &query)?;
        Ok(GaussianProblem {
            network,
            evidence,
            query,
            eta: 1.0,
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument("η must be positive".into()));
        }
        self.eta = eta;
        Ok(self)
    }

    fn free_dim(&self) -> usize {
        self.query.iter().map(|&i| self.network.dim(i)).sum()
    }

    /// Full ascending-id assignment from the free coordinates (query order).
    pub fn assemble(&self, free: &[f64]) -> Vec<f64> {
        let offsets = self.network.offsets();
        let mut z = vec![0.0; self.network.total_dim()];
        let mut at = 0;
        for &i in &self.query {
            let d = self.network.dim(i);
            z[offsets[&i]..offsets[&i] + d].copy_from_slice(&free[at..at + d]);
            at += d;
        }
        for (i, v) in &self.evidence {
            z[offsets[i]..offsets[i] + v.len()].copy_from_slice(v);
        }
        z
    }

    fn split(&self, free: &[f64]) -> BTreeMap<usize, Vec<f64>> {
        let mut out = BTreeMap::new();
        let mut at = 0;
        for &i in &self.query {
            let d = self.network.dim(i);
            out.insert(i, free[at..at + d].to_vec());
            at += d;
        }
        out
    }
}

/// Minimizes `Σ_i ½ rᵢᵀ Σᵢ⁻¹ rᵢ` over the query by the normal equations and
/// reports `β_i = ½ rᵢᵀ Σᵢ⁻¹ rᵢ / η`.
pub fn point_estimate_gaussian(p: &GaussianProblem) -> Result<EstimateResult> {
    let net = &p.network;
    let nx = p.free_dim();
    let mut free_at: BTreeMap<usize, usize> = BTreeMap::new();
    let mut at = 0;
    for &i in &p.query {
        free_at.insert(i, at);
        at += net.dim(i);
    }
    let known: BTreeMap<usize, &Vec<f64>> = p.evidence.iter().map(|(i, v)| (*i, v)).collect();

    let mut normal = DMatrix::<f64>::zeros(nx, nx);
    let mut rhs = DVector::<f64>::zeros(nx);
    for &i in net.dag().nodes() {
        let f = net.factor(i)?;
        let Some(w) = &f.precision else { continue };
        // r = M x_free − k
        let d = f.dim();
        let mut m = DMatrix::<f64>::zeros(d, nx);
        let mut k = f.offset.clone();
        let mut place = |node: usize, coeff: DMatrix<f64>| {
            if let Some(&j) = free_at.get(&node) {
                let mut view = m.view_mut((0, j), (d, coeff.ncols()));
                view += &coeff;
            } else {
                k -= &coeff * DVector::from_column_slice(known[&node]);
            }
        };
        let mut col = 0;
        for &par in net.dag().parents(i)? {
            let pd = net.dim(par);
            place(par, -f.gain.columns(col, pd).into_owned());
            col += pd;
        }
        place(i, DMatrix::identity(d, d));
        let mtw = m.transpose() * w;
        normal += &mtw * &m;
        rhs += &mtw * &k;
    }

    let x = if nx == 0 {
        DVector::zeros(0)
    } else {
        let eig = normal.clone().symmetric_eigen();
        let max = eig.eigenvalues.amax().max(1.0);
        let min = eig.eigenvalues.min();
        if min <= SINGULAR_TOL * max {
            return Ok(EstimateResult {
                status: EstimateStatus::Unbounded,
                x_hat: BTreeMap::new(),
                beta: BTreeMap::new(),
                objective: f64::NAN,
                unique: false,
                note: Some("normal matrix is singular: the query is unidentifiable".into()),
            });
        }
        match normal.clone().cholesky() {
            Some(c) => c.solve(&rhs),
            None => {
                eig.eigenvectors.clone()
                    * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v))
                    * eig.eigenvectors.transpose()
                    * &rhs
            }
        }
    };

    let z = p.assemble(x.as_slice());
    let offsets = net.offsets();
    let mut beta = BTreeMap::new();
    for &i in net.dag().nodes() {
        let f = net.factor(i)?;
        let x_pa: Vec<f64> = net
            .dag()
            .parents(i)?
            .iter()
            .flat_map(|pn| z[offsets[pn]..offsets[pn] + net.dim(*pn)].iter().copied())
            .collect();
        let e = f.energy(&x_pa, &z[offsets[&i]..offsets[&i] + f.dim()]);
        beta.insert(i, e / p.eta);
    }
    Ok(EstimateResult {
        status: EstimateStatus::Optimal,
        x_hat: p.split(x.as_slice()),
        objective: beta.values().sum(),
        beta,
        unique: true,
        note: None,
    })
}

/// Comparison between the scaling-variable estimate and a direct maximizer
/// of `Σ log Q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapReport {
    pub estimate: Vec<f64>,
    pub maximizer: Vec<f64>,
    pub max_abs_diff: f64,
    /// Max-abs finite-difference gradient of `Σ log Q_i` at the estimate.
    pub gradient_max: f64,
    pub pass: bool,
}

fn total_log(p: &GaussianProblem, logs: &[LogDensity], free: &[f64]) -> f64 {
    let z = p.assemble(free);
    logs.iter().map(|f| f(&z)).sum()
}

fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|j| {
            y[j] = x[j] + h;
            let up = f(&y);
            y[j] = x[j] - h;
            let down = f(&y);
            y[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    let mut y = x.to_vec();
    for j in 0..n {
        for k in j..n {
            let mut eval = |sj: f64, sk: f64| {
                y.copy_from_slice(x);
                y[j] += sj * h;
                y[k] += sk * h;
                f(&y)
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h);
            out[(j, k)] = v;
            out[(k, j)] = v;
        }
    }
    out
}

/// Newton's method on finite differences of the supplied log-densities.
fn maximize_log_density(p: &GaussianProblem, logs: &[LogDensity]) -> Option<Vec<f64>> {
    let n = p.free_dim();
    let f = |x: &[f64]| total_log(p, logs, x);
    let mut x = vec![0.0; n];
    for _ in 0..6 {
        let g = DVector::from_vec(fd_gradient(&f, &x, 1e-3));
        let hess = fd_hessian(&f, &x, 1e-1);
        let step = (-hess).cholesky()?.solve(&g);
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi += si;
        }
        if step.amax() < 1e-13 {
            break;
        }
    }
    Some(x)
}

/// Checks the scaling-variable estimate against an independent maximizer of
/// `Σ log Q_i` (finite-difference Newton on the supplied callables).
pub fn verify_map_equivalence(p: &GaussianProblem, logs: &[LogDensity]) -> Result<MapReport> {
    verify_map_equivalence_with(p, logs, point_estimate_gaussian)
}

/// As [`verify_map_equivalence`] with a caller-supplied estimator.
pub fn verify_map_equivalence_with<F>(p: &GaussianProblem, logs: &[LogDensity], estimator: F) -> Result<MapReport>
where
    F: Fn(&GaussianProblem) -> Result<EstimateResult>,
{
    let r = estimator(p)?;
    if !r.is_optimal() {
        return Err(Error::InvalidArgument(format!(
            "estimator returned status {}",
            r.status
        )));
    }
    let estimate: Vec<f64> = p.query.iter().flat_map(|i| r.x_hat[i].iter().copied()).collect();
    let maximizer = maximize_log_density(p, logs)
        .ok_or_else(|| Error::InvalidArgument("log-density has no unique maximizer".into()))?;
    let max_abs_diff = estimate
        .iter()
        .zip(&maximizer)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let f = |x: &[f64]| total_log(p, logs, x);
    let gradient_max = fd_gradient(&f, &estimate, 1e-3)
        .iter()
        .fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(MapReport {
        estimate,
        maximizer,
        max_abs_diff,
        gradient_max,
        pass: max_abs_diff <= MAP_TOLERANCE,
    })
}
