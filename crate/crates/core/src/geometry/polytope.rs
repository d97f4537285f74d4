use super::lp::{solve_rows, LpOutcome};
use super::EPS_FEAS;
use crate::error::{Error, Result};

/// Coefficients below this magnitude (after row normalization) are treated as
/// zero during elimination.
const COEFF_TOL: f64 = 1e-12;

/// `{x ∈ Rⁿ : A x ≤ b}` stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl HPolytope {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("polytope needs at least one row to infer its dimension".into()))?;
        Self::with_dim(dim, rows, rhs)
    }

    pub fn with_dim(dim: usize, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: rhs.len(),
            });
        }
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        if rows.iter().flatten().chain(&rhs).any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN in polytope data".into()));
        }
        Ok(HPolytope { dim, rows, rhs })
    }

    /// The whole space, written with zero rows.
    pub fn unconstrained(dim: usize) -> Self {
        HPolytope {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    #[allow(clippy::len_without_is_empty)] // `is_empty` would read as set emptiness
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty_system(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push_row(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.dim);
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(row, b)| dot(row, x) <= b + EPS_FEAS)
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| dot(row, x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn maximize(&self, c: &[f64]) -> LpOutcome {
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        match solve_rows(&neg, &self.rows, &self.rhs, self.dim) {
            LpOutcome::Optimal { point, value } => LpOutcome::Optimal { point, value: -value },
            other => other,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            solve_rows(&vec![0.0; self.dim], &self.rows, &self.rhs, self.dim),
            LpOutcome::Infeasible
        )
    }

    /// A feasible point, if any.
    pub fn feasible_point(&self) -> Option<Vec<f64>> {
        solve_rows(&vec![0.0; self.dim], &self.rows, &self.rhs, self.dim)
            .point()
            .map(<[f64]>::to_vec)
    }

    /// Center and radius of the largest inscribed Euclidean ball. The radius is
    /// capped at `cap` so unbounded polyhedra still yield a point.
    pub fn chebyshev_center(&self, cap: f64) -> Option<(Vec<f64>, f64)> {
        let n = self.dim;
        let mut rows = Vec::with_capacity(self.rows.len() + 1);
        let mut rhs = self.rhs.clone();
        for row in &self.rows {
            let norm = dot(row, row).sqrt();
            let mut r = row.clone();
            r.push(norm);
            rows.push(r);
        }
        let mut cap_row = vec![0.0; n + 1];
        cap_row[n] = 1.0;
        rows.push(cap_row);
        rhs.push(cap);
        let mut c = vec![0.0; n + 1];
        c[n] = -1.0;
        match solve_rows(&c, &rows, &rhs, n + 1) {
            LpOutcome::Optimal { mut point, .. } => {
                let r = point.pop().unwrap_or(0.0);
                if r < -EPS_FEAS {
                    None
                } else {
                    Some((point, r.max(0.0)))
                }
            }
            _ => None,
        }
    }

    /// Keeps the listed coordinates, in the listed order, after eliminating the
    /// rest by Fourier–Motzkin. Returns `None` when the polytope is empty.
    pub fn project(&self, keep: &[usize]) -> Option<HPolytope> {
        if self.is_infeasible() {
            return None;
        }
        let mut sys = System::from(self);
        let mut alive: Vec<usize> = (0..self.dim).collect();
        let mut drop: Vec<usize> = (0..self.dim).filter(|i| !keep.contains(i)).collect();
        sys.prune();
        while !drop.is_empty() {
            // Greedy: the column whose elimination creates the fewest rows.
            let (pick, _) = drop
                .iter()
                .enumerate()
                .map(|(k, &coord)| {
                    let col = alive.iter().position(|&c| c == coord).unwrap();
                    (k, sys.fm_cost(col))
                })
                .min_by_key(|&(_, cost)| cost)
                .unwrap();
            let coord = drop.remove(pick);
            let col = alive.iter().position(|&c| c == coord).unwrap();
            sys.eliminate(col);
            alive.remove(col);
            sys.prune();
        }
        let order: Vec<usize> = keep
            .iter()
            .map(|k| alive.iter().position(|c| c == k).unwrap())
            .collect();
        let rows = sys.rows.iter().map(|r| order.iter().map(|&j| r[j]).collect()).collect();
        Some(HPolytope {
            dim: keep.len(),
            rows,
            rhs: sys.rhs,
        })
    }

    /// Drops rows implied by the others (LP test at `EPS_FEAS`).
    pub fn without_redundant_rows(&self) -> HPolytope {
        let mut sys = System::from(self);
        sys.prune();
        HPolytope {
            dim: self.dim,
            rows: sys.rows,
            rhs: sys.rhs,
        }
    }

    /// Substitutes fixed coordinate values; the result lives on the remaining
    /// coordinates in ascending order. Returns `None` if a constant row fails.
    pub fn substitute(&self, fixed: &[(usize, f64)]) -> Option<HPolytope> {
        let free: Vec<usize> = (0..self.dim).filter(|i| !fixed.iter().any(|(j, _)| j == i)).collect();
        let mut out = HPolytope::unconstrained(free.len());
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let shift: f64 = fixed.iter().map(|&(j, v)| row[j] * v).sum();
            let new_row: Vec<f64> = free.iter().map(|&j| row[j]).collect();
            let new_b = b - shift;
            if new_row.iter().all(|v| *v == 0.0) {
                if new_b < -EPS_FEAS {
                    return None;
                }
                continue;
            }
            out.push_row(new_row, new_b);
        }
        Some(out)
    }

    /// Places this polytope's coordinates at `positions` inside a space of
    /// dimension `dim`; other coordinates are unconstrained.
    pub fn embed(&self, dim: usize, positions: &[usize]) -> HPolytope {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut full = vec![0.0; dim];
                for (k, &p) in positions.iter().enumerate() {
                    full[p] = r[k];
                }
                full
            })
            .collect();
        HPolytope {
            dim,
            rows,
            rhs: self.rhs.clone(),
        }
    }

    pub fn intersect(&self, other: &HPolytope) -> HPolytope {
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        out.rhs.extend_from_slice(&other.rhs);
        out
    }

    pub fn product(&self, other: &HPolytope) -> HPolytope {
        let dim = self.dim + other.dim;
        let left: Vec<usize> = (0..self.dim).collect();
        let right: Vec<usize> = (self.dim..dim).collect();
        self.embed(dim, &left).intersect(&other.embed(dim, &right))
    }

    pub fn translate(&self, t: &[f64]) -> HPolytope {
        let rhs = self.rows.iter().zip(&self.rhs).map(|(r, b)| b + dot(r, t)).collect();
        HPolytope {
            dim: self.dim,
            rows: self.rows.clone(),
            rhs,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Working copy used during elimination; rows are kept max-norm normalized.
struct System {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl From<&HPolytope> for System {
    fn from(p: &HPolytope) -> Self {
        System {
            rows: p.rows.clone(),
            rhs: p.rhs.clone(),
        }
    }
}

impl System {
    fn fm_cost(&self, col: usize) -> usize {
        let pos = self.rows.iter().filter(|r| r[col] > COEFF_TOL).count();
        let neg = self.rows.iter().filter(|r| r[col] < -COEFF_TOL).count();
        pos * neg
    }

    fn eliminate(&mut self, col: usize) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if r[col] > COEFF_TOL {
                pos.push(i);
            } else if r[col] < -COEFF_TOL {
                neg.push(i);
            } else {
                let mut kept = r.clone();
                kept.remove(col);
                rows.push(kept);
                rhs.push(self.rhs[i]);
            }
        }
        for &p in &pos {
            for &q in &neg {
                let lp = -self.rows[q][col];
                let lq = self.rows[p][col];
                let mut combined: Vec<f64> = self.rows[p]
                    .iter()
                    .zip(&self.rows[q])
                    .map(|(a, b)| lp * a + lq * b)
                    .collect();
                combined.remove(col);
                rows.push(combined);
                rhs.push(lp * self.rhs[p] + lq * self.rhs[q]);
            }
        }
        self.rows = rows;
        self.rhs = rhs;
    }

    /// Normalizes, drops trivial and duplicate rows, then removes LP-redundant rows.
    fn prune(&mut self) {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        'outer: for (r, &b) in self.rows.iter().zip(&self.rhs) {
            let scale = r.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if scale <= COEFF_TOL {
                // 0 ≤ b: either vacuous or (for nonempty input) numerically so.
                continue;
            }
            let row: Vec<f64> = r
                .iter()
                .map(|v| {
                    let s = v / scale;
                    if s.abs() <= COEFF_TOL {
                        0.0
                    } else {
                        s
                    }
                })
                .collect();
            let b = b / scale;
            for (k, existing) in rows.iter().enumerate() {
                if existing.iter().zip(&row).all(|(x, y)| (x - y).abs() <= 1e-12) {
                    if b < rhs[k] {
                        rhs[k] = b;
                    }
                    continue 'outer;
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            let (others, others_rhs): (Vec<Vec<f64>>, Vec<f64>) = (0..rows.len())
                .filter(|&j| j != i && keep[j])
                .map(|j| (rows[j].clone(), rhs[j]))
                .unzip();
            let dim = rows[i].len();
            let neg: Vec<f64> = rows[i].iter().map(|v| -v).collect();
            if let LpOutcome::Optimal { value, .. } = solve_rows(&neg, &others, &others_rhs, dim) {
                if -value <= rhs[i] + EPS_FEAS {
                    keep[i] = false;
                }
            }
        }
        let mut k = keep.iter();
        rows.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        rhs.retain(|_| *k.next().unwrap());
        self.rows = rows;
        self.rhs = rhs;
    }
}
