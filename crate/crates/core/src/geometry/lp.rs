//! Dense two-phase simplex for `min cᵀx  s.t.  A x ≤ b` with free `x`.
//!
//! Every free variable is split into `x⁺ − x⁻`; each row receives a slack and,
//! when its right-hand side is negative, an artificial variable. Bland's rule
//! picks both the entering and the leaving variable, so degenerate problems
//! cannot cycle.

use super::polytope::HPolytope;
use crate::error::{Error, Result};

/// Pivot elements smaller than this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: HPolytope,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { point: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, constraints: HPolytope) -> Result<Self> {
        if objective.len() != constraints.dim() {
            return Err(Error::DimensionMismatch {
                expected: constraints.dim(),
                found: objective.len(),
            });
        }
        Ok(LpProblem { objective, constraints })
    }

    pub fn solve(&self) -> LpOutcome {
        solve_rows(
            &self.objective,
            self.constraints.rows(),
            self.constraints.rhs(),
            self.constraints.dim(),
        )
    }
}

pub fn solve_lp(problem: &LpProblem) -> LpOutcome {
    problem.solve()
}

/// Minimizes `cᵀx` over `{x : rows·x ≤ rhs}`.
pub(crate) fn solve_rows(c: &[f64], rows: &[Vec<f64>], rhs: &[f64], n: usize) -> LpOutcome {
    debug_assert_eq!(c.len(), n);
    if rows.is_empty() {
        return if c.iter().all(|v| *v == 0.0) {
            LpOutcome::Optimal {
                point: vec![0.0; n],
                value: 0.0,
            }
        } else {
            LpOutcome::Unbounded
        };
    }

    // Rows are rescaled to unit max-norm; the feasible set is unchanged.
    let m = rows.len();
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (row, &rhs_i) in rows.iter().zip(rhs) {
        let scale = row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            if rhs_i < 0.0 {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        a.push(row.iter().map(|v| v / scale).collect::<Vec<_>>());
        b.push(rhs_i / scale);
    }
    if a.is_empty() {
        return solve_rows(c, &[], &[], n);
    }

    let mut tableau = Tableau::build(&a, &b, n);
    if !tableau.phase_one() {
        return LpOutcome::Infeasible;
    }
    match tableau.phase_two(c) {
        Some(point) => {
            let value = c.iter().zip(&point).map(|(ci, xi)| ci * xi).sum();
            LpOutcome::Optimal { point, value }
        }
        None => LpOutcome::Unbounded,
    }
}

struct Tableau {
    /// `rows + 1` rows of `cols + 1` entries; the last row holds reduced costs,
    /// the last column holds the basic values (and minus the objective value).
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(a: &[Vec<f64>], b: &[f64], n: usize) -> Self {
        let m = a.len();
        let negatives = b.iter().filter(|v| **v < 0.0).count();
        let first_artificial = 2 * n + m;
        let cols = first_artificial + negatives;
        let mut t = vec![vec![0.0; cols + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut next_art = first_artificial;
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i][j] = sign * a[i][j];
                t[i][n + j] = -sign * a[i][j];
            }
            t[i][2 * n + i] = sign;
            t[i][cols] = sign * b[i];
            if sign < 0.0 {
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = 2 * n + i;
            }
        }
        Tableau {
            t,
            basis,
            n,
            cols,
            first_artificial,
        }
    }

    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let width = self.cols + 1;
        let p = self.t[r][col];
        for j in 0..width {
            self.t[r][j] /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for j in 0..width {
                    row[j] -= f * pivot_row[j];
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
    }

    /// Runs Bland-rule simplex on the current cost row over columns `< allowed`.
    /// Returns false when the problem is unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let obj = self.rows();
        loop {
            let entering = (0..allowed).find(|&j| self.t[obj][j] < -PIVOT_TOL);
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows() {
                let aij = self.t[i][col];
                if aij > PIVOT_TOL {
                    let ratio = self.t[i][self.cols] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let obj = self.rows();
        let width = self.cols + 1;
        let mut row = vec![0.0; width];
        row[..costs.len()].copy_from_slice(costs);
        for i in 0..self.rows() {
            let cb = costs.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (r, t) in row.iter_mut().zip(&self.t[i]) {
                    *r -= cb * t;
                }
            }
        }
        self.t[obj] = row;
    }

    fn phase_one(&mut self) -> bool {
        if self.first_artificial == self.cols {
            return true;
        }
        let mut costs = vec![0.0; self.cols];
        for c in costs.iter_mut().skip(self.first_artificial) {
            *c = 1.0;
        }
        self.set_costs(&costs);
        self.run(self.cols);
        let infeas: f64 = (0..self.rows())
            .filter(|&i| self.basis[i] >= self.first_artificial)
            .map(|i| self.t[i][self.cols])
            .sum();
        let scale = (0..self.rows())
            .map(|i| self.t[i][self.cols].abs())
            .fold(1.0_f64, f64::max);
        if infeas > 1e-9 * scale {
            return false;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..self.rows() {
            if self.basis[i] >= self.first_artificial {
                if let Some(col) = (0..self.first_artificial).find(|&j| self.t[i][j].abs() > PIVOT_TOL) {
                    self.pivot(i, col);
                }
            }
        }
        true
    }

    fn phase_two(&mut self, c: &[f64]) -> Option<Vec<f64>> {
        let mut costs = vec![0.0; self.first_artificial];
        for j in 0..self.n {
            costs[j] = c[j];
            costs[self.n + j] = -c[j];
        }
        self.set_costs(&costs);
        if !self.run(self.first_artificial) {
            return None;
        }
        let mut x = vec![0.0; self.n];
        for i in 0..self.rows() {
            let var = self.basis[i];
            let val = self.t[i][self.cols];
            if var < self.n {
                x[var] += val;
            } else if var < 2 * self.n {
                x[var - self.n] -= val;
            }
        }
        Some(x)
    }
}
