use super::polytope::HPolytope;
use super::EPS_FEAS;
use crate::error::{Error, Result};

/// Axis-aligned box; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if lower.iter().chain(&upper).any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN box bound".into()));
        }
        if lower.contains(&f64::INFINITY) || upper.contains(&f64::NEG_INFINITY) {
            return Err(Error::InvalidArgument(
                "lower bounds may not be +inf and upper bounds may not be -inf".into(),
            ));
        }
        Ok(AxisBox { lower, upper })
    }

    pub fn unbounded(dim: usize) -> Self {
        AxisBox {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= l - EPS_FEAS && *v <= u + EPS_FEAS)
    }

    pub fn intersect(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a.max(*b)).collect(),
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn hull(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a.min(*b)).collect(),
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn product(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lower: self.lower.iter().chain(&other.lower).copied().collect(),
            upper: self.upper.iter().chain(&other.upper).copied().collect(),
        }
    }

    pub fn select(&self, keep: &[usize]) -> AxisBox {
        AxisBox {
            lower: keep.iter().map(|&i| self.lower[i]).collect(),
            upper: keep.iter().map(|&i| self.upper[i]).collect(),
        }
    }

    pub fn linear_max(&self, c: &[f64]) -> f64 {
        c.iter()
            .enumerate()
            .map(|(i, &ci)| {
                if ci > 0.0 {
                    ci * self.upper[i]
                } else if ci < 0.0 {
                    ci * self.lower[i]
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// One row per finite bound.
    pub fn to_polytope(&self) -> HPolytope {
        let n = self.dim();
        let mut p = HPolytope::unconstrained(n);
        for i in 0..n {
            if self.upper[i].is_finite() {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                p.push_row(r, self.upper[i]);
            }
            if self.lower[i].is_finite() {
                let mut r = vec![0.0; n];
                r[i] = -1.0;
                p.push_row(r, -self.lower[i]);
            }
        }
        p
    }
}
