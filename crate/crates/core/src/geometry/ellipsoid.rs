use nalgebra::{DMatrix, DVector};

use super::aabb::AxisBox;
use super::EPS_FEAS;
use crate::error::{Error, Result};

/// `{x : (x − c)ᵀ Q⁻¹ (x − c) ≤ η}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    level: f64,
}

/// Outcome of fixing some coordinates of an ellipsoid.
#[derive(Debug, Clone, PartialEq)]
pub enum EllipsoidSlice {
    Empty,
    Point(Vec<f64>),
    Ellipsoid(Ellipsoid),
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>, level: f64) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: shape.nrows(),
            });
        }
        if !(level > 0.0) {
            return Err(Error::InvalidArgument("ellipsoid level must be positive".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (shape[(i, j)] - shape[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument("ellipsoid shape is not symmetric".into()));
                }
            }
        }
        let eig = shape.clone().symmetric_eigenvalues();
        if eig.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidArgument(
                "ellipsoid shape is not positive definite".into(),
            ));
        }
        Ok(Ellipsoid {
            center: DVector::from_vec(center),
            shape,
            level,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// `(x − c)ᵀ Q⁻¹ (x − c)`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let d = DVector::from_column_slice(x) - &self.center;
        let chol = self
            .shape
            .clone()
            .cholesky()
            .expect("shape validated positive definite");
        let y = chol.solve(&d);
        d.dot(&y)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.quadratic_form(x) <= self.level + EPS_FEAS
    }

    /// `sup cᵀx = cᵀx̄ + sqrt(η cᵀQc)`.
    pub fn linear_max(&self, c: &[f64]) -> f64 {
        let c = DVector::from_column_slice(c);
        c.dot(&self.center) + (self.level * c.dot(&(&self.shape * &c))).max(0.0).sqrt()
    }

    pub fn bounding_box(&self) -> AxisBox {
        let n = self.dim();
        let half: Vec<f64> = (0..n).map(|i| (self.level * self.shape[(i, i)]).sqrt()).collect();
        AxisBox::new(
            (0..n).map(|i| self.center[i] - half[i]).collect(),
            (0..n).map(|i| self.center[i] + half[i]).collect(),
        )
        .expect("finite bounds")
    }

    /// Axis-aligned projection: the shape's principal sub-block.
    pub fn project(&self, keep: &[usize]) -> Ellipsoid {
        let k = keep.len();
        let center = keep.iter().map(|&i| self.center[i]).collect();
        let shape = DMatrix::from_fn(k, k, |r, c| self.shape[(keep[r], keep[c])]);
        Ellipsoid {
            center: DVector::from_vec(center),
            shape,
            level: self.level,
        }
    }

    /// Conditions on fixed coordinates: the remaining coordinates (ascending)
    /// form an ellipsoid whose shape is the Schur complement of `Q`.
    pub fn slice(&self, fixed: &[(usize, f64)]) -> EllipsoidSlice {
        let n = self.dim();
        let f_idx: Vec<usize> = fixed.iter().map(|(i, _)| *i).collect();
        let k_idx: Vec<usize> = (0..n).filter(|i| !f_idx.contains(i)).collect();
        let qff = DMatrix::from_fn(f_idx.len(), f_idx.len(), |r, c| self.shape[(f_idx[r], f_idx[c])]);
        let qkf = DMatrix::from_fn(k_idx.len(), f_idx.len(), |r, c| self.shape[(k_idx[r], f_idx[c])]);
        let qkk = DMatrix::from_fn(k_idx.len(), k_idx.len(), |r, c| self.shape[(k_idx[r], k_idx[c])]);
        let d = DVector::from_iterator(f_idx.len(), fixed.iter().map(|(i, v)| v - self.center[*i]));
        let chol = qff.cholesky().expect("principal block of an SPD matrix");
        let w = chol.solve(&d);
        let level = self.level - d.dot(&w);
        let center_k = DVector::from_iterator(k_idx.len(), k_idx.iter().map(|&i| self.center[i])) + &qkf * &w;
        if level < -EPS_FEAS {
            return EllipsoidSlice::Empty;
        }
        if level <= EPS_FEAS {
            return EllipsoidSlice::Point(center_k.iter().copied().collect());
        }
        let gain = chol.solve(&qkf.transpose());
        let mut shape = qkk - &qkf * gain;
        shape = (&shape + shape.transpose()) * 0.5;
        EllipsoidSlice::Ellipsoid(Ellipsoid {
            center: center_k,
            shape,
            level,
        })
    }
}
