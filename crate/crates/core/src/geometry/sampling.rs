//! Point samplers used by the tri-state (sampled) decision paths.

use rand::Rng;
use rand_distr::StandardNormal;

use super::aabb::AxisBox;
use super::ellipsoid::Ellipsoid;
use super::polytope::{dot, HPolytope};

/// Infinite box bounds are clipped to this magnitude before sampling.
pub const SAMPLE_BOX_LIMIT: f64 = 1e3;

/// Sample count and seed for every sampled decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 100_000,
            seed: 0,
        }
    }
}

impl Sampling {
    pub fn with_seed(seed: u64) -> Self {
        Sampling {
            seed,
            ..Sampling::default()
        }
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(-SAMPLE_BOX_LIMIT, SAMPLE_BOX_LIMIT)
}

pub fn uniform_in_box<R: Rng + ?Sized>(rng: &mut R, bounds: &AxisBox) -> Vec<f64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&l, &u)| {
            let (l, u) = (clip(l), clip(u));
            if u > l {
                rng.random_range(l..=u)
            } else {
                l
            }
        })
        .collect()
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&d, &d).sqrt();
        if norm > 1e-12 {
            return d.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// Hit-and-run walk inside `poly`, started at a feasible `start`.
pub fn hit_and_run<R: Rng + ?Sized>(rng: &mut R, poly: &HPolytope, start: &[f64], count: usize) -> Vec<Vec<f64>> {
    let n = poly.dim();
    let mut x = start.to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let d = random_direction(rng, n);
        let (mut lo, mut hi) = (-SAMPLE_BOX_LIMIT, SAMPLE_BOX_LIMIT);
        for (row, b) in poly.rows().iter().zip(poly.rhs()) {
            let ad = dot(row, &d);
            let slack = b - dot(row, &x);
            if ad > 1e-14 {
                hi = hi.min(slack / ad);
            } else if ad < -1e-14 {
                lo = lo.max(slack / ad);
            }
        }
        if hi > lo {
            let t = rng.random_range(lo..=hi);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += t * di;
            }
        }
        out.push(x.clone());
    }
    out
}

/// Uniform samples inside an ellipsoid: `c + sqrt(η) L u` for `u` uniform in the unit ball.
pub fn in_ellipsoid<R: Rng + ?Sized>(rng: &mut R, e: &Ellipsoid, count: usize) -> Vec<Vec<f64>> {
    let n = e.dim();
    let l = e
        .shape()
        .clone()
        .cholesky()
        .expect("shape validated positive definite")
        .unpack();
    let scale = e.level().sqrt();
    (0..count)
        .map(|_| {
            let dir = random_direction(rng, n);
            let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
            let u = nalgebra::DVector::from_iterator(n, dir.into_iter().map(|v| v * r * scale));
            let p = &l * u + e.center();
            p.iter().copied().collect()
        })
        .collect()
}
