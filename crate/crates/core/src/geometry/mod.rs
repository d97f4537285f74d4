//! Regions of `Rⁿ` and the set operations every law in the crate is built on.
//!
//! Boxes, H-polytopes and finite unions of H-polytopes are handled exactly
//! (up to the feasibility tolerance [`EPS_FEAS`]). Ellipsoids are exact for
//! membership, projection and slicing; anything that leaves that family
//! degrades to a [`MembershipOracle`] whose decisions are sampled and reported
//! through [`Verdict::SampledTrue`].

mod aabb;
mod ellipsoid;
pub mod io;
mod lp;
pub mod plot;
mod polytope;
pub mod sampling;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use aabb::AxisBox;
pub use ellipsoid::{Ellipsoid, EllipsoidSlice};
pub use lp::{solve_lp, LpOutcome, LpProblem, PIVOT_TOL};
pub use polytope::HPolytope;
pub use sampling::Sampling;

use crate::error::{Error, Result};

/// Inequalities are checked as `a·x ≤ b + EPS_FEAS`.
pub const EPS_FEAS: f64 = 1e-9;

/// Result of a decision that may have been established only by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    /// No counterexample among the samples drawn.
    SampledTrue,
}

impl Verdict {
    pub fn exact(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    /// True or sampled-true.
    pub fn holds(self) -> bool {
        !matches!(self, Verdict::False)
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Verdict::SampledTrue)
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::SampledTrue, _) | (_, Verdict::SampledTrue) => Verdict::SampledTrue,
            _ => Verdict::True,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "yes",
            Verdict::False => "no",
            Verdict::SampledTrue => "sampled-yes",
        })
    }
}

/// Supremum of a linear functional over a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    Unbounded,
    Value(f64),
}

type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A region known only through a membership test and a bounding box.
#[derive(Clone)]
pub struct MembershipOracle {
    predicate: Predicate,
    bounds: AxisBox,
}

impl MembershipOracle {
    pub fn new<F>(bounds: AxisBox, predicate: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        MembershipOracle {
            predicate: Arc::new(predicate),
            bounds,
        }
    }

    pub fn bounds(&self) -> &AxisBox {
        &self.bounds
    }

    pub fn test(&self, x: &[f64]) -> bool {
        self.bounds.contains(x) && (self.predicate)(x)
    }
}

impl fmt::Debug for MembershipOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MembershipOracle")
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    Empty,
    Full,
    Box(AxisBox),
    Polytope(HPolytope),
    Union(Vec<HPolytope>),
    Ellipsoid(Ellipsoid),
    Oracle(MembershipOracle),
}

/// A subset of `Rⁿ`.
#[derive(Debug, Clone)]
pub struct Region {
    dim: usize,
    body: Body,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidArgument("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        })
    } else {
        Ok(())
    }
}

impl Region {
    pub fn empty(dim: usize) -> Self {
        Region { dim, body: Body::Empty }
    }

    pub fn full(dim: usize) -> Self {
        Region { dim, body: Body::Full }
    }

    pub fn from_box(b: AxisBox) -> Self {
        if b.is_empty() {
            return Region::empty(b.dim());
        }
        Region {
            dim: b.dim(),
            body: Body::Box(b),
        }
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Ok(Region::from_box(AxisBox::new(lower, upper)?))
    }

    /// The interval `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::boxed(vec![lo], vec![hi]).expect("one-dimensional box")
    }

    pub fn from_polytope(p: HPolytope) -> Self {
        Region {
            dim: p.dim(),
            body: Body::Polytope(p),
        }
    }

    pub fn polytope(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        Ok(Region::from_polytope(HPolytope::new(rows, rhs)?))
    }

    pub fn union(pieces: Vec<HPolytope>) -> Result<Self> {
        let dim = pieces
            .first()
            .map(HPolytope::dim)
            .ok_or_else(|| Error::InvalidArgument("union needs at least one piece".into()))?;
        Region::union_with_dim(dim, pieces)
    }

    pub fn union_with_dim(dim: usize, pieces: Vec<HPolytope>) -> Result<Self> {
        check_dim(dim)?;
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Region {
            dim,
            body: Body::Union(pieces),
        })
    }

    /// One-dimensional ellipsoids are stored as their (exact) interval.
    pub fn from_ellipsoid(e: Ellipsoid) -> Self {
        if e.dim() == 1 {
            return Region::from_box(e.bounding_box());
        }
        Region {
            dim: e.dim(),
            body: Body::Ellipsoid(e),
        }
    }

    pub fn from_oracle(o: MembershipOracle) -> Self {
        Region {
            dim: o.bounds().dim(),
            body: Body::Oracle(o),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    /// Box, polytope, union, `Empty` or `Full`: everything decided exactly.
    pub fn is_polytopic(&self) -> bool {
        !matches!(self.body, Body::Ellipsoid(_) | Body::Oracle(_))
    }

    pub fn is_full(&self) -> bool {
        match &self.body {
            Body::Full => true,
            Body::Polytope(p) => p.is_empty_system(),
            Body::Box(b) => b.lower().iter().chain(b.upper()).all(|v| v.is_infinite()),
            _ => false,
        }
    }

    /// Exact convex pieces; `None` for ellipsoids and oracles.
    pub fn pieces(&self) -> Option<Vec<HPolytope>> {
        match &self.body {
            Body::Empty => Some(Vec::new()),
            Body::Full => Some(vec![HPolytope::unconstrained(self.dim)]),
            Body::Box(b) => Some(vec![b.to_polytope()]),
            Body::Polytope(p) => Some(vec![p.clone()]),
            Body::Union(ps) => Some(ps.clone()),
            Body::Ellipsoid(_) | Body::Oracle(_) => None,
        }
    }

    /// Single convex polytope form, for box/polytope/full bodies.
    pub fn as_polytope(&self) -> Option<HPolytope> {
        match &self.body {
            Body::Full => Some(HPolytope::unconstrained(self.dim)),
            Body::Box(b) => Some(b.to_polytope()),
            Body::Polytope(p) => Some(p.clone()),
            _ => None,
        }
    }

    fn from_pieces(dim: usize, mut pieces: Vec<HPolytope>) -> Region {
        pieces.retain(|p| !p.is_infeasible());
        match pieces.len() {
            0 => Region::empty(dim),
            1 => Region::from_polytope(pieces.pop().unwrap()).simplified(),
            _ => Region {
                dim,
                body: Body::Union(pieces),
            },
        }
    }

    /// Same set with redundant rows and empty union pieces removed.
    pub fn reduced(&self) -> Region {
        match &self.body {
            Body::Polytope(_) | Body::Union(_) => Region::from_pieces(
                self.dim,
                self.pieces()
                    .expect("polytopic")
                    .iter()
                    .map(HPolytope::without_redundant_rows)
                    .collect(),
            ),
            _ => self.clone(),
        }
    }

    /// Rewrites zero-row polytopes as `Full`.
    fn simplified(self) -> Region {
        match &self.body {
            Body::Polytope(p) if p.is_empty_system() => Region::full(self.dim),
            _ => self,
        }
    }

    fn to_oracle(&self) -> Result<MembershipOracle> {
        let bounds = match self.bounding_box()? {
            Some(b) => b,
            None => AxisBox::new(vec![1.0; self.dim], vec![0.0; self.dim])?,
        };
        let me = self.clone();
        Ok(MembershipOracle::new(bounds, move |x| me.contains(x).unwrap_or(false)))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_point(self.dim, x)?;
        Ok(match &self.body {
            Body::Empty => false,
            Body::Full => true,
            Body::Box(b) => b.contains(x),
            Body::Polytope(p) => p.contains(x),
            Body::Union(ps) => ps.iter().any(|p| p.contains(x)),
            Body::Ellipsoid(e) => e.contains(x),
            Body::Oracle(o) => o.test(x),
        })
    }

    pub fn is_empty(&self) -> Verdict {
        self.is_empty_with(&Sampling::default())
    }

    pub fn is_empty_with(&self, sampling: &Sampling) -> Verdict {
        match &self.body {
            Body::Empty => Verdict::True,
            Body::Full | Body::Ellipsoid(_) => Verdict::False,
            Body::Box(b) => Verdict::exact(b.is_empty()),
            Body::Polytope(p) => Verdict::exact(p.is_infeasible()),
            Body::Union(ps) => Verdict::exact(ps.iter().all(HPolytope::is_infeasible)),
            Body::Oracle(o) => {
                if o.bounds().is_empty() {
                    return Verdict::True;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
                let hit = (0..sampling.samples).any(|_| {
                    let x = sampling::uniform_in_box(&mut rng, o.bounds());
                    o.test(&x)
                });
                if hit {
                    Verdict::False
                } else {
                    Verdict::SampledTrue
                }
            }
        }
    }

    fn check_keep(&self, keep: &[usize]) -> Result<()> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("projection keeps no coordinates".into()));
        }
        for (k, &i) in keep.iter().enumerate() {
            if i >= self.dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
            if keep[..k].contains(&i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(())
    }

    /// Projection onto the listed coordinates; the result's coordinates follow
    /// the order of `keep`, so this also permutes.
    pub fn project(&self, keep: &[usize]) -> Result<Region> {
        self.check_keep(keep)?;
        let k = keep.len();
        let identity = k == self.dim && keep.iter().enumerate().all(|(i, &j)| i == j);
        if identity {
            return Ok(self.clone());
        }
        Ok(match &self.body {
            Body::Empty => Region::empty(k),
            Body::Full => Region::full(k),
            Body::Box(b) => Region::from_box(b.select(keep)),
            Body::Polytope(p) => match p.project(keep) {
                None => Region::empty(k),
                Some(q) => Region::from_polytope(q).simplified(),
            },
            Body::Union(ps) => {
                let projected = ps.iter().filter_map(|p| p.project(keep)).collect();
                Region::from_pieces(k, projected)
            }
            Body::Ellipsoid(e) => Region::from_ellipsoid(e.project(keep)),
            Body::Oracle(_) => return Err(Error::Unsupported("projection of a membership-oracle region".into())),
        })
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let dim = self.dim;
        Ok(match (&self.body, &other.body) {
            (Body::Empty, _) | (_, Body::Empty) => Region::empty(dim),
            (Body::Full, _) => other.clone(),
            (_, Body::Full) => self.clone(),
            (Body::Box(a), Body::Box(b)) => Region::from_box(a.intersect(b)),
            (Body::Ellipsoid(_) | Body::Oracle(_), _) | (_, Body::Ellipsoid(_) | Body::Oracle(_)) => {
                let a = self.to_oracle()?;
                let b = other.to_oracle()?;
                let bounds = a.bounds().intersect(b.bounds());
                if bounds.is_empty() {
                    return Ok(Region::empty(dim));
                }
                Region::from_oracle(MembershipOracle::new(bounds, move |x| a.test(x) && b.test(x)))
            }
            _ => {
                let lhs = self.pieces().expect("polytopic");
                let rhs = other.pieces().expect("polytopic");
                let mut out = Vec::with_capacity(lhs.len() * rhs.len());
                for p in &lhs {
                    for q in &rhs {
                        out.push(p.intersect(q));
                    }
                }
                let is_union = matches!(self.body, Body::Union(_)) || matches!(other.body, Body::Union(_));
                if is_union {
                    Region::from_pieces(dim, out)
                } else {
                    let p = out.pop().expect("one piece");
                    if p.is_infeasible() {
                        Region::empty(dim)
                    } else {
                        Region::from_polytope(p)
                    }
                }
            }
        })
    }

    /// Cartesian product; `self` supplies the leading coordinates.
    pub fn product(&self, other: &Region) -> Result<Region> {
        let dim = self.dim + other.dim;
        Ok(match (&self.body, &other.body) {
            (Body::Empty, _) | (_, Body::Empty) => Region::empty(dim),
            (Body::Full, Body::Full) => Region::full(dim),
            (Body::Box(a), Body::Box(b)) => Region::from_box(a.product(b)),
            (Body::Full, Body::Box(b)) => Region::from_box(AxisBox::unbounded(self.dim).product(b)),
            (Body::Box(a), Body::Full) => Region::from_box(a.product(&AxisBox::unbounded(other.dim))),
            (Body::Ellipsoid(_) | Body::Oracle(_), _) | (_, Body::Ellipsoid(_) | Body::Oracle(_)) => {
                let a = self.to_oracle()?;
                let b = other.to_oracle()?;
                let split = self.dim;
                let bounds = a.bounds().product(b.bounds());
                Region::from_oracle(MembershipOracle::new(bounds, move |x| {
                    a.test(&x[..split]) && b.test(&x[split..])
                }))
            }
            _ => {
                let lhs = self.pieces().expect("polytopic");
                let rhs = other.pieces().expect("polytopic");
                let mut out = Vec::new();
                for p in &lhs {
                    for q in &rhs {
                        out.push(p.product(q));
                    }
                }
                if out.len() == 1 {
                    Region::from_polytope(out.pop().unwrap()).simplified()
                } else {
                    Region::from_pieces(dim, out)
                }
            }
        })
    }

    /// Places this region's coordinates at `positions` inside `Rᵈⁱᵐ`, leaving
    /// the other coordinates free.
    pub fn embed(&self, dim: usize, positions: &[usize]) -> Result<Region> {
        if positions.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: positions.len(),
            });
        }
        for (k, &p) in positions.iter().enumerate() {
            if p >= dim {
                return Err(Error::IndexOutOfRange { index: p, dim });
            }
            if positions[..k].contains(&p) {
                return Err(Error::DuplicateIndex(p));
            }
        }
        Ok(match &self.body {
            Body::Empty => Region::empty(dim),
            Body::Full => Region::full(dim),
            Body::Box(b) => {
                let mut lower = vec![f64::NEG_INFINITY; dim];
                let mut upper = vec![f64::INFINITY; dim];
                for (k, &p) in positions.iter().enumerate() {
                    lower[p] = b.lower()[k];
                    upper[p] = b.upper()[k];
                }
                Region::from_box(AxisBox::new(lower, upper)?)
            }
            Body::Polytope(p) => Region::from_polytope(p.embed(dim, positions)),
            Body::Union(ps) => Region {
                dim,
                body: Body::Union(ps.iter().map(|p| p.embed(dim, positions)).collect()),
            },
            Body::Ellipsoid(_) | Body::Oracle(_) => {
                let inner = self.to_oracle()?;
                let mut lower = vec![f64::NEG_INFINITY; dim];
                let mut upper = vec![f64::INFINITY; dim];
                for (k, &p) in positions.iter().enumerate() {
                    lower[p] = inner.bounds().lower()[k];
                    upper[p] = inner.bounds().upper()[k];
                }
                let pos = positions.to_vec();
                Region::from_oracle(MembershipOracle::new(AxisBox::new(lower, upper)?, move |x| {
                    let sub: Vec<f64> = pos.iter().map(|&p| x[p]).collect();
                    inner.test(&sub)
                }))
            }
        })
    }

    /// Fixes coordinates to values; the result lives on the remaining
    /// coordinates in ascending order.
    pub fn slice(&self, fixed: &[(usize, f64)]) -> Result<Region> {
        for (k, &(i, v)) in fixed.iter().enumerate() {
            if i >= self.dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
            if fixed[..k].iter().any(|(j, _)| *j == i) {
                return Err(Error::DuplicateIndex(i));
            }
            if v.is_nan() {
                return Err(Error::InvalidArgument("NaN slice value".into()));
            }
        }
        if fixed.len() >= self.dim {
            return Err(Error::InvalidArgument(
                "slice must leave at least one free coordinate".into(),
            ));
        }
        let free: Vec<usize> = (0..self.dim).filter(|i| !fixed.iter().any(|(j, _)| j == i)).collect();
        let k = free.len();
        Ok(match &self.body {
            Body::Empty => Region::empty(k),
            Body::Full => Region::full(k),
            Body::Box(b) => {
                let outside = fixed
                    .iter()
                    .any(|&(i, v)| v < b.lower()[i] - EPS_FEAS || v > b.upper()[i] + EPS_FEAS);
                if outside {
                    Region::empty(k)
                } else {
                    Region::from_box(b.select(&free))
                }
            }
            Body::Polytope(p) => match p.substitute(fixed) {
                None => Region::empty(k),
                Some(q) if q.is_infeasible() => Region::empty(k),
                Some(q) => Region::from_polytope(q).simplified(),
            },
            Body::Union(ps) => Region::from_pieces(k, ps.iter().filter_map(|p| p.substitute(fixed)).collect()),
            Body::Ellipsoid(e) => match e.slice(fixed) {
                EllipsoidSlice::Empty => Region::empty(k),
                EllipsoidSlice::Point(c) => Region::from_box(AxisBox::new(c.clone(), c)?),
                EllipsoidSlice::Ellipsoid(e) => Region::from_ellipsoid(e),
            },
            Body::Oracle(o) => {
                let outside = fixed
                    .iter()
                    .any(|&(i, v)| v < o.bounds().lower()[i] - EPS_FEAS || v > o.bounds().upper()[i] + EPS_FEAS);
                if outside {
                    return Ok(Region::empty(k));
                }
                let inner = o.clone();
                let fixed = fixed.to_vec();
                let n = self.dim;
                let free_c = free.clone();
                Region::from_oracle(MembershipOracle::new(o.bounds().select(&free), move |x| {
                    let mut full = vec![0.0; n];
                    for (k, &i) in free_c.iter().enumerate() {
                        full[i] = x[k];
                    }
                    for &(i, v) in &fixed {
                        full[i] = v;
                    }
                    inner.test(&full)
                }))
            }
        })
    }

    pub fn linear_max(&self, c: &[f64]) -> Result<Support> {
        check_point(self.dim, c)?;
        Ok(match &self.body {
            Body::Empty => Support::Empty,
            Body::Full => {
                if c.iter().all(|v| *v == 0.0) {
                    Support::Value(0.0)
                } else {
                    Support::Unbounded
                }
            }
            Body::Box(b) => {
                let v = b.linear_max(c);
                if v.is_infinite() {
                    Support::Unbounded
                } else {
                    Support::Value(v)
                }
            }
            Body::Polytope(p) => polytope_support(p, c),
            Body::Union(ps) => {
                let mut best = Support::Empty;
                for p in ps {
                    best = match (best, polytope_support(p, c)) {
                        (Support::Unbounded, _) | (_, Support::Unbounded) => Support::Unbounded,
                        (Support::Empty, s) | (s, Support::Empty) => s,
                        (Support::Value(a), Support::Value(b)) => Support::Value(a.max(b)),
                    };
                }
                best
            }
            Body::Ellipsoid(e) => Support::Value(e.linear_max(c)),
            Body::Oracle(_) => {
                return Err(Error::Unsupported(
                    "linear maximization over a membership-oracle region".into(),
                ))
            }
        })
    }

    /// Tight axis-aligned bounds; `None` for an empty region.
    pub fn bounding_box(&self) -> Result<Option<AxisBox>> {
        let n = self.dim;
        Ok(match &self.body {
            Body::Empty => None,
            Body::Full => Some(AxisBox::unbounded(n)),
            Body::Box(b) => (!b.is_empty()).then(|| b.clone()),
            Body::Ellipsoid(e) => Some(e.bounding_box()),
            Body::Oracle(o) => (!o.bounds().is_empty()).then(|| o.bounds().clone()),
            Body::Polytope(_) | Body::Union(_) => {
                let mut lower = vec![0.0; n];
                let mut upper = vec![0.0; n];
                for i in 0..n {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    upper[i] = match self.linear_max(&e)? {
                        Support::Empty => return Ok(None),
                        Support::Unbounded => f64::INFINITY,
                        Support::Value(v) => v,
                    };
                    e[i] = -1.0;
                    lower[i] = match self.linear_max(&e)? {
                        Support::Empty => return Ok(None),
                        Support::Unbounded => f64::NEG_INFINITY,
                        Support::Value(v) => -v,
                    };
                }
                Some(AxisBox::new(lower, upper)?)
            }
        })
    }

    /// Draws points inside the region (hit-and-run for polytopic pieces,
    /// direct sampling for ellipsoids, rejection for oracles).
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match &self.body {
            Body::Empty => Vec::new(),
            Body::Ellipsoid(e) => sampling::in_ellipsoid(&mut rng, e, count),
            Body::Oracle(o) => {
                if o.bounds().is_empty() {
                    return Ok(Vec::new());
                }
                (0..count)
                    .map(|_| sampling::uniform_in_box(&mut rng, o.bounds()))
                    .filter(|x| o.test(x))
                    .collect()
            }
            _ => {
                let pieces: Vec<HPolytope> = self
                    .pieces()
                    .expect("polytopic")
                    .into_iter()
                    .filter(|p| !p.is_infeasible())
                    .collect();
                if pieces.is_empty() {
                    return Ok(Vec::new());
                }
                let per = count.div_ceil(pieces.len());
                let mut out = Vec::with_capacity(count);
                for p in &pieces {
                    let start = match p.chebyshev_center(sampling::SAMPLE_BOX_LIMIT) {
                        Some((c, _)) => c,
                        None => continue,
                    };
                    out.extend(sampling::hit_and_run(&mut rng, p, &start, per));
                }
                out.truncate(count);
                out
            }
        })
    }

    pub fn is_subset(&self, other: &Region) -> Result<Verdict> {
        self.is_subset_with(other, &Sampling::default())
    }

    pub fn is_subset_with(&self, other: &Region, sampling: &Sampling) -> Result<Verdict> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if matches!(other.body, Body::Full) {
            return Ok(Verdict::True);
        }
        if self.is_polytopic() && self.is_empty() == Verdict::True {
            return Ok(Verdict::True);
        }
        if let Body::Empty = other.body {
            return Ok(match self.is_empty_with(sampling) {
                Verdict::True => Verdict::True,
                Verdict::False => Verdict::False,
                Verdict::SampledTrue => Verdict::SampledTrue,
            });
        }
        let exact_rhs = other.as_polytope().filter(|_| !matches!(self.body, Body::Oracle(_)));
        if let Some(target) = exact_rhs {
            for (row, b) in target.rows().iter().zip(target.rhs()) {
                match self.linear_max(row)? {
                    Support::Empty => return Ok(Verdict::True),
                    Support::Unbounded => return Ok(Verdict::False),
                    Support::Value(v) => {
                        if v > b + EPS_FEAS {
                            return Ok(Verdict::False);
                        }
                    }
                }
            }
            return Ok(Verdict::True);
        }
        // Union target: exact when every piece fits inside a single target piece.
        if let (Some(mine), Some(theirs)) = (self.pieces(), other.pieces()) {
            let covered = mine.iter().all(|p| {
                let p = Region::from_polytope(p.clone());
                p.is_empty() == Verdict::True
                    || theirs
                        .iter()
                        .any(|q| matches!(p.is_subset(&Region::from_polytope(q.clone())), Ok(Verdict::True)))
            });
            if covered {
                return Ok(Verdict::True);
            }
        }
        // Sampled path.
        let points = self.sample_points(sampling.samples, sampling.seed)?;
        for x in &points {
            if !other.contains(x)? {
                return Ok(Verdict::False);
            }
        }
        Ok(Verdict::SampledTrue)
    }

    /// Double inclusion.
    pub fn equals(&self, other: &Region) -> Result<Verdict> {
        self.equals_with(other, &Sampling::default())
    }

    pub fn equals_with(&self, other: &Region, sampling: &Sampling) -> Result<Verdict> {
        let a = self.is_subset_with(other, sampling)?;
        if a == Verdict::False {
            return Ok(a);
        }
        Ok(a.and(other.is_subset_with(self, sampling)?))
    }
}

fn polytope_support(p: &HPolytope, c: &[f64]) -> Support {
    match p.maximize(c) {
        LpOutcome::Optimal { value, .. } => Support::Value(value),
        LpOutcome::Unbounded => Support::Unbounded,
        LpOutcome::Infeasible => Support::Empty,
    }
}

pub fn contains(r: &Region, x: &[f64]) -> Result<bool> {
    r.contains(x)
}

pub fn is_empty(r: &Region) -> Verdict {
    r.is_empty()
}

pub fn project(r: &Region, keep: &[usize]) -> Result<Region> {
    r.project(keep)
}

pub fn intersect(a: &Region, b: &Region) -> Result<Region> {
    a.intersect(b)
}

pub fn product(a: &Region, b: &Region) -> Result<Region> {
    a.product(b)
}

pub fn slice(r: &Region, fixed: &[(usize, f64)]) -> Result<Region> {
    r.slice(fixed)
}

pub fn linear_max(r: &Region, c: &[f64]) -> Result<Support> {
    r.linear_max(c)
}

pub fn is_subset(a: &Region, b: &Region) -> Result<Verdict> {
    a.is_subset(b)
}

pub fn regions_equal(a: &Region, b: &Region) -> Result<Verdict> {
    a.equals(b)
}

#[cfg(test)]
mod tests;
