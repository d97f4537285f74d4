//! Beacon localization in a rectilinear world.
//!
//! Scenario files:
//!
//! ```text
//! world                 bounds line `l_1 .. l_n u_1 .. u_n`, then
//!                       `obstacle l_1 .. l_n u_1 .. u_n` lines
//! sensors [octagon]     one `b_1 .. b_n sigma` line per beacon
//! motion                optional: one number, the per-step ∞-norm bound
//! measurements          `t v..` lines; the values stack every sensor's reading
//! truth                 optional: the hidden pose
//! ```
//!
//! A sensor reports the beacon-relative position `y = x − b` up to an
//! ∞-norm error of `sigma` (or the octagon circumscribing the Euclidean
//! ball when `octagon` is given and `n = 2`).

use super::{DynamicsModel, NaiveBayesModel};
use crate::error::{Error, Result};
use crate::geometry::io::{parse_numbers, Lines};
use crate::geometry::{AxisBox, HPolytope, Region, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct Sensor {
    pub beacon: Vec<f64>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: AxisBox,
    pub obstacles: Vec<AxisBox>,
    pub sensors: Vec<Sensor>,
    pub octagon: bool,
    pub motion: Option<f64>,
    pub measurements: Vec<(usize, Vec<f64>)>,
    pub truth: Option<Vec<f64>>,
}

impl Scenario {
    pub fn new(world: AxisBox, obstacles: Vec<AxisBox>, sensors: Vec<Sensor>) -> Result<Self> {
        let n = world.dim();
        if !world.is_bounded() || world.is_empty() {
            return Err(Error::InvalidArgument(
                "the world must be a bounded, nonempty box".into(),
            ));
        }
        if let Some(o) = obstacles.iter().find(|o| o.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: o.dim(),
            });
        }
        for s in &sensors {
            if s.beacon.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.beacon.len(),
                });
            }
            if !(s.sigma > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "sensor noise radius must be positive, got {}",
                    s.sigma
                )));
            }
        }
        Ok(Scenario {
            world,
            obstacles,
            sensors,
            octagon: false,
            motion: None,
            measurements: Vec::new(),
            truth: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.world.dim()
    }

    /// Width of the stacked measurement vector.
    pub fn reading_dim(&self) -> usize {
        self.dim() * self.sensors.len()
    }

    /// Noise-free readings of a pose.
    pub fn ideal_readings(&self, x: &[f64]) -> Vec<f64> {
        self.sensors
            .iter()
            .flat_map(|s| x.iter().zip(&s.beacon).map(|(a, b)| a - b))
            .collect()
    }

    /// True if `x` lies in the world and not strictly inside an obstacle.
    pub fn is_free(&self, x: &[f64]) -> bool {
        self.world.contains(x)
            && !self.obstacles.iter().any(|o| {
                x.iter()
                    .zip(o.lower().iter().zip(o.upper()))
                    .all(|(v, (l, u))| *v > *l && *v < *u)
            })
    }
}

/// Subtracts the interior of `cut` from `piece`, returning up to `2n` boxes.
fn subtract(piece: &AxisBox, cut: &AxisBox) -> Vec<AxisBox> {
    let n = piece.dim();
    let overlaps = (0..n).all(|k| piece.lower()[k] < cut.upper()[k] && cut.lower()[k] < piece.upper()[k]);
    if !overlaps {
        return vec![piece.clone()];
    }
    let mut out = Vec::new();
    let mut lo = piece.lower().to_vec();
    let mut hi = piece.upper().to_vec();
    for k in 0..n {
        if lo[k] < cut.lower()[k] {
            let mut u = hi.clone();
            u[k] = cut.lower()[k];
            out.push(AxisBox::new(lo.clone(), u).expect("ordered bounds"));
            lo[k] = cut.lower()[k];
        }
        if hi[k] > cut.upper()[k] {
            let mut l = lo.clone();
            l[k] = cut.upper()[k];
            out.push(AxisBox::new(l, hi.clone()).expect("ordered bounds"));
            hi[k] = cut.upper()[k];
        }
    }
    out
}

/// The closed free space: the world minus the obstacles' interiors, as a
/// union of boxes obtained by guillotine cuts.
pub fn free_space(world: &AxisBox, obstacles: &[AxisBox]) -> Result<Region> {
    let mut pieces = vec![world.clone()];
    for o in obstacles {
        pieces = pieces.iter().flat_map(|p| subtract(p, o)).collect();
    }
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("the obstacles cover the whole world".into()));
    }
    if pieces.len() == 1 {
        return Ok(Region::from_box(pieces.pop().expect("one piece")));
    }
    Region::union_with_dim(world.dim(), pieces.iter().map(AxisBox::to_polytope).collect())
}

/// Relation over `(x, y)` for one sensor.
pub fn sensor_relation(sensor: &Sensor, octagon: bool) -> Result<Region> {
    let n = sensor.beacon.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    // u = y − x + b, |u_k| ≤ σ
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; 2 * n];
            r[k] = -s;
            r[n + k] = s;
            rows.push(r);
            rhs.push(sensor.sigma - s * sensor.beacon[k]);
        }
    }
    if octagon {
        if n != 2 {
            return Err(Error::InvalidArgument("octagonal sensors need a 2-D world".into()));
        }
        let reach = std::f64::consts::SQRT_2 * sensor.sigma;
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                rows.push(vec![-s1, -s2, s1, s2]);
                rhs.push(reach - s1 * sensor.beacon[0] - s2 * sensor.beacon[1]);
            }
        }
    }
    Region::polytope(rows, rhs)
}

/// Relation over `(x, y_stacked)` for all sensors at once.
fn stacked_relation(s: &Scenario) -> Result<Region> {
    let n = s.dim();
    let k = s.sensors.len();
    let total = n + n * k;
    let mut p = HPolytope::unconstrained(total);
    for (j, sensor) in s.sensors.iter().enumerate() {
        let mut positions: Vec<usize> = (0..n).collect();
        positions.extend(n + j * n..n + (j + 1) * n);
        let rel = sensor_relation(sensor, s.octagon)?.embed(total, &positions)?;
        p = p.intersect(&rel.as_polytope().expect("polytopic relation"));
    }
    Ok(Region::from_polytope(p))
}

/// Prior = free space; one observation map per sensor.
pub fn build_localization_scenario(s: &Scenario) -> Result<NaiveBayesModel> {
    if s.sensors.is_empty() {
        return Err(Error::InvalidArgument("the scenario has no sensors".into()));
    }
    let prior = free_space(&s.world, &s.obstacles)?;
    let relations = s
        .sensors
        .iter()
        .map(|sensor| Ok((s.dim(), sensor_relation(sensor, s.octagon)?)))
        .collect::<Result<Vec<_>>>()?;
    NaiveBayesModel::new(prior, relations)
}

/// The scenario as a dynamical system over `horizon` steps: the state moves
/// at most `motion` per step in the ∞-norm (zero when no motion is given)
/// and always stays in free space.
pub fn scenario_dynamics(s: &Scenario, horizon: usize) -> Result<DynamicsModel> {
    if s.sensors.is_empty() {
        return Err(Error::InvalidArgument("the scenario has no sensors".into()));
    }
    let n = s.dim();
    let free = free_space(&s.world, &s.obstacles)?;
    let step = s.motion.unwrap_or(0.0);
    if !(step >= 0.0) {
        return Err(Error::InvalidArgument("the motion bound must be nonnegative".into()));
    }
    let mut rows = Vec::new();
    for k in 0..n {
        for sg in [1.0, -1.0] {
            let mut r = vec![0.0; 2 * n];
            r[k] = -sg;
            r[n + k] = sg;
            rows.push(r);
        }
    }
    let moves = Region::polytope(rows, vec![step; 2 * n])?;
    let transition = moves.intersect(&Region::full(n).product(&free)?)?;
    DynamicsModel::stationary(free, transition, s.reading_dim(), stacked_relation(s)?, horizon)
}

/// Number of connected components of a union, counting pieces that touch
/// as connected.
pub fn connected_components(r: &Region) -> Result<usize> {
    if r.is_empty() == Verdict::True {
        return Ok(0);
    }
    let pieces = r
        .pieces()
        .ok_or_else(|| Error::Unsupported("components of a non-polytopic region".into()))?;
    let pieces: Vec<HPolytope> = pieces
        .into_iter()
        .filter(|p| Region::from_polytope(p.clone()).is_empty() == Verdict::False)
        .collect();
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let meet = Region::from_polytope(pieces[i].intersect(&pieces[j]));
            if meet.is_empty() == Verdict::False {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    Ok((0..pieces.len()).filter(|&i| find(&mut parent, i) == i).count())
}

const SECTIONS: [&str; 5] = ["world", "sensors", "motion", "measurements", "truth"];

fn is_section(line: &str) -> bool {
    line.split_whitespace().next().is_some_and(|t| SECTIONS.contains(&t))
}

fn bounds(line: usize, v: &[f64]) -> Result<AxisBox> {
    if v.is_empty() || !v.len().is_multiple_of(2) {
        return Err(Error::parse(line, "expected `l_1 .. l_n u_1 .. u_n`"));
    }
    let n = v.len() / 2;
    AxisBox::new(v[..n].to_vec(), v[n..].to_vec()).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut lines = Lines::new(text);
    let mut world: Option<(usize, AxisBox)> = None;
    let mut obstacles: Vec<(usize, AxisBox)> = Vec::new();
    let mut sensors: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut octagon = false;
    let mut motion = None;
    let mut measurements: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    let mut truth: Option<(usize, Vec<f64>)> = None;

    while let Some((ln, header)) = lines.next_line() {
        let toks: Vec<&str> = header.split_whitespace().collect();
        let kind = toks[0];
        let flag_ok = kind == "sensors" && toks.len() == 2 && toks[1] == "octagon";
        if toks.len() > 1 && !flag_ok {
            return Err(Error::parse(ln, format!("unexpected text after `{kind}`")));
        }
        let mut body = Vec::new();
        while let Some((l, t)) = lines.peek() {
            if is_section(t) {
                break;
            }
            lines.next_line();
            body.push((l, t));
        }
        match kind {
            "world" => {
                if world.is_some() {
                    return Err(Error::parse(ln, "second `world` section"));
                }
                let (l, first) = *body
                    .first()
                    .ok_or_else(|| Error::parse(ln, "`world` needs a bounds line"))?;
                world = Some((l, bounds(l, &parse_numbers(l, first)?)?));
                for &(l, t) in &body[1..] {
                    let rest = t
                        .strip_prefix("obstacle")
                        .ok_or_else(|| Error::parse(l, "expected `obstacle l_1 .. l_n u_1 .. u_n`"))?;
                    obstacles.push((l, bounds(l, &parse_numbers(l, rest)?)?));
                }
            }
            "sensors" => {
                octagon |= flag_ok;
                for &(l, t) in &body {
                    sensors.push((l, parse_numbers(l, t)?));
                }
            }
            "motion" => {
                let [(l, t)] = body[..] else {
                    return Err(Error::parse(ln, "`motion` takes exactly one line"));
                };
                match parse_numbers(l, t)?[..] {
                    [v] if v >= 0.0 => motion = Some(v),
                    _ => return Err(Error::parse(l, "expected one nonnegative number")),
                }
            }
            "measurements" => {
                for &(l, t) in &body {
                    let (step, rest) = t
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::parse(l, "expected `<t> <values...>`"))?;
                    let step = step
                        .parse::<usize>()
                        .map_err(|_| Error::parse(l, format!("invalid step `{step}`")))?;
                    measurements.push((l, step, parse_numbers(l, rest)?));
                }
            }
            "truth" => {
                let [(l, t)] = body[..] else {
                    return Err(Error::parse(ln, "`truth` takes exactly one line"));
                };
                truth = Some((l, parse_numbers(l, t)?));
            }
            other => return Err(Error::parse(ln, format!("unknown section `{other}`"))),
        }
    }

    let end = lines.last_line().max(1);
    let (_, world) = world.ok_or_else(|| Error::parse(end, "no `world` section"))?;
    let n = world.dim();
    if let Some((l, _)) = obstacles.iter().find(|(_, o)| o.dim() != n) {
        return Err(Error::parse(
            *l,
            format!("obstacle dimension differs from the world's ({n})"),
        ));
    }
    let mut sens = Vec::new();
    for (l, v) in sensors {
        if v.len() != n + 1 {
            return Err(Error::parse(l, format!("expected {n} beacon coordinates and a sigma")));
        }
        if !(v[n] > 0.0) {
            return Err(Error::parse(l, "sigma must be positive"));
        }
        sens.push(Sensor {
            beacon: v[..n].to_vec(),
            sigma: v[n],
        });
    }
    if sens.is_empty() {
        return Err(Error::parse(end, "no sensors"));
    }
    let mut s = Scenario::new(world, obstacles.into_iter().map(|(_, o)| o).collect(), sens)
        .map_err(|e| Error::parse(1, e.to_string()))?;
    if octagon && n != 2 {
        return Err(Error::parse(1, "octagonal sensors need a 2-D world"));
    }
    s.octagon = octagon;
    s.motion = motion;
    let want = s.reading_dim();
    for (i, (l, t, v)) in measurements.iter().enumerate() {
        if *t != i + 1 {
            return Err(Error::parse(*l, format!("expected step {}, found {t}", i + 1)));
        }
        if v.len() != want {
            return Err(Error::parse(*l, format!("expected {want} values, found {}", v.len())));
        }
    }
    s.measurements = measurements.into_iter().map(|(_, t, v)| (t, v)).collect();
    if let Some((l, v)) = truth {
        if v.len() != n {
            return Err(Error::parse(l, format!("truth needs {n} coordinates")));
        }
        if !s.is_free(&v) {
            return Err(Error::parse(l, "truth lies outside free space"));
        }
        s.truth = Some(v);
    }
    Ok(s)
}
