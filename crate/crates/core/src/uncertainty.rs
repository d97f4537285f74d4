//! Uncertainty variables, conditional maps stored as relations, the `⊗` join,
//! marginals, conditionals, Bayes' swap, information maps and independence.

use std::collections::HashSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::{Region, Sampling, Verdict};

/// Number of conditioning points drawn by [`ZSamples::Auto`].
pub const AUTO_Z_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSignature {
    pub name: String,
    pub dim: usize,
}

impl VariableSignature {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "variable `{name}` must have dimension at least 1"
            )));
        }
        Ok(VariableSignature { name, dim })
    }
}

#[derive(Debug, Clone)]
pub struct UncertaintyVariable {
    pub signature: VariableSignature,
    pub uncertainty: Region,
}

impl UncertaintyVariable {
    pub fn new(signature: VariableSignature, uncertainty: Region) -> Result<Self> {
        if uncertainty.dim() != signature.dim {
            return Err(Error::DimensionMismatch {
                expected: signature.dim,
                found: uncertainty.dim(),
            });
        }
        Ok(UncertaintyVariable { signature, uncertainty })
    }
}

/// `P_{Y|X}` stored as the relation `{(x, y) : y ∈ P_{Y|X}(x)}`; coordinates
/// are the given blocks in order, then the target block.
#[derive(Debug, Clone)]
pub struct ConditionalMap {
    given: Vec<VariableSignature>,
    target: VariableSignature,
    relation: Region,
}

impl ConditionalMap {
    pub fn new(given: Vec<VariableSignature>, target: VariableSignature, relation: Region) -> Result<Self> {
        if given.is_empty() {
            return Err(Error::InvalidArgument(
                "a conditional map needs at least one given variable".into(),
            ));
        }
        check_unique(given.iter().chain([&target]))?;
        let expected = given.iter().map(|s| s.dim).sum::<usize>() + target.dim;
        if relation.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: relation.dim(),
            });
        }
        Ok(ConditionalMap {
            given,
            target,
            relation,
        })
    }

    /// Single given variable.
    pub fn single(given: VariableSignature, target: VariableSignature, relation: Region) -> Result<Self> {
        ConditionalMap::new(vec![given], target, relation)
    }

    pub fn given(&self) -> &[VariableSignature] {
        &self.given
    }

    pub fn target(&self) -> &VariableSignature {
        &self.target
    }

    pub fn relation(&self) -> &Region {
        &self.relation
    }

    pub fn given_dim(&self) -> usize {
        self.given.iter().map(|s| s.dim).sum()
    }

    fn given_coords(&self) -> Vec<usize> {
        (0..self.given_dim()).collect()
    }

    fn target_coords(&self) -> Vec<usize> {
        let g = self.given_dim();
        (g..g + self.target.dim).collect()
    }
}

fn check_unique<'a>(sigs: impl IntoIterator<Item = &'a VariableSignature>) -> Result<()> {
    let mut seen = HashSet::new();
    for s in sigs {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "variable name `{}` used more than once",
                s.name
            )));
        }
    }
    Ok(())
}

/// `Z = (X₁, …, X_k)` with one region over the concatenated coordinates.
#[derive(Debug, Clone)]
pub struct JointVariable {
    signatures: Vec<VariableSignature>,
    uncertainty: Region,
}

impl JointVariable {
    pub fn new(signatures: Vec<VariableSignature>, uncertainty: Region) -> Result<Self> {
        if signatures.is_empty() {
            return Err(Error::InvalidArgument("a joint needs at least one variable".into()));
        }
        check_unique(&signatures)?;
        let expected: usize = signatures.iter().map(|s| s.dim).sum();
        if uncertainty.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: uncertainty.dim(),
            });
        }
        Ok(JointVariable {
            signatures,
            uncertainty,
        })
    }

    pub fn signatures(&self) -> &[VariableSignature] {
        &self.signatures
    }

    pub fn uncertainty(&self) -> &Region {
        &self.uncertainty
    }

    pub fn names(&self) -> Vec<&str> {
        self.signatures.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.uncertainty.dim()
    }

    pub fn signature(&self, name: &str) -> Result<&VariableSignature> {
        self.signatures
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Coordinate range of one named block.
    pub fn block(&self, name: &str) -> Result<Range<usize>> {
        let mut start = 0;
        for s in &self.signatures {
            if s.name == name {
                return Ok(start..start + s.dim);
            }
            start += s.dim;
        }
        Err(Error::UnknownVariable(name.to_string()))
    }

    /// Coordinates of the listed blocks, in the listed order.
    pub fn coords(&self, names: &[&str]) -> Result<Vec<usize>> {
        check_distinct(names)?;
        let mut out = Vec::new();
        for n in names {
            out.extend(self.block(n)?);
        }
        Ok(out)
    }

    fn signatures_of(&self, names: &[&str]) -> Result<Vec<VariableSignature>> {
        names.iter().map(|n| self.signature(n).cloned()).collect()
    }

    /// Projection onto the named blocks as a joint variable of its own.
    pub fn marginal_joint(&self, names: &[&str]) -> Result<JointVariable> {
        if names.is_empty() {
            return Err(Error::InvalidArgument("marginal over no variables".into()));
        }
        let coords = self.coords(names)?;
        JointVariable::new(self.signatures_of(names)?, self.uncertainty.project(&coords)?)
    }

    /// The same set with its blocks permuted into `names` order.
    pub fn reordered(&self, names: &[&str]) -> Result<JointVariable> {
        if names.len() != self.signatures.len() {
            return Err(Error::InvalidArgument(
                "reordering must list every variable exactly once".into(),
            ));
        }
        self.marginal_joint(names)
    }

    /// Slice at the evidence; the result is a joint over the remaining blocks
    /// in their original order.
    pub fn condition_joint(&self, evidence: &[(&str, Vec<f64>)]) -> Result<JointVariable> {
        let names: Vec<&str> = evidence.iter().map(|(n, _)| *n).collect();
        check_distinct(&names)?;
        let mut fixed = Vec::new();
        for (name, value) in evidence {
            let block = self.block(name)?;
            if value.len() != block.len() {
                return Err(Error::DimensionMismatch {
                    expected: block.len(),
                    found: value.len(),
                });
            }
            fixed.extend(block.zip(value.iter().copied()));
        }
        let rest: Vec<VariableSignature> = self
            .signatures
            .iter()
            .filter(|s| !names.contains(&s.name.as_str()))
            .cloned()
            .collect();
        if rest.is_empty() {
            return Err(Error::InvalidArgument(
                "evidence must leave at least one variable free".into(),
            ));
        }
        if fixed.is_empty() {
            return Ok(self.clone());
        }
        JointVariable::new(rest, self.uncertainty.slice(&fixed)?)
    }

    /// Appends `m.target`, constraining it by `m` given the existing blocks:
    /// `(U × Full) ∩ relation`, with the relation's coordinates routed to the
    /// blocks they name.
    pub fn extend(&self, m: &ConditionalMap) -> Result<JointVariable> {
        if self.block(&m.target.name).is_ok() {
            return Err(Error::InvalidArgument(format!(
                "variable `{}` already present in the joint",
                m.target.name
            )));
        }
        let mut positions = Vec::with_capacity(m.relation.dim());
        for g in &m.given {
            let sig = self.signature(&g.name)?;
            if sig.dim != g.dim {
                return Err(Error::DimensionMismatch {
                    expected: sig.dim,
                    found: g.dim,
                });
            }
            positions.extend(self.block(&g.name)?);
        }
        let n = self.dim();
        let total = n + m.target.dim;
        positions.extend(n..total);
        let lifted = m.relation.embed(total, &positions)?;
        let widened = self.uncertainty.product(&Region::full(m.target.dim))?;
        let mut signatures = self.signatures.clone();
        signatures.push(m.target.clone());
        JointVariable::new(signatures, widened.intersect(&lifted)?)
    }
}

fn check_distinct(names: &[&str]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(*n) {
            return Err(Error::InvalidArgument(format!("variable `{n}` listed twice")));
        }
    }
    Ok(())
}

/// `P_{Y|X}(x)`: the relation sliced at the given coordinates.
pub fn evaluate_map(m: &ConditionalMap, x: &[f64]) -> Result<Region> {
    if x.len() != m.given_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.given_dim(),
            found: x.len(),
        });
    }
    let fixed: Vec<(usize, f64)> = x.iter().copied().enumerate().collect();
    m.relation.slice(&fixed)
}

/// Outcome of checking a conditional map against its marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityReport {
    /// `P_{Y|X}(x) ≠ ∅` for every `x ∈ U_X`.
    pub definite: Verdict,
    /// `P_{Y|X}(x) ⊂ U_Y` for every `x ∈ U_X`.
    pub within_marginal: Verdict,
}

pub fn check_conditional_validity(m: &ConditionalMap, ux: &Region, uy: &Region) -> Result<ValidityReport> {
    check_conditional_validity_with(m, ux, uy, &Sampling::default())
}

pub fn check_conditional_validity_with(
    m: &ConditionalMap,
    ux: &Region,
    uy: &Region,
    sampling: &Sampling,
) -> Result<ValidityReport> {
    if ux.dim() != m.given_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.given_dim(),
            found: ux.dim(),
        });
    }
    if uy.dim() != m.target.dim {
        return Err(Error::DimensionMismatch {
            expected: m.target.dim,
            found: uy.dim(),
        });
    }
    let definite = match m.relation.project(&m.given_coords()) {
        Ok(domain) => ux.is_subset_with(&domain, sampling)?,
        Err(Error::Unsupported(_)) => definite_by_sampling(m, ux, sampling)?,
        Err(e) => return Err(e),
    };
    let restricted = ux.product(&Region::full(m.target.dim))?.intersect(&m.relation)?;
    let within_marginal = match restricted.project(&m.target_coords()) {
        Ok(image) => image.is_subset_with(uy, sampling)?,
        Err(Error::Unsupported(_)) => {
            // Oracle relation: spot-check sampled joint points.
            let pts = restricted.sample_points(sampling.samples, sampling.seed)?;
            let g = m.given_dim();
            let mut ok = true;
            for p in &pts {
                if !uy.contains(&p[g..])? {
                    ok = false;
                    break;
                }
            }
            if ok {
                Verdict::SampledTrue
            } else {
                Verdict::False
            }
        }
        Err(e) => return Err(e),
    };
    Ok(ValidityReport {
        definite,
        within_marginal,
    })
}

fn definite_by_sampling(m: &ConditionalMap, ux: &Region, sampling: &Sampling) -> Result<Verdict> {
    let spot = Sampling {
        samples: AUTO_Z_SAMPLES,
        seed: sampling.seed,
    };
    for x in ux.sample_points(spot.samples, spot.seed)? {
        if evaluate_map(m, &x)?.is_empty_with(sampling) != Verdict::False {
            return Ok(Verdict::False);
        }
    }
    Ok(Verdict::SampledTrue)
}

/// `U_X ⊗ P_{Y|X}`: the joint over the given blocks followed by the target.
pub fn otimes(ux: &Region, m: &ConditionalMap) -> Result<JointVariable> {
    JointVariable::new(m.given.clone(), ux.clone())?.extend(m)
}

/// `Π_names[U_Z]`.
pub fn marginal(j: &JointVariable, names: &[&str]) -> Result<Region> {
    Ok(j.marginal_joint(names)?.uncertainty)
}

/// `Π_rest[U_Z ∩ {evidence}]`, over the remaining blocks in joint order.
pub fn condition(j: &JointVariable, evidence: &[(&str, Vec<f64>)]) -> Result<Region> {
    Ok(j.condition_joint(evidence)?.uncertainty)
}

/// The conditional map `P_{target | given}` implied by a joint.
pub fn derive_conditional(j: &JointVariable, given: &[&str], target: &str) -> Result<ConditionalMap> {
    let mut names = given.to_vec();
    names.push(target);
    let sub = j.marginal_joint(&names)?;
    ConditionalMap::new(j.signatures_of(given)?, j.signature(target)?.clone(), sub.uncertainty)
}

/// `U_X ⊗ P_{Y|X} = R(U_Y ⊗ P_{X|Y})`, comparing by variable name.
pub fn bayes_swap_check(
    ux: &Region,
    m_y_given_x: &ConditionalMap,
    uy: &Region,
    m_x_given_y: &ConditionalMap,
) -> Result<Verdict> {
    let forward = otimes(ux, m_y_given_x)?;
    let backward = otimes(uy, m_x_given_y)?;
    let order = forward.names();
    let mut lhs: Vec<&str> = order.clone();
    lhs.sort_unstable();
    let mut rhs = backward.names();
    rhs.sort_unstable();
    if lhs != rhs {
        return Err(Error::InvalidArgument(
            "the two constructions involve different variables".into(),
        ));
    }
    let swapped = backward.reordered(&order)?;
    forward.uncertainty.equals(&swapped.uncertainty)
}

/// `I_{X|Y}(y) = {x : y ∈ P_{Y|X}(x)}`.
pub fn information_map(m: &ConditionalMap, y: &[f64]) -> Result<Region> {
    if y.len() != m.target.dim {
        return Err(Error::DimensionMismatch {
            expected: m.target.dim,
            found: y.len(),
        });
    }
    let g = m.given_dim();
    let fixed: Vec<(usize, f64)> = y.iter().enumerate().map(|(k, &v)| (g + k, v)).collect();
    m.relation.slice(&fixed)
}

/// `P_{X|Y}(y) = U_X ∩ I_{X|Y}(y)`; `Empty` signals inconsistent evidence.
pub fn posterior(ux: &Region, m: &ConditionalMap, y: &[f64]) -> Result<Region> {
    ux.intersect(&information_map(m, y)?)
}

fn check_partition(j: &JointVariable, sets: &[&[&str]]) -> Result<()> {
    let all: Vec<&str> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    check_distinct(&all)?;
    for n in &all {
        j.signature(n)?;
    }
    if all.len() != j.signatures.len() {
        return Err(Error::InvalidArgument(
            "variable sets must cover every variable of the joint".into(),
        ));
    }
    Ok(())
}

/// `U_{A,B} = U_A × U_B`; `a` and `b` must partition the joint's variables.
pub fn is_independent(j: &JointVariable, a: &[&str], b: &[&str]) -> Result<Verdict> {
    is_independent_with(j, a, b, &Sampling::default())
}

pub fn is_independent_with(j: &JointVariable, a: &[&str], b: &[&str], sampling: &Sampling) -> Result<Verdict> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("both variable sets must be nonempty".into()));
    }
    check_partition(j, &[a, b])?;
    let order: Vec<&str> = a.iter().chain(b).copied().collect();
    let joint = j.reordered(&order)?;
    let prod = marginal(j, a)?.product(&marginal(j, b)?)?;
    joint.uncertainty.equals_with(&prod, sampling)
}

/// Conditioning points for [`is_conditionally_independent`].
#[derive(Debug, Clone)]
pub enum ZSamples {
    /// Draw [`AUTO_Z_SAMPLES`] points from the conditioning marginal.
    Auto,
    Points(Vec<Vec<f64>>),
}

/// `P_{A,B|C}(z) = P_{A|C}(z) × P_{B|C}(z)` for every `z ∈ U_C`.
///
/// For polytopic joints this is decided exactly: the property holds iff
/// `U ⊇ {(a, b, c) : (a, c) ∈ Π_{AC} U, (b, c) ∈ Π_{BC} U}` (the reverse
/// inclusion always holds). Supplied points are still checked against the
/// conditioning marginal. Other joints are spot-checked at the points and
/// reported as [`Verdict::SampledTrue`] at best.
pub fn is_conditionally_independent(
    j: &JointVariable,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    z: &ZSamples,
    sampling: &Sampling,
) -> Result<Verdict> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("both variable sets must be nonempty".into()));
    }
    check_partition(j, &[a, b, c])?;
    if c.is_empty() {
        return is_independent_with(j, a, b, sampling);
    }
    let order: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    let joint = j.reordered(&order)?;
    let u = joint.uncertainty();
    let (da, db) = (dims(j, a)?, dims(j, b)?);
    let dc = u.dim() - da - db;
    let n = u.dim();
    let c_coords: Vec<usize> = (da + db..n).collect();

    let c_marginal = match u.project(&c_coords) {
        Ok(r) => Some(r),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let points = match z {
        ZSamples::Points(p) => p.clone(),
        ZSamples::Auto => match &c_marginal {
            Some(m) => m.sample_points(AUTO_Z_SAMPLES, sampling.seed)?,
            None => {
                return Err(Error::Unsupported(
                    "automatic conditioning points for a membership-oracle joint".into(),
                ))
            }
        },
    };
    for p in &points {
        if p.len() != dc {
            return Err(Error::DimensionMismatch {
                expected: dc,
                found: p.len(),
            });
        }
        let inside = match &c_marginal {
            Some(m) => m.contains(p)?,
            None => {
                let fixed: Vec<(usize, f64)> = c_coords.iter().copied().zip(p.iter().copied()).collect();
                u.slice(&fixed)?.is_empty_with(sampling) == Verdict::False
            }
        };
        if !inside {
            return Err(Error::SampleOutsideMarginal);
        }
    }

    if u.is_polytopic() {
        let ac: Vec<usize> = (0..da).chain(da + db..n).collect();
        let bc: Vec<usize> = (da..n).collect();
        let ac_pos: Vec<usize> = ac.clone();
        let bc_pos: Vec<usize> = bc.clone();
        let lifted_ac = u.project(&ac)?.embed(n, &ac_pos)?;
        let lifted_bc = u.project(&bc)?.embed(n, &bc_pos)?;
        let factored = lifted_ac.intersect(&lifted_bc)?;
        return factored.is_subset_with(u, sampling);
    }

    let mut verdict = Verdict::SampledTrue;
    for p in &points {
        let fixed: Vec<(usize, f64)> = c_coords.iter().copied().zip(p.iter().copied()).collect();
        let s = u.slice(&fixed)?;
        let sa = s.project(&(0..da).collect::<Vec<_>>())?;
        let sb = s.project(&(da..da + db).collect::<Vec<_>>())?;
        let v = s.equals_with(&sa.product(&sb)?, sampling)?;
        verdict = verdict.and(v);
        if verdict == Verdict::False {
            break;
        }
    }
    Ok(verdict)
}

fn dims(j: &JointVariable, names: &[&str]) -> Result<usize> {
    names.iter().map(|n| j.signature(n).map(|s| s.dim)).sum()
}

/// Every pair of variables is independent in its two-variable marginal.
pub fn pairwise_independent(j: &JointVariable) -> Result<Verdict> {
    pairwise_independent_with(j, &Sampling::default())
}

pub fn pairwise_independent_with(j: &JointVariable, sampling: &Sampling) -> Result<Verdict> {
    let names = j.names();
    if names.len() < 2 {
        return Err(Error::InvalidArgument(
            "independence needs at least two variables".into(),
        ));
    }
    let mut verdict = Verdict::True;
    for i in 0..names.len() {
        for k in (i + 1)..names.len() {
            let pair = j.marginal_joint(&[names[i], names[k]])?;
            verdict = verdict.and(is_independent_with(&pair, &[names[i]], &[names[k]], sampling)?);
            if verdict == Verdict::False {
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

/// The joint equals the product of all one-variable marginals.
pub fn totally_independent(j: &JointVariable) -> Result<Verdict> {
    totally_independent_with(j, &Sampling::default())
}

pub fn totally_independent_with(j: &JointVariable, sampling: &Sampling) -> Result<Verdict> {
    let names = j.names();
    if names.len() < 2 {
        return Err(Error::InvalidArgument(
            "independence needs at least two variables".into(),
        ));
    }
    let mut prod = marginal(j, &[names[0]])?;
    for n in &names[1..] {
        prod = prod.product(&marginal(j, &[n])?)?;
    }
    j.uncertainty.equals_with(&prod, sampling)
}
