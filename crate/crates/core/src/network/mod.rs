//! Bayesian uncertainty networks: a DAG with one factor per node, the joint
//! they define, leaf elimination, ancestral marginals, posteriors and the
//! local/global independence checks.

mod dag;
pub mod io;

use std::collections::{BTreeMap, BTreeSet};

pub use dag::{DSepQuery, Dag, Relatives};

use crate::error::{Error, Result};
use crate::geometry::{Region, Sampling, Verdict};
use crate::uncertainty::{is_conditionally_independent, ConditionalMap, JointVariable, VariableSignature, ZSamples};

/// Factor of one node.
#[derive(Debug, Clone)]
pub enum Factor {
    /// `U_i` for a root.
    Root(Region),
    /// `P_{X_i | X_pa(i)}` with parents in ascending id order.
    Conditional(ConditionalMap),
}

/// A DAG-factorized joint uncertainty set.
#[derive(Debug, Clone)]
pub struct UncertaintyNetwork {
    dag: Dag,
    variables: BTreeMap<usize, VariableSignature>,
    factors: BTreeMap<usize, Factor>,
    definiteness: BTreeMap<usize, Verdict>,
}

/// Result of one global-independence query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalCheck {
    /// `C` does not d-separate `A` and `B`, so nothing is claimed.
    NotApplicable,
    Checked(Verdict),
}

impl UncertaintyNetwork {
    /// Builds a network and checks that every non-root factor is always
    /// definite over its parents' reachable set. A factor that is provably
    /// not definite is rejected; one that is only sampled is accepted and
    /// reported by [`definiteness`](Self::definiteness).
    ///
    /// `factors[i]` is a region over `D_i` for roots and over
    /// `D_pa(i) × D_i` (parents ascending, then `i`) otherwise.
    pub fn new(
        dag: Dag,
        variables: BTreeMap<usize, VariableSignature>,
        factors: BTreeMap<usize, Region>,
    ) -> Result<Self> {
        let mut n = UncertaintyNetwork::without_definiteness_check(dag, variables, factors)?;
        for i in n.dag.canonical_order() {
            if n.dag.is_root(i)? {
                continue;
            }
            let v = n.check_definite(i)?;
            if v == Verdict::False {
                return Err(Error::NotAlwaysDefinite(i));
            }
            n.definiteness.insert(i, v);
        }
        Ok(n)
    }

    /// Same as [`new`](Self::new) but skips the always-definite check; the
    /// marginalization results do not hold for such networks.
    pub fn without_definiteness_check(
        dag: Dag,
        variables: BTreeMap<usize, VariableSignature>,
        factors: BTreeMap<usize, Region>,
    ) -> Result<Self> {
        let ids: BTreeSet<usize> = dag.nodes().iter().copied().collect();
        for set in [
            variables.keys().copied().collect::<BTreeSet<_>>(),
            factors.keys().copied().collect(),
        ] {
            if let Some(&i) = set.symmetric_difference(&ids).next() {
                return Err(if ids.contains(&i) {
                    Error::InvalidArgument(format!("node {i} has no variable or factor"))
                } else {
                    Error::UnknownNode(i)
                });
            }
        }
        let mut names = BTreeSet::new();
        for s in variables.values() {
            if !names.insert(s.name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "variable name `{}` used by more than one node",
                    s.name
                )));
            }
        }
        let mut built = BTreeMap::new();
        for (&i, region) in &factors {
            let parents = dag.parents(i)?;
            let target = variables[&i].clone();
            let factor = if parents.is_empty() {
                if region.dim() != target.dim {
                    return Err(Error::DimensionMismatch {
                        expected: target.dim,
                        found: region.dim(),
                    });
                }
                Factor::Root(region.clone())
            } else {
                let given = parents.iter().map(|p| variables[p].clone()).collect();
                Factor::Conditional(ConditionalMap::new(given, target, region.clone())?)
            };
            built.insert(i, factor);
        }
        Ok(UncertaintyNetwork {
            dag,
            variables,
            factors: built,
            definiteness: BTreeMap::new(),
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variables(&self) -> &BTreeMap<usize, VariableSignature> {
        &self.variables
    }

    pub fn factor(&self, i: usize) -> Result<&Factor> {
        self.factors.get(&i).ok_or(Error::UnknownNode(i))
    }

    /// The factor's region as stored (see [`new`](Self::new)).
    pub fn factor_region(&self, i: usize) -> Result<&Region> {
        Ok(match self.factor(i)? {
            Factor::Root(r) => r,
            Factor::Conditional(m) => m.relation(),
        })
    }

    /// Always-definite verdict per non-root node (empty when unchecked).
    pub fn definiteness(&self) -> &BTreeMap<usize, Verdict> {
        &self.definiteness
    }

    pub fn name(&self, i: usize) -> Result<&str> {
        self.variables
            .get(&i)
            .map(|s| s.name.as_str())
            .ok_or(Error::UnknownNode(i))
    }

    pub fn node_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .find(|(_, s)| s.name == name)
            .map(|(&i, _)| i)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn names(&self, ids: &[usize]) -> Result<Vec<&str>> {
        ids.iter().map(|&i| self.name(i)).collect()
    }

    /// `P_{X_i|X_pa(i)}(x) ≠ ∅` on the reachable set of the parents, which is
    /// the parent marginal of the joint over their ancestral closure.
    fn check_definite(&self, i: usize) -> Result<Verdict> {
        let m = match self.factor(i)? {
            Factor::Root(_) => return Ok(Verdict::True),
            Factor::Conditional(m) => m,
        };
        let parents: BTreeSet<usize> = self.dag.parents(i)?.iter().copied().collect();
        let closure = self.dag.ancestral_closure(&parents)?;
        let upstream = self.restricted_to(&closure)?.joint_in_order()?;
        let pa: Vec<usize> = parents.into_iter().collect();
        let reachable = upstream.marginal_joint(&self.names(&pa)?)?;
        let domain = m.relation().project(&(0..m.given_dim()).collect::<Vec<_>>());
        match domain {
            Ok(d) => reachable.uncertainty().is_subset(&d),
            Err(Error::Unsupported(_)) => {
                let s = Sampling::default();
                for x in reachable
                    .uncertainty()
                    .sample_points(crate::uncertainty::AUTO_Z_SAMPLES, s.seed)?
                {
                    if crate::uncertainty::evaluate_map(m, &x)?.is_empty_with(&s) != Verdict::False {
                        return Ok(Verdict::False);
                    }
                }
                Ok(Verdict::SampledTrue)
            }
            Err(e) => Err(e),
        }
    }

    /// The sub-network on an ancestral node set (factors kept verbatim).
    fn restricted_to(&self, keep: &BTreeSet<usize>) -> Result<UncertaintyNetwork> {
        let dag = Dag::new(
            keep.iter().copied(),
            self.dag
                .edges()
                .into_iter()
                .filter(|(p, c)| keep.contains(p) && keep.contains(c)),
        )?;
        for &i in keep {
            if self.dag.parents(i)?.iter().any(|p| !keep.contains(p)) {
                return Err(Error::NotAncestral(i));
            }
        }
        Ok(UncertaintyNetwork {
            dag,
            variables: keep.iter().map(|&i| (i, self.variables[&i].clone())).collect(),
            factors: keep.iter().map(|&i| (i, self.factors[&i].clone())).collect(),
            definiteness: self
                .definiteness
                .iter()
                .filter(|(i, _)| keep.contains(i))
                .map(|(&i, &v)| (i, v))
                .collect(),
        })
    }

    fn joint_in_order(&self) -> Result<JointVariable> {
        self.joint_along(&self.dag.canonical_order())
    }

    /// `U_{X_V}`, folding `⊗` along the canonical order; blocks follow that order.
    pub fn joint(&self) -> Result<JointVariable> {
        self.joint_in_order()
    }

    /// The joint folded along any topological `order`.
    pub fn joint_along(&self, order: &[usize]) -> Result<JointVariable> {
        if !self.dag.is_topological(order) {
            return Err(Error::InvalidArgument(
                "order is not a topological order of the graph".into(),
            ));
        }
        let mut joint: Option<JointVariable> = None;
        for &i in order {
            let sig = self.variables[&i].clone();
            joint = Some(match (&self.factors[&i], joint) {
                (Factor::Root(r), None) => JointVariable::new(vec![sig], r.clone())?,
                (Factor::Root(r), Some(j)) => {
                    let mut sigs = j.signatures().to_vec();
                    sigs.push(sig);
                    JointVariable::new(sigs, j.uncertainty().product(r)?)?
                }
                (Factor::Conditional(m), Some(j)) => j.extend(m)?,
                (Factor::Conditional(_), None) => unreachable!("the first node is a root"),
            });
        }
        joint.ok_or_else(|| Error::InvalidArgument("empty network".into()))
    }

    /// Joint region with blocks in ascending node-id order.
    pub fn joint_by_id(&self) -> Result<Region> {
        let ids: Vec<usize> = self.dag.nodes().to_vec();
        Ok(self.joint()?.reordered(&self.names(&ids)?)?.uncertainty().clone())
    }

    /// Drops leaf `j` together with its factor.
    pub fn eliminate_leaf(&self, j: usize) -> Result<UncertaintyNetwork> {
        if !self.dag.is_leaf(j)? {
            return Err(Error::NotLeaf(j));
        }
        if self.dag.nodes().len() == 1 {
            return Err(Error::InvalidArgument(
                "cannot eliminate the only node of a network".into(),
            ));
        }
        let keep: BTreeSet<usize> = self.dag.nodes().iter().copied().filter(|&i| i != j).collect();
        self.restricted_to(&keep)
    }

    /// Conjunction of the factors of an ancestral set, obtained by eliminating
    /// leaves outside it; blocks in ascending node-id order.
    pub fn marginal_ancestral(&self, a: &BTreeSet<usize>) -> Result<Region> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("empty node set".into()));
        }
        let closure = self.dag.ancestral_closure(a)?;
        if let Some(&missing) = closure.difference(a).next() {
            return Err(Error::NotAncestral(missing));
        }
        let mut net = self.clone();
        loop {
            let leaf = net
                .dag
                .nodes()
                .iter()
                .copied()
                .find(|i| !a.contains(i) && net.dag.is_leaf(*i).unwrap_or(false));
            match leaf {
                Some(j) => net = net.eliminate_leaf(j)?,
                None => break,
            }
        }
        net.joint_by_id()
    }

    fn check_evidence(&self, evidence: &[(usize, Vec<f64>)], query: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &i in evidence.iter().map(|(i, _)| i).chain(query) {
            if !self.dag.contains(i) {
                return Err(Error::UnknownNode(i));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidArgument(format!(
                    "node {i} appears more than once in evidence and query"
                )));
            }
        }
        Ok(())
    }

    /// `Π_query[U_{X_V} ∩ {x_J = y_J}]`, blocks in `query` order.
    pub fn network_posterior(&self, evidence: &[(usize, Vec<f64>)], query: &[usize]) -> Result<Region> {
        if query.is_empty() {
            return Err(Error::InvalidArgument("empty query".into()));
        }
        self.check_evidence(evidence, query)?;
        let joint = self.joint()?;
        let named: Vec<(&str, Vec<f64>)> = evidence
            .iter()
            .map(|(i, v)| Ok((self.name(*i)?, v.clone())))
            .collect::<Result<_>>()?;
        let conditioned = joint.condition_joint(&named)?;
        Ok(conditioned.marginal_joint(&self.names(query)?)?.uncertainty().clone())
    }

    /// `X_i ⫫ X_{NonDes(i) \ pa(i)} | X_pa(i)` for every node, on the joint.
    pub fn verify_local_independence(&self, sampling: &Sampling) -> Result<BTreeMap<usize, Verdict>> {
        let joint = self.joint()?;
        let mut out = BTreeMap::new();
        for &i in self.dag.nodes() {
            let rel = self.dag.relatives(i)?;
            let b: Vec<usize> = rel.non_descendants.difference(&rel.parents).copied().collect();
            if b.is_empty() {
                out.insert(i, Verdict::True);
                continue;
            }
            let c: Vec<usize> = rel.parents.iter().copied().collect();
            let mut all = vec![i];
            all.extend(&b);
            all.extend(&c);
            let sub = joint.marginal_joint(&self.names(&all)?)?;
            let v = is_conditionally_independent(
                &sub,
                &[self.name(i)?],
                &self.names(&b)?,
                &self.names(&c)?,
                &ZSamples::Auto,
                sampling,
            )?;
            out.insert(i, v);
        }
        Ok(out)
    }

    /// `X_A ⫫ X_B | X_C` on the marginal joint over `A ∪ B ∪ C`, when `C`
    /// d-separates `A` and `B`.
    pub fn verify_global_independence(&self, q: &DSepQuery, sampling: &Sampling) -> Result<GlobalCheck> {
        if !self.dag.d_separated(q)? {
            return Ok(GlobalCheck::NotApplicable);
        }
        let ids = |s: &BTreeSet<usize>| s.iter().copied().collect::<Vec<_>>();
        let (a, b, c) = (ids(&q.a), ids(&q.b), ids(&q.c));
        let all: Vec<usize> = a.iter().chain(&b).chain(&c).copied().collect();
        let sub = self.joint()?.marginal_joint(&self.names(&all)?)?;
        let v = is_conditionally_independent(
            &sub,
            &self.names(&a)?,
            &self.names(&b)?,
            &self.names(&c)?,
            &ZSamples::Auto,
            sampling,
        )?;
        Ok(GlobalCheck::Checked(v))
    }
}
