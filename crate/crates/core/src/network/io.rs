//! Network files.
//!
//! ```text
//! nodes                 one `<id> <name> <dim>` line per node
//! edges                 one `<parent> <child>` line per edge (section optional)
//! factor <id>           a region block over (parents ascending, then <id>)
//! joint                 optional region block over all nodes, ids ascending
//! evidence              optional `<id> <values...>` lines
//! ```
//!
//! A file either gives one factor per node or a `joint` block (or both, in
//! which case the factors define the network and the joint is used by
//! independence queries). Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;

use super::{Dag, UncertaintyNetwork};
use crate::error::{Error, Result};
use crate::geometry::io::{parse_numbers, read_region, Lines};
use crate::geometry::Region;
use crate::uncertainty::{JointVariable, VariableSignature};

/// Parsed contents of a network file.
#[derive(Debug, Clone)]
pub struct NetworkFile {
    pub variables: BTreeMap<usize, VariableSignature>,
    pub dag: Dag,
    pub factors: BTreeMap<usize, Region>,
    pub joint: Option<Region>,
    pub evidence: Vec<(usize, Vec<f64>)>,
}

const SECTIONS: [&str; 5] = ["nodes", "edges", "factor", "joint", "evidence"];

fn is_section(line: &str) -> bool {
    line.split_whitespace().next().is_some_and(|t| SECTIONS.contains(&t))
}

fn parse_id(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid node id `{tok}`")))
}

pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let mut lines = Lines::new(text);
    let mut nodes: Vec<(usize, usize, VariableSignature)> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut factors: BTreeMap<usize, (usize, Region)> = BTreeMap::new();
    let mut joint: Option<(usize, Region)> = None;
    let mut evidence: Vec<(usize, usize, Vec<f64>)> = Vec::new();

    while let Some((ln, header)) = lines.next_line() {
        let mut toks = header.split_whitespace();
        let kind = toks.next().unwrap_or("");
        let arg = toks.next();
        if toks.next().is_some() || (arg.is_some() && kind != "factor") {
            return Err(Error::parse(ln, format!("unexpected text after `{kind}`")));
        }
        match kind {
            "nodes" => {
                while let Some((l, t)) = lines.peek() {
                    if is_section(t) {
                        break;
                    }
                    lines.next_line();
                    let parts: Vec<&str> = t.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(Error::parse(l, "expected `<id> <name> <dim>`"));
                    }
                    let id = parse_id(l, parts[0])?;
                    let dim = parts[2]
                        .parse::<usize>()
                        .map_err(|_| Error::parse(l, format!("invalid dimension `{}`", parts[2])))?;
                    let sig = VariableSignature::new(parts[1], dim).map_err(|e| Error::parse(l, e.to_string()))?;
                    nodes.push((l, id, sig));
                }
            }
            "edges" => {
                while let Some((l, t)) = lines.peek() {
                    if is_section(t) {
                        break;
                    }
                    lines.next_line();
                    let parts: Vec<&str> = t.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(Error::parse(l, "expected `<parent> <child>`"));
                    }
                    edges.push((l, parse_id(l, parts[0])?, parse_id(l, parts[1])?));
                }
            }
            "factor" => {
                let id = parse_id(ln, arg.ok_or_else(|| Error::parse(ln, "`factor` needs a node id"))?)?;
                let region = read_region(&mut lines)?;
                if factors.insert(id, (ln, region)).is_some() {
                    return Err(Error::parse(ln, format!("second factor for node {id}")));
                }
            }
            "joint" => {
                if joint.is_some() {
                    return Err(Error::parse(ln, "second `joint` block"));
                }
                joint = Some((ln, read_region(&mut lines)?));
            }
            "evidence" => {
                while let Some((l, t)) = lines.peek() {
                    if is_section(t) {
                        break;
                    }
                    lines.next_line();
                    let (id, rest) = t
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::parse(l, "expected `<id> <values...>`"))?;
                    evidence.push((l, parse_id(l, id)?, parse_numbers(l, rest)?));
                }
            }
            other => return Err(Error::parse(ln, format!("unknown section `{other}`"))),
        }
    }

    if nodes.is_empty() {
        return Err(Error::parse(lines.last_line().max(1), "no `nodes` section"));
    }
    let mut variables = BTreeMap::new();
    for (l, id, sig) in &nodes {
        if variables.insert(*id, sig.clone()).is_some() {
            return Err(Error::parse(*l, format!("node {id} declared twice")));
        }
    }
    for (l, p, c) in &edges {
        for i in [p, c] {
            if !variables.contains_key(i) {
                return Err(Error::parse(*l, format!("edge refers to unknown node {i}")));
            }
        }
    }
    let edge_line = edges.first().map(|e| e.0).unwrap_or(1);
    let dag = Dag::new(variables.keys().copied(), edges.iter().map(|&(_, p, c)| (p, c)))
        .map_err(|e| Error::parse(edge_line, e.to_string()))?;

    for (&id, (l, region)) in &factors {
        let sig = variables
            .get(&id)
            .ok_or_else(|| Error::parse(*l, format!("factor for unknown node {id}")))?;
        let expected: usize = sig.dim
            + dag
                .parents(id)
                .expect("known node")
                .iter()
                .map(|p| variables[p].dim)
                .sum::<usize>();
        if region.dim() != expected {
            return Err(Error::parse(
                *l,
                format!(
                    "factor for node {id} has dimension {}, expected {expected} (parents ascending, then the node)",
                    region.dim()
                ),
            ));
        }
    }
    if !factors.is_empty() && factors.len() != variables.len() {
        let missing = variables.keys().find(|i| !factors.contains_key(i)).unwrap();
        return Err(Error::parse(
            lines.last_line().max(1),
            format!("node {missing} has no factor"),
        ));
    }
    if factors.is_empty() && joint.is_none() {
        return Err(Error::parse(
            lines.last_line().max(1),
            "file needs factors or a `joint` block",
        ));
    }
    let total: usize = variables.values().map(|s| s.dim).sum();
    if let Some((l, r)) = &joint {
        if r.dim() != total {
            return Err(Error::parse(
                *l,
                format!("joint has dimension {}, expected {total}", r.dim()),
            ));
        }
    }
    for (l, id, v) in &evidence {
        let sig = variables
            .get(id)
            .ok_or_else(|| Error::parse(*l, format!("evidence for unknown node {id}")))?;
        if v.len() != sig.dim {
            return Err(Error::parse(
                *l,
                format!("evidence for node {id} has {} values, expected {}", v.len(), sig.dim),
            ));
        }
    }

    Ok(NetworkFile {
        variables,
        dag,
        factors: factors.into_iter().map(|(i, (_, r))| (i, r)).collect(),
        joint: joint.map(|(_, r)| r),
        evidence: evidence.into_iter().map(|(_, i, v)| (i, v)).collect(),
    })
}

impl NetworkFile {
    pub fn has_factors(&self) -> bool {
        !self.factors.is_empty()
    }

    pub fn network(&self) -> Result<UncertaintyNetwork> {
        if !self.has_factors() {
            return Err(Error::InvalidArgument(
                "the file gives a joint block but no factors".into(),
            ));
        }
        UncertaintyNetwork::new(self.dag.clone(), self.variables.clone(), self.factors.clone())
    }

    /// The `joint` block if present, otherwise the network's joint; blocks in
    /// ascending node-id order.
    pub fn joint_variable(&self) -> Result<JointVariable> {
        let sigs: Vec<VariableSignature> = self.variables.values().cloned().collect();
        match &self.joint {
            Some(r) => JointVariable::new(sigs, r.clone()),
            None => JointVariable::new(sigs, self.network()?.joint_by_id()?),
        }
    }
}
