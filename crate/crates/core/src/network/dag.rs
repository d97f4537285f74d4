use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Directed acyclic graph over integer node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<usize>,
    parents: BTreeMap<usize, Vec<usize>>,
    children: BTreeMap<usize, Vec<usize>>,
}

/// Family of a node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relatives {
    pub parents: BTreeSet<usize>,
    pub descendants: BTreeSet<usize>,
    pub non_descendants: BTreeSet<usize>,
    pub ancestors: BTreeSet<usize>,
}

/// `A ⫫ B | C` query; the sets are pairwise disjoint and `A`, `B` nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSepQuery {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub c: BTreeSet<usize>,
}

impl DSepQuery {
    pub fn new(
        a: impl IntoIterator<Item = usize>,
        b: impl IntoIterator<Item = usize>,
        c: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let q = DSepQuery {
            a: a.into_iter().collect(),
            b: b.into_iter().collect(),
            c: c.into_iter().collect(),
        };
        if q.a.is_empty() || q.b.is_empty() {
            return Err(Error::InvalidArgument("A and B must be nonempty".into()));
        }
        let overlap =
            q.a.intersection(&q.b)
                .chain(q.a.intersection(&q.c))
                .chain(q.b.intersection(&q.c))
                .next();
        if let Some(&i) = overlap {
            return Err(Error::InvalidArgument(format!(
                "node {i} appears in more than one of A, B, C"
            )));
        }
        Ok(q)
    }
}

impl Dag {
    pub fn new(
        nodes: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut ids: Vec<usize> = nodes.into_iter().collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("node {} listed twice", w[0])));
        }
        let mut parents: BTreeMap<usize, Vec<usize>> = ids.iter().map(|&i| (i, Vec::new())).collect();
        let mut children = parents.clone();
        for (p, c) in edges {
            if !parents.contains_key(&p) {
                return Err(Error::UnknownNode(p));
            }
            if !parents.contains_key(&c) {
                return Err(Error::UnknownNode(c));
            }
            if p == c {
                return Err(Error::Cycle(p));
            }
            let ps = parents.get_mut(&c).unwrap();
            if ps.contains(&p) {
                return Err(Error::InvalidArgument(format!("edge {p} -> {c} listed twice")));
            }
            ps.push(p);
            children.get_mut(&p).unwrap().push(c);
        }
        for v in parents.values_mut().chain(children.values_mut()) {
            v.sort_unstable();
        }
        let dag = Dag {
            nodes: ids,
            parents,
            children,
        };
        dag.topological_order()?;
        Ok(dag)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, i: usize) -> bool {
        self.parents.contains_key(&i)
    }

    fn check(&self, i: usize) -> Result<()> {
        if self.contains(i) {
            Ok(())
        } else {
            Err(Error::UnknownNode(i))
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .flat_map(|(&p, cs)| cs.iter().map(move |&c| (p, c)))
            .collect()
    }

    /// Parents in ascending id order.
    pub fn parents(&self, i: usize) -> Result<&[usize]> {
        self.parents.get(&i).map(Vec::as_slice).ok_or(Error::UnknownNode(i))
    }

    pub fn children(&self, i: usize) -> Result<&[usize]> {
        self.children.get(&i).map(Vec::as_slice).ok_or(Error::UnknownNode(i))
    }

    pub fn is_root(&self, i: usize) -> Result<bool> {
        Ok(self.parents(i)?.is_empty())
    }

    pub fn is_leaf(&self, i: usize) -> Result<bool> {
        Ok(self.children(i)?.is_empty())
    }

    /// Kahn's algorithm with the smallest ready id taken first.
    fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indegree: BTreeMap<usize, usize> = self.parents.iter().map(|(&i, ps)| (i, ps.len())).collect();
        let mut ready: BTreeSet<usize> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&i, _)| i).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &self.children[&i] {
                let d = indegree.get_mut(&c).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != self.nodes.len() {
            let stuck = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&i, _)| i)
                .unwrap_or_default();
            return Err(Error::Cycle(stuck));
        }
        Ok(order)
    }

    /// Parents before children; ties broken by ascending node id.
    pub fn canonical_order(&self) -> Vec<usize> {
        self.topological_order().expect("acyclicity is checked at construction")
    }

    /// Whether `order` lists every node once with parents before children.
    pub fn is_topological(&self, order: &[usize]) -> bool {
        if order.len() != self.nodes.len() {
            return false;
        }
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        pos.len() == order.len()
            && self.nodes.iter().all(|i| pos.contains_key(i))
            && self.edges().iter().all(|(p, c)| pos[p] < pos[c])
    }

    fn reach(&self, start: &[usize], next: &BTreeMap<usize, Vec<usize>>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = start.iter().copied().collect();
        while let Some(i) = queue.pop_front() {
            for &j in &next[&i] {
                if seen.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    pub fn descendants(&self, i: usize) -> Result<BTreeSet<usize>> {
        self.check(i)?;
        Ok(self.reach(&[i], &self.children))
    }

    pub fn ancestors(&self, i: usize) -> Result<BTreeSet<usize>> {
        self.check(i)?;
        Ok(self.reach(&[i], &self.parents))
    }

    pub fn relatives(&self, i: usize) -> Result<Relatives> {
        let descendants = self.descendants(i)?;
        let non_descendants = self
            .nodes
            .iter()
            .copied()
            .filter(|&j| j != i && !descendants.contains(&j))
            .collect();
        Ok(Relatives {
            parents: self.parents(i)?.iter().copied().collect(),
            descendants,
            non_descendants,
            ancestors: self.ancestors(i)?,
        })
    }

    /// `an(A)`: the set together with all its ancestors.
    pub fn ancestral_closure(&self, a: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        for &i in a {
            self.check(i)?;
        }
        let start: Vec<usize> = a.iter().copied().collect();
        let mut out = self.reach(&start, &self.parents);
        out.extend(a);
        Ok(out)
    }

    pub fn is_ancestral(&self, a: &BTreeSet<usize>) -> Result<bool> {
        Ok(self.ancestral_closure(a)?.len() == a.len())
    }

    /// Reachability ("Bayes ball") test over `(node, direction)` states.
    ///
    /// A trail may continue through a non-converging node only when that node
    /// is outside `C`, and through a converging node only when the node or one
    /// of its descendants is in `C`.
    pub fn d_separated(&self, q: &DSepQuery) -> Result<bool> {
        for &i in q.a.iter().chain(&q.b).chain(&q.c) {
            self.check(i)?;
        }
        // Nodes that are in C or have a descendant in C.
        let c_or_ancestor = self.ancestral_closure(&q.c)?;

        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Dir {
            /// Arrived from a child (travelling against an edge).
            Up,
            /// Arrived from a parent (travelling along an edge).
            Down,
        }

        let mut visited: BTreeSet<(usize, Dir)> = BTreeSet::new();
        let mut queue: VecDeque<(usize, Dir)> = q.a.iter().map(|&i| (i, Dir::Up)).collect();
        while let Some((i, dir)) = queue.pop_front() {
            if !visited.insert((i, dir)) {
                continue;
            }
            let observed = q.c.contains(&i);
            if !observed && q.b.contains(&i) {
                return Ok(false);
            }
            match dir {
                Dir::Up if !observed => {
                    queue.extend(self.parents[&i].iter().map(|&p| (p, Dir::Up)));
                    queue.extend(self.children[&i].iter().map(|&c| (c, Dir::Down)));
                }
                Dir::Up => {}
                Dir::Down => {
                    if !observed {
                        queue.extend(self.children[&i].iter().map(|&c| (c, Dir::Down)));
                    }
                    if c_or_ancestor.contains(&i) {
                        queue.extend(self.parents[&i].iter().map(|&p| (p, Dir::Up)));
                    }
                }
            }
        }
        Ok(true)
    }

    /// The graph with node `i` and its edges removed.
    pub fn without(&self, i: usize) -> Result<Dag> {
        self.check(i)?;
        Dag::new(
            self.nodes.iter().copied().filter(|&j| j != i),
            self.edges().into_iter().filter(|&(p, c)| p != i && c != i),
        )
    }
}
