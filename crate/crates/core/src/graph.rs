//! Chain-graph representation and structural queries.
//!
//! A [`ChainGraph`] is an immutable value: node and edge sets are fixed at
//! construction and every transform builds a new graph. Nodes are stored in
//! name order, so a node's index also gives its rank in sorted order and
//! every iteration over a [`NodeSet`] visits names alphabetically.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

/// Role of a node in a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Variable,
    Error,
    Selection,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Variable => "variable",
            NodeKind::Error => "error",
            NodeKind::Selection => "selection",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "variable" => Ok(NodeKind::Variable),
            "error" => Ok(NodeKind::Error),
            "selection" => Ok(NodeKind::Selection),
            other => Err(format!("unknown node kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn new(name: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            name: name.into(),
            kind,
        }
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Node::new(name, NodeKind::Variable)
    }

    /// The error node attached to variable `var`.
    pub fn error_of(var: &str) -> Self {
        Node::new(error_name(var), NodeKind::Error)
    }

    /// The selection node standing in for the undirected edge between two error nodes.
    pub fn selection_of(e1: &str, e2: &str) -> Self {
        Node::new(selection_name(e1, e2), NodeKind::Selection)
    }
}

/// Rendered name of the error node of `var`: `eps(var)`.
pub fn error_name(var: &str) -> String {
    format!("eps({var})")
}

/// Inverse of [`error_name`].
pub fn variable_of_error(name: &str) -> Option<&str> {
    name.strip_prefix("eps(")?.strip_suffix(')')
}

/// Rendered name of the selection node for an unordered pair of error nodes.
pub fn selection_name(e1: &str, e2: &str) -> String {
    let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
    format!("sel({lo},{hi})")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Directed,
    Undirected,
}

/// An edge between two named nodes.
///
/// Directed edges keep `(tail, head)`; undirected edges store their endpoints
/// in lexicographic order so that `A -- B` and `B -- A` compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    kind: EdgeKind,
    a: String,
    b: String,
}

impl Edge {
    pub fn directed(tail: impl Into<String>, head: impl Into<String>) -> Self {
        Edge {
            kind: EdgeKind::Directed,
            a: tail.into(),
            b: head.into(),
        }
    }

    pub fn undirected(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Edge {
            kind: EdgeKind::Undirected,
            a,
            b,
        }
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    /// Endpoints; `(tail, head)` for directed edges.
    pub fn endpoints(&self) -> (&str, &str) {
        (&self.a, &self.b)
    }

    pub fn is_directed(&self) -> bool {
        self.kind == EdgeKind::Directed
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EdgeKind::Directed => write!(f, "{} -> {}", self.a, self.b),
            EdgeKind::Undirected => write!(f, "{} -- {}", self.a, self.b),
        }
    }
}

/// A set of node indices of one particular graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(BTreeSet<usize>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    pub fn singleton(i: usize) -> Self {
        NodeSet(BTreeSet::from([i]))
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn remove(&mut self, i: usize) -> bool {
        self.0.remove(&i)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Membership vector of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for i in self.iter() {
            m[i] = true;
        }
        m
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl Extend<usize> for NodeSet {
    fn extend<T: IntoIterator<Item = usize>>(&mut self, iter: T) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Induced subgraph `a -> b -- c` with `a` and `c` non-adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// A reason a graph fails to be a chain graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    SelfLoop(String),
    UnknownEndpoint { edge: String, node: String },
    MultipleEdges { a: String, b: String },
    /// Nodes of the connectivity components that a semidirected cycle runs through.
    SemidirectedCycle(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop(n) => write!(f, "self-loop at {n}"),
            Violation::UnknownEndpoint { edge, node } => {
                write!(f, "edge {edge} references unknown node {node}")
            }
            Violation::MultipleEdges { a, b } => write!(f, "more than one edge between {a} and {b}"),
            Violation::SemidirectedCycle(nodes) => {
                write!(f, "semidirected cycle through {}", nodes.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: BTreeSet<Edge>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
}

impl PartialEq for ChainGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for ChainGraph {}

impl ChainGraph {
    /// Builds a graph from nodes and edges.
    ///
    /// Only node identity is checked here (names non-empty, free of
    /// whitespace, unique). Edge problems such as self-loops, dangling
    /// endpoints or semidirected cycles are kept and surface through
    /// [`ChainGraph::validate`]; malformed edges are left out of the
    /// adjacency used by the queries.
    pub fn new(
        nodes: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut nodes: Vec<Node> = nodes.into_iter().collect();
        nodes.sort();
        for w in nodes.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::Structure(format!("duplicate node `{}`", w[0].name)));
            }
        }
        for n in &nodes {
            if n.name.is_empty() || n.name.chars().any(char::is_whitespace) {
                return Err(Error::Structure(format!("invalid node name `{}`", n.name)));
            }
        }
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.clone(), i))
            .collect();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();

        let n = nodes.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut neighbors = vec![Vec::new(); n];
        for e in &edges {
            let (Some(&a), Some(&b)) = (index.get(&e.a), index.get(&e.b)) else {
                continue;
            };
            if a == b {
                continue;
            }
            match e.kind {
                EdgeKind::Directed => {
                    parents[b].push(a);
                    children[a].push(b);
                }
                EdgeKind::Undirected => {
                    neighbors[a].push(b);
                    neighbors[b].push(a);
                }
            }
        }
        for v in parents
            .iter_mut()
            .chain(children.iter_mut())
            .chain(neighbors.iter_mut())
        {
            v.sort_unstable();
            v.dedup();
        }

        Ok(ChainGraph {
            nodes,
            index,
            edges,
            parents,
            children,
            neighbors,
        })
    }

    pub fn empty() -> Self {
        ChainGraph::new([], []).expect("empty graph is well formed")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i].name
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.nodes[i].kind
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Resolves names to a node set, failing on the first unknown name.
    pub fn set<I, S>(&self, names: I) -> Result<NodeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| self.require(n.as_ref()))
            .collect()
    }

    pub fn names<'a>(&'a self, set: &NodeSet) -> Vec<&'a str> {
        set.iter().map(|i| self.name(i)).collect()
    }

    pub fn name_set(&self, set: &NodeSet) -> BTreeSet<String> {
        set.iter().map(|i| self.name(i).to_string()).collect()
    }

    pub fn all_nodes(&self) -> NodeSet {
        (0..self.node_count()).collect()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> NodeSet {
        (0..self.node_count()).filter(|&i| self.kind(i) == kind).collect()
    }

    /// Directed parents of a single node, sorted.
    pub fn parents_of(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children_of(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Undirected neighbours of a single node, sorted.
    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn has_directed(&self, tail: usize, head: usize) -> bool {
        self.children[tail].binary_search(&head).is_ok()
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_directed(a, b) || self.has_directed(b, a) || self.has_undirected(a, b)
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_directed())
    }

    pub fn undirected_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_directed())
    }

    pub fn has_undirected_edges(&self) -> bool {
        self.neighbors.iter().any(|n| !n.is_empty())
    }

    fn check_set(&self, x: &NodeSet) -> Result<()> {
        match x.iter().find(|&i| i >= self.node_count()) {
            Some(i) => Err(Error::Query(format!("node index {i} out of range"))),
            None => Ok(()),
        }
    }

    /// Lists every reason this graph is not a chain graph; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut pairs: HashMap<(&str, &str), usize> = HashMap::new();
        for e in &self.edges {
            let (a, b) = e.endpoints();
            if a == b {
                out.push(Violation::SelfLoop(a.to_string()));
                continue;
            }
            for end in [a, b] {
                if !self.contains(end) {
                    out.push(Violation::UnknownEndpoint {
                        edge: e.to_string(),
                        node: end.to_string(),
                    });
                }
            }
            let key = if a < b { (a, b) } else { (b, a) };
            *pairs.entry(key).or_default() += 1;
        }
        let mut multi: Vec<_> = pairs.into_iter().filter(|&(_, c)| c > 1).collect();
        multi.sort();
        out.extend(multi.into_iter().map(|((a, b), _)| Violation::MultipleEdges {
            a: a.to_string(),
            b: b.to_string(),
        }));
        out.extend(self.semidirected_cycles());
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Contracts connectivity components and reports every strongly connected
    /// part of the directed quotient that contains a cycle.
    fn semidirected_cycles(&self) -> Vec<Violation> {
        let comps = self.components();
        let mut comp_of = vec![0usize; self.node_count()];
        for (ci, c) in comps.iter().enumerate() {
            for v in c {
                comp_of[v] = ci;
            }
        }
        let mut quotient = DiGraph::<usize, ()>::new();
        let ids: Vec<_> = (0..comps.len()).map(|ci| quotient.add_node(ci)).collect();
        let mut self_loop = vec![false; comps.len()];
        for tail in 0..self.node_count() {
            for &head in &self.children[tail] {
                let (ct, ch) = (comp_of[tail], comp_of[head]);
                if ct == ch {
                    self_loop[ct] = true;
                } else {
                    quotient.update_edge(ids[ct], ids[ch], ());
                }
            }
        }
        let mut out = Vec::new();
        for scc in petgraph::algo::tarjan_scc(&quotient) {
            let cyclic = scc.len() > 1 || self_loop[quotient[scc[0]]];
            if !cyclic {
                continue;
            }
            let members: NodeSet = scc
                .iter()
                .flat_map(|&id| comps[quotient[id]].iter())
                .collect();
            out.push(Violation::SemidirectedCycle(
                self.names(&members).into_iter().map(String::from).collect(),
            ));
        }
        out.sort();
        out
    }

    /// `{v | v -> w, v not in x, w in x}`.
    pub fn parents(&self, x: &NodeSet) -> Result<NodeSet> {
        self.check_set(x)?;
        Ok(x
            .iter()
            .flat_map(|w| self.parents[w].iter().copied())
            .filter(|&v| !x.contains(v))
            .collect())
    }

    /// Nodes outside `x` with a strictly descending route into `x`.
    pub fn strict_ascendants(&self, x: &NodeSet) -> Result<NodeSet> {
        self.check_set(x)?;
        let mut seen = x.mask(self.node_count());
        let mut stack: Vec<usize> = x.iter().collect();
        let mut out = NodeSet::new();
        while let Some(w) = stack.pop() {
            for &p in &self.parents[w] {
                if !seen[p] {
                    seen[p] = true;
                    out.insert(p);
                    stack.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Connectivity components, ordered by their smallest member.
    pub fn components(&self) -> Vec<NodeSet> {
        let n = self.node_count();
        let mut uf = UnionFind::<usize>::new(n);
        for a in 0..n {
            for &b in &self.neighbors[a] {
                uf.union(a, b);
            }
        }
        let mut by_root: HashMap<usize, NodeSet> = HashMap::new();
        for v in 0..n {
            by_root.entry(uf.find(v)).or_default().insert(v);
        }
        let mut comps: Vec<NodeSet> = by_root.into_values().collect();
        comps.sort_by_key(|c| c.first());
        comps
    }

    /// Components in an order where every parent component precedes its children.
    ///
    /// Fails with a structure error if the component quotient has a cycle.
    pub fn component_order(&self) -> Result<Vec<NodeSet>> {
        let comps = self.components();
        let mut comp_of = vec![0usize; self.node_count()];
        for (ci, c) in comps.iter().enumerate() {
            for v in c {
                comp_of[v] = ci;
            }
        }
        let mut quotient = DiGraph::<usize, ()>::new();
        let ids: Vec<_> = (0..comps.len()).map(|ci| quotient.add_node(ci)).collect();
        for tail in 0..self.node_count() {
            for &head in &self.children[tail] {
                quotient.update_edge(ids[comp_of[tail]], ids[comp_of[head]], ());
            }
        }
        let order = petgraph::algo::toposort(&quotient, None)
            .map_err(|_| Error::Structure("graph has a semidirected cycle".into()))?;
        Ok(order.into_iter().map(|id| comps[quotient[id]].clone()).collect())
    }

    /// Every induced `a -> b -- c`.
    pub fn find_flags(&self) -> Vec<Flag> {
        let mut out = Vec::new();
        for b in 0..self.node_count() {
            for &a in &self.parents[b] {
                for &c in &self.neighbors[b] {
                    if c != a && !self.adjacent(a, c) {
                        out.push(Flag { a, b, c });
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// True when the graph has no undirected edges and no directed cycle.
    pub fn is_dag(&self) -> bool {
        !self.has_undirected_edges() && self.is_valid()
    }
}
