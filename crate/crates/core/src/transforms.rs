//! Graph constructions: error augmentation, the selection DAG and the
//! marginalization of variables out of an error-augmented graph.

use std::collections::BTreeSet;

use crate::determinism::{eamp_rules, DeterminationTable};
use crate::error::{Error, Result};
use crate::graph::{error_name, ChainGraph, Edge, Node, NodeKind};

/// A chain graph carrying one explicit error node per variable.
///
/// Each variable `A` has the parent `eps(A)`, undirected edges only join
/// error nodes, and error nodes never receive arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EampGraph {
    pub graph: ChainGraph,
    pub table: DeterminationTable,
    /// Variables still present.
    pub variables: BTreeSet<String>,
}

impl EampGraph {
    /// Wraps an existing graph, rebuilding its rules and checking the
    /// structural invariants.
    pub fn from_graph(graph: ChainGraph) -> Result<Self> {
        let table = eamp_rules(&graph)?;
        let variables = graph
            .nodes()
            .iter()
            .filter(|n| n.kind == NodeKind::Variable)
            .map(|n| n.name.clone())
            .collect();
        let out = EampGraph {
            graph,
            table,
            variables,
        };
        let problems = out.violations();
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(Error::Structure(problems.join("; ")))
        }
    }

    /// Invariant failures, empty for a well-formed value.
    pub fn violations(&self) -> Vec<String> {
        let g = &self.graph;
        let mut out: Vec<String> = g.validate().iter().map(ToString::to_string).collect();
        if let Err(e) = eamp_rules(g) {
            out.push(e.to_string());
        }
        for i in 0..g.node_count() {
            match g.kind(i) {
                NodeKind::Variable => {
                    if !self.variables.contains(g.name(i)) {
                        out.push(format!("variable `{}` not in the variable set", g.name(i)));
                    }
                    for &j in g.neighbors_of(i) {
                        if g.kind(j) == NodeKind::Variable && i < j {
                            out.push(format!(
                                "undirected edge between variables {} and {}",
                                g.name(i),
                                g.name(j)
                            ));
                        }
                    }
                }
                NodeKind::Error => {
                    if !g.parents_of(i).is_empty() {
                        out.push(format!("error node `{}` has incoming arrows", g.name(i)));
                    }
                }
                NodeKind::Selection => out.push(format!("selection node `{}`", g.name(i))),
            }
        }
        for f in g.find_flags() {
            out.push(format!(
                "flag {} -> {} -- {}",
                g.name(f.a),
                g.name(f.b),
                g.name(f.c)
            ));
        }
        out
    }
}

/// Adds `eps(A) -> A` for every variable and moves each `A -- B` onto the
/// error layer as `eps(A) -- eps(B)`.
pub fn to_eamp(g: &ChainGraph) -> Result<EampGraph> {
    if let Some(v) = g.validate().first() {
        return Err(Error::Structure(format!("input is not a chain graph: {v}")));
    }
    if let Some(n) = g.nodes().iter().find(|n| n.kind != NodeKind::Variable) {
        return Err(Error::Structure(format!(
            "input node `{}` is a {} node, expected variables only",
            n.name, n.kind
        )));
    }
    let mut nodes: Vec<Node> = g.nodes().to_vec();
    let mut edges: Vec<Edge> = g.directed_edges().cloned().collect();
    for n in g.nodes() {
        nodes.push(Node::error_of(&n.name));
        edges.push(Edge::directed(error_name(&n.name), &n.name));
    }
    for e in g.undirected_edges() {
        let (a, b) = e.endpoints();
        edges.push(Edge::undirected(error_name(a), error_name(b)));
    }
    let graph = ChainGraph::new(nodes, edges)?;
    let table = eamp_rules(&graph)?;
    Ok(EampGraph {
        graph,
        table,
        variables: g.nodes().iter().map(|n| n.name.clone()).collect(),
    })
}

/// A DAG with selection colliders in place of undirected error edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionDag {
    pub graph: ChainGraph,
    pub selection: BTreeSet<String>,
    /// Carried over unchanged from the error-augmented graph.
    pub table: DeterminationTable,
}

/// Replaces every `eps(A) -- eps(B)` by `eps(A) -> sel(eps(A),eps(B)) <- eps(B)`.
pub fn to_selection_dag(gp: &EampGraph) -> Result<SelectionDag> {
    let g = &gp.graph;
    let mut nodes: Vec<Node> = g.nodes().to_vec();
    let mut edges: Vec<Edge> = g.directed_edges().cloned().collect();
    let mut selection = BTreeSet::new();
    for e in g.undirected_edges() {
        let (a, b) = e.endpoints();
        let sel = Node::selection_of(a, b);
        edges.push(Edge::directed(a, &sel.name));
        edges.push(Edge::directed(b, &sel.name));
        selection.insert(sel.name.clone());
        nodes.push(sel);
    }
    let graph = ChainGraph::new(nodes, edges)?;
    debug_assert!(graph.is_dag());
    Ok(SelectionDag {
        graph,
        selection,
        table: gp.table.clone(),
    })
}

/// Marginalizes the variables in `l`, eliminating them in name order.
pub fn marginalize_eamp(gp: &EampGraph, l: &BTreeSet<String>) -> Result<EampGraph> {
    let order: Vec<&str> = l.iter().map(String::as_str).collect();
    marginalize_eamp_ordered(gp, &order)
}

/// Marginalizes the variables in `order`, eliminating them in that order.
///
/// Each eliminated `B` passes its parents on to its children (`A -> B -> C`
/// becomes `A -> C`) and is then removed together with its edges. Its error
/// node stays behind without a rule.
pub fn marginalize_eamp_ordered<S: AsRef<str>>(gp: &EampGraph, order: &[S]) -> Result<EampGraph> {
    let mut seen = BTreeSet::new();
    for b in order {
        let b = b.as_ref();
        if !gp.variables.contains(b) {
            let why = match gp.graph.index_of(b) {
                Some(i) => format!("`{b}` is a {} node, only variables can be marginalized", gp.graph.kind(i)),
                None => format!("`{b}` is not a variable of the graph"),
            };
            return Err(Error::Argument(why));
        }
        if !seen.insert(b) {
            return Err(Error::Argument(format!("`{b}` listed twice")));
        }
    }

    let mut nodes: BTreeSet<Node> = gp.graph.nodes().iter().cloned().collect();
    let mut edges: BTreeSet<Edge> = gp.graph.edges().clone();
    for b in order {
        let b = b.as_ref();
        let mut parents = Vec::new();
        let mut children = Vec::new();
        for e in &edges {
            let (t, h) = e.endpoints();
            if !e.is_directed() {
                if t == b || h == b {
                    return Err(Error::Structure(format!("variable `{b}` has an undirected edge")));
                }
                continue;
            }
            if h == b {
                parents.push(t.to_string());
            } else if t == b {
                children.push(h.to_string());
            }
        }
        for a in &parents {
            for c in &children {
                if edges.contains(&Edge::directed(c, a)) || edges.contains(&Edge::undirected(a, c)) {
                    return Err(Error::Structure(format!(
                        "eliminating `{b}` would add {a} -> {c} next to an existing edge"
                    )));
                }
            }
        }
        for a in &parents {
            for c in &children {
                edges.insert(Edge::directed(a, c));
            }
        }
        edges.retain(|e| {
            let (t, h) = e.endpoints();
            t != b && h != b
        });
        nodes.retain(|n| n.name != b);
    }

    let graph = ChainGraph::new(nodes, edges)?;
    let table = eamp_rules(&graph)?;
    let variables = gp
        .variables
        .iter()
        .filter(|v| !seen.contains(v.as_str()))
        .cloned()
        .collect();
    Ok(EampGraph {
        graph,
        table,
        variables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{figure_one, variables};
    use proptest::prelude::*;

    fn edge_strings(g: &ChainGraph) -> BTreeSet<String> {
        g.edges().iter().map(ToString::to_string).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn figure_one_augmentation() {
        let gp = to_eamp(&figure_one()).unwrap();
        assert_eq!(gp.graph.node_count(), 12);
        assert_eq!(
            edge_strings(&gp.graph),
            set(&[
                "A -> B", "A -> C", "A -> D", "B -> D",
                "eps(A) -> A", "eps(B) -> B", "eps(C) -> C", "eps(D) -> D", "eps(E) -> E",
                "eps(F) -> F",
                "eps(C) -- eps(D)", "eps(C) -- eps(E)", "eps(D) -- eps(F)", "eps(E) -- eps(F)",
            ])
        );
        assert!(gp.violations().is_empty());
        let comps: Vec<Vec<&str>> = gp
            .graph
            .components()
            .iter()
            .map(|c| gp.graph.names(c))
            .filter(|c| c.len() > 1)
            .collect();
        assert_eq!(comps, vec![vec!["eps(C)", "eps(D)", "eps(E)", "eps(F)"]]);
    }

    #[test]
    fn single_node_augmentation() {
        let g = ChainGraph::new(variables(&["A"]), []).unwrap();
        let gp = to_eamp(&g).unwrap();
        assert_eq!(edge_strings(&gp.graph), set(&["eps(A) -> A"]));
    }

    #[test]
    fn complete_undirected_triangle() {
        let g = ChainGraph::new(
            variables(&["A", "B", "C"]),
            [
                Edge::undirected("A", "B"),
                Edge::undirected("B", "C"),
                Edge::undirected("A", "C"),
            ],
        )
        .unwrap();
        let gp = to_eamp(&g).unwrap();
        assert_eq!(
            edge_strings(&gp.graph),
            set(&[
                "eps(A) -> A", "eps(B) -> B", "eps(C) -> C",
                "eps(A) -- eps(B)", "eps(A) -- eps(C)", "eps(B) -- eps(C)",
            ])
        );
        let dag = to_selection_dag(&gp).unwrap();
        assert_eq!(dag.selection.len(), 3);
        assert!(dag.graph.is_dag());
        assert_eq!(dag.graph.edges().len(), 3 + 6);
    }

    #[test]
    fn augmentation_rejects_non_variables_and_cycles() {
        let gp = to_eamp(&figure_one()).unwrap();
        assert!(matches!(to_eamp(&gp.graph), Err(Error::Structure(_))));
        let bad = ChainGraph::new(
            variables(&["A", "B", "C"]),
            [
                Edge::directed("A", "B"),
                Edge::undirected("B", "C"),
                Edge::directed("C", "A"),
            ],
        )
        .unwrap();
        assert!(matches!(to_eamp(&bad), Err(Error::Structure(_))));
    }

    #[test]
    fn figure_one_selection_dag() {
        let gp = to_eamp(&figure_one()).unwrap();
        let dag = to_selection_dag(&gp).unwrap();
        assert_eq!(
            dag.selection,
            set(&[
                "sel(eps(C),eps(D))",
                "sel(eps(C),eps(E))",
                "sel(eps(D),eps(F))",
                "sel(eps(E),eps(F))"
            ])
        );
        assert!(dag.graph.is_dag());
        assert_eq!(dag.table, gp.table);
        assert!(edge_strings(&dag.graph).contains("eps(C) -> sel(eps(C),eps(D))"));
    }

    #[test]
    fn selection_dag_without_undirected_edges_is_unchanged() {
        let g = ChainGraph::new(variables(&["A", "B"]), [Edge::directed("A", "B")]).unwrap();
        let gp = to_eamp(&g).unwrap();
        let dag = to_selection_dag(&gp).unwrap();
        assert_eq!(dag.graph, gp.graph);
        assert!(dag.selection.is_empty());
    }

    #[test]
    fn figure_one_marginalization() {
        let gp = to_eamp(&figure_one()).unwrap();
        let m = marginalize_eamp(&gp, &set(&["A", "B", "F"])).unwrap();
        let nodes: BTreeSet<String> = m.graph.nodes().iter().map(|n| n.name.clone()).collect();
        assert_eq!(
            nodes,
            set(&["C", "D", "E", "eps(A)", "eps(B)", "eps(C)", "eps(D)", "eps(E)", "eps(F)"])
        );
        assert_eq!(
            edge_strings(&m.graph),
            set(&[
                "eps(A) -> C", "eps(A) -> D", "eps(B) -> D",
                "eps(C) -> C", "eps(D) -> D", "eps(E) -> E",
                "eps(C) -- eps(D)", "eps(C) -- eps(E)", "eps(D) -- eps(F)", "eps(E) -- eps(F)",
            ])
        );
        assert_eq!(m.variables, set(&["C", "D", "E"]));
        assert!(m.violations().is_empty());
    }

    #[test]
    fn single_elimination_step() {
        let gp = to_eamp(&figure_one()).unwrap();
        let m = marginalize_eamp(&gp, &set(&["A"])).unwrap();
        let e = edge_strings(&m.graph);
        for want in ["eps(A) -> B", "eps(A) -> C", "eps(A) -> D"] {
            assert!(e.contains(want), "missing {want}");
        }
        assert!(!m.graph.contains("A"));
    }

    #[test]
    fn empty_marginalization_is_identity() {
        let gp = to_eamp(&figure_one()).unwrap();
        assert_eq!(marginalize_eamp(&gp, &BTreeSet::new()).unwrap(), gp);
    }

    #[test]
    fn only_variables_can_be_marginalized() {
        let gp = to_eamp(&figure_one()).unwrap();
        for bad in ["eps(A)", "Q"] {
            let r = marginalize_eamp(&gp, &set(&[bad]));
            assert!(matches!(r, Err(Error::Argument(_))), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn elimination_order_is_irrelevant(perm in Just(vec!["A", "B", "D", "F"]).prop_shuffle()) {
            let gp = to_eamp(&figure_one()).unwrap();
            let sorted = marginalize_eamp(&gp, &set(&["A", "B", "D", "F"])).unwrap();
            let shuffled = marginalize_eamp_ordered(&gp, &perm).unwrap();
            prop_assert_eq!(sorted, shuffled);
        }

        #[test]
        fn marginalization_composes(split in 0usize..5) {
            let gp = to_eamp(&figure_one()).unwrap();
            let all = ["A", "B", "C", "E", "F"];
            let (l1, l2) = all.split_at(split);
            let step = marginalize_eamp(&marginalize_eamp(&gp, &set(l1)).unwrap(), &set(l2)).unwrap();
            prop_assert_eq!(step, marginalize_eamp(&gp, &set(&all)).unwrap());
        }
    }
}
