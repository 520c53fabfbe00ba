//! Functional-dependency rules and the closure `D(Z)` they induce.
//!
//! Tables are keyed by node name rather than index so the same table can be
//! attached to several graphs that share those nodes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{error_name, ChainGraph, NodeKind, NodeSet};

/// `target` is a function of `determinants`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    target: String,
    determinants: BTreeSet<String>,
}

impl Rule {
    pub fn new<I, S>(target: impl Into<String>, determinants: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let target = target.into();
        let determinants: BTreeSet<String> = determinants.into_iter().map(Into::into).collect();
        if determinants.is_empty() {
            return Err(Error::Structure(format!("rule for `{target}` has no determinants")));
        }
        if determinants.contains(&target) {
            return Err(Error::Structure(format!("`{target}` cannot determine itself")));
        }
        Ok(Rule {
            target,
            determinants,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn determinants(&self) -> &BTreeSet<String> {
        &self.determinants
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeterminationTable {
    rules: BTreeSet<Rule>,
}

impl DeterminationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Self {
        DeterminationTable {
            rules: rules.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, rule: Rule) {
        self.rules.insert(rule);
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules whose target is `name`.
    pub fn rules_for<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.target == name)
    }

    /// Resolves every name against `g`.
    pub fn compile(&self, g: &ChainGraph) -> Result<CompiledTable> {
        let rules = self
            .rules
            .iter()
            .map(|r| {
                let target = g.require(&r.target)?;
                let dets = r
                    .determinants
                    .iter()
                    .map(|d| g.require(d))
                    .collect::<Result<Vec<_>>>()?;
                Ok((dets, target))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledTable { rules })
    }
}

/// A table resolved to the node indices of one graph.
#[derive(Clone, Debug, Default)]
pub struct CompiledTable {
    rules: Vec<(Vec<usize>, usize)>,
}

impl CompiledTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Least fixpoint of `S := S ∪ {target | determinants ⊆ S}` starting at `z`.
    pub fn determined(&self, z: &NodeSet) -> NodeSet {
        let mut out = z.clone();
        let mut fired = vec![false; self.rules.len()];
        loop {
            let mut changed = false;
            for (k, (dets, target)) in self.rules.iter().enumerate() {
                if !fired[k] && dets.iter().all(|&d| out.contains(d)) {
                    fired[k] = true;
                    changed |= out.insert(*target);
                }
            }
            if !changed {
                return out;
            }
        }
    }
}

/// `D(z)` at the level of names.
pub fn determined_set(table: &DeterminationTable, z: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = z.clone();
    loop {
        let before = out.len();
        for r in &table.rules {
            if !out.contains(&r.target) && r.determinants.is_subset(&out) {
                out.insert(r.target.clone());
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// The rules of an error-augmented graph: `eps(A)` is determined by `A`
/// together with the other parents of `A`.
///
/// Error nodes whose variable is no longer in the graph get no rule.
pub fn eamp_rules(g: &ChainGraph) -> Result<DeterminationTable> {
    let mut table = DeterminationTable::new();
    for a in g.nodes_of_kind(NodeKind::Variable).iter() {
        let name = g.name(a);
        let eps_name = error_name(name);
        let eps = match g.index_of(&eps_name) {
            Some(e) if g.kind(e) == NodeKind::Error && g.has_directed(e, a) => e,
            _ => {
                return Err(Error::Structure(format!(
                    "variable `{name}` has no error parent `{eps_name}`"
                )))
            }
        };
        let dets = std::iter::once(name).chain(
            g.parents_of(a)
                .iter()
                .filter(|&&p| p != eps)
                .map(|&p| g.name(p)),
        );
        table.insert(Rule::new(eps_name.clone(), dets)?);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::figure_one;
    use crate::transforms::{marginalize_eamp, to_eamp};
    use proptest::prelude::*;

    fn names(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_table_is_identity() {
        let t = DeterminationTable::new();
        assert_eq!(determined_set(&t, &names(&["A", "Q"])), names(&["A", "Q"]));
    }

    #[test]
    fn figure_one_closure() {
        let gp = to_eamp(&figure_one()).unwrap();
        let d = determined_set(&gp.table, &names(&["A", "B", "D"]));
        assert_eq!(d, names(&["A", "B", "D", "eps(A)", "eps(B)", "eps(D)"]));
        // eps(C) needs A as well
        assert_eq!(determined_set(&gp.table, &names(&["C"])), names(&["C"]));
    }

    #[test]
    fn figure_one_rules() {
        let gp = to_eamp(&figure_one()).unwrap();
        assert_eq!(gp.table.len(), 6);
        let rule = gp.table.rules_for("eps(D)").next().unwrap();
        assert_eq!(rule.determinants(), &names(&["A", "B", "D"]));
    }

    #[test]
    fn single_node_rule() {
        let g = crate::graph::ChainGraph::new([crate::graph::Node::variable("A")], []).unwrap();
        let gp = to_eamp(&g).unwrap();
        let rules: Vec<_> = gp.table.rules().collect();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].determinants(), &names(&["A"]));
    }

    #[test]
    fn marginalized_rules() {
        let gp = to_eamp(&figure_one()).unwrap();
        let m = marginalize_eamp(&gp, &names(&["A", "B", "F"])).unwrap();
        let targets: Vec<&str> = m.table.rules().map(Rule::target).collect();
        assert_eq!(targets, ["eps(C)", "eps(D)", "eps(E)"]);
        let rule = m.table.rules_for("eps(D)").next().unwrap();
        assert_eq!(rule.determinants(), &names(&["D", "eps(A)", "eps(B)"]));
    }

    #[test]
    fn missing_error_parent_is_a_structure_error() {
        let g = figure_one();
        assert!(matches!(eamp_rules(&g), Err(Error::Structure(_))));
    }

    #[test]
    fn bad_rules_are_rejected() {
        assert!(Rule::new("A", Vec::<String>::new()).is_err());
        assert!(Rule::new("A", ["A", "B"]).is_err());
    }

    #[test]
    fn compiled_closure_matches_named_closure() {
        let gp = to_eamp(&figure_one()).unwrap();
        let compiled = gp.table.compile(&gp.graph).unwrap();
        let z = gp.graph.set(["A", "B", "D"]).unwrap();
        let d = compiled.determined(&z);
        assert_eq!(
            gp.graph.name_set(&d),
            determined_set(&gp.table, &names(&["A", "B", "D"]))
        );
    }

    proptest! {
        #[test]
        fn closure_laws(zs in prop::collection::btree_set(0usize..12, 0..8),
                        extra in prop::collection::btree_set(0usize..12, 0..4)) {
            let gp = to_eamp(&figure_one()).unwrap();
            let g = &gp.graph;
            let table = gp.table.compile(g).unwrap();
            let z: NodeSet = zs.into_iter().collect();
            let z2 = z.union(&extra.into_iter().collect());
            let d = table.determined(&z);
            prop_assert!(z.is_subset(&d));
            prop_assert!(d.is_subset(&table.determined(&z2)));
            prop_assert_eq!(table.determined(&d), d.clone());
        }

        #[test]
        fn variable_only_conditioning(zs in prop::collection::btree_set(0usize..6, 0..6)) {
            let gp = to_eamp(&figure_one()).unwrap();
            let g = &gp.graph;
            let table = gp.table.compile(g).unwrap();
            let vars = g.nodes_of_kind(NodeKind::Variable);
            let z: NodeSet = zs.into_iter().map(|k| vars.iter().nth(k).unwrap()).collect();
            let d = table.determined(&z);
            prop_assert_eq!(d.intersection(&vars), z.clone());
            for a in vars.iter() {
                let eps = g.require(&error_name(g.name(a))).unwrap();
                let mut needed = NodeSet::singleton(a);
                needed.extend(g.parents_of(a).iter().copied().filter(|&p| p != eps));
                prop_assert_eq!(d.contains(eps), needed.is_subset(&z));
            }
        }
    }
}
