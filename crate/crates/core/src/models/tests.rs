use proptest::prelude::*;

use super::*;
use crate::graph::fixtures::{figure_one, variables};
use crate::graph::{Edge, NodeKind};
use crate::transforms::{to_eamp, to_selection_dag};

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn all(g: &ChainGraph) -> BTreeSet<String> {
    g.name_set(&g.all_nodes())
}

fn of_kind(g: &ChainGraph, kind: NodeKind) -> BTreeSet<String> {
    g.name_set(&g.nodes_of_kind(kind))
}

fn empty() -> DeterminationTable {
    DeterminationTable::new()
}

#[test]
fn figure_one_amp_model() {
    let g = figure_one();
    let m = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap();
    assert!(m.contains(&["C"], &["B"], &["A"]).unwrap());
    assert!(m.contains(&["B"], &["C"], &["A"]).unwrap());
    assert!(!m.contains(&["C"], &["B"], &[]).unwrap());
}

#[test]
fn two_isolated_nodes() {
    let g = ChainGraph::new(variables(&["A", "B"]), []).unwrap();
    let m = enumerate_model(&g, &empty(), Semantics::Lwf, &all(&g)).unwrap();
    assert_eq!(m.len(), 1);
    assert!(m.contains(&["A"], &["B"], &[]).unwrap());
    assert_eq!(m.dump(), "# universe A,B\nA | B |\n");
}

#[test]
fn complete_graph_has_empty_model() {
    let g = ChainGraph::new(
        variables(&["A", "B", "C"]),
        [Edge::directed("A", "B"), Edge::directed("A", "C"), Edge::undirected("B", "C")],
    )
    .unwrap();
    for sem in [Semantics::Amp, Semantics::Lwf] {
        assert!(enumerate_model(&g, &empty(), sem, &all(&g)).unwrap().is_empty());
    }
}

#[test]
fn triple_counts() {
    assert_eq!(triple_count(2), 1.0);
    assert_eq!(triple_count(3), 9.0);
    let g = ChainGraph::new(variables(&["A", "B", "C", "D"]), []).unwrap();
    let m = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap();
    assert_eq!(m.len() as f64, triple_count(4));
}

#[test]
fn guard_refuses_large_universes() {
    let g = random_cg(9, 0.2, 5).unwrap();
    let err = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap_err();
    assert!(matches!(err, Error::Guard(_)));
    assert!(err.to_string().contains("triples"));
}

#[test]
fn unknown_universe_node() {
    let g = figure_one();
    assert!(enumerate_model(&g, &empty(), Semantics::Amp, &set(&["A", "Q"])).is_err());
}

#[test]
fn figure_one_eamp_readings_agree() {
    let gp = to_eamp(&figure_one()).unwrap();
    let g = &gp.graph;
    let amp = Enumeration::new(g, &gp.table, Semantics::Amp, all(g)).limit(12).run().unwrap();
    let lwf = Enumeration::new(g, &gp.table, Semantics::Lwf, all(g)).limit(12).run().unwrap();
    assert!(!amp.is_empty());
    assert_eq!(amp, lwf);

    // projecting away the error nodes recovers I_AMP(G)
    let errors = of_kind(g, NodeKind::Error);
    let projected = project_model(&amp, &errors, &BTreeSet::new()).unwrap();
    let direct = enumerate_model(&figure_one(), &empty(), Semantics::Amp, &gp.variables).unwrap();
    assert_eq!(projected, direct);
}

#[test]
fn figure_one_selection_dag_recovers_amp() {
    let g = figure_one();
    let gp = to_eamp(&g).unwrap();
    let dag = to_selection_dag(&gp).unwrap();
    let direct = enumerate_model(&g, &empty(), Semantics::Amp, &gp.variables).unwrap();
    for sem in [Semantics::Lwf, Semantics::Amp] {
        let m = Enumeration::new(&dag.graph, &dag.table, sem, gp.variables.clone())
            .given(dag.selection.clone())
            .run()
            .unwrap();
        assert_eq!(m, direct, "{sem}");
    }
}

#[test]
fn amp_and_lwf_models_of_figure_one_differ() {
    let g = figure_one();
    let amp = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap();
    let lwf = enumerate_model(&g, &empty(), Semantics::Lwf, &all(&g)).unwrap();
    let (only_amp, only_lwf) = model_diff(&amp, &lwf).unwrap();
    assert!(!only_amp.is_empty() || !only_lwf.is_empty());
    let (a, b) = model_diff(&amp, &amp).unwrap();
    assert!(a.is_empty() && b.is_empty());
}

#[test]
fn diff_needs_equal_universes() {
    let m1 = IndependenceModel::from_named(["A", "B"], []).unwrap();
    let m2 = IndependenceModel::from_named(["A", "C"], []).unwrap();
    assert!(matches!(model_diff(&m1, &m2), Err(Error::Argument(_))));
}

#[test]
fn projection_by_hand() {
    let m = IndependenceModel::from_named(
        ["A", "B", "C", "D"],
        [
            (vec!["A"], vec!["B"], vec!["C"]),
            (vec!["A"], vec!["B"], vec!["C", "D"]),
            (vec!["A"], vec!["D"], vec![]),
            (vec!["B"], vec!["A", "D"], vec!["C"]),
        ],
    )
    .unwrap();
    let p = project_model(&m, &set(&["D"]), &set(&["C"])).unwrap();
    assert_eq!(p.universe(), ["A", "B"]);
    assert_eq!(p.dump(), "# universe A,B\nA | B |\n");
    let p = project_model(&m, &set(&["C"]), &BTreeSet::new()).unwrap();
    assert_eq!(p.dump(), "# universe A,B,D\nA | D |\n");
    assert_eq!(project_model(&m, &BTreeSet::new(), &BTreeSet::new()).unwrap(), m);
    assert!(project_model(&m, &set(&["C"]), &set(&["C"])).is_err());
    assert!(project_model(&m, &set(&["Q"]), &BTreeSet::new()).is_err());
}

#[test]
fn dump_round_trips() {
    let g = figure_one();
    let m = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap();
    let text = m.dump();
    assert!(text.starts_with("# universe A,B,C,D,E,F\n"));
    let back = IndependenceModel::parse_dump(&text).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.dump(), text);
}

#[test]
fn malformed_dump() {
    let err = IndependenceModel::parse_dump("# universe A,B\nA | B\nA B\n").unwrap_err();
    assert!(err.to_string().contains("line 3"));
    assert!(IndependenceModel::parse_dump("A | A |\n").is_err());
}

#[test]
fn oracle_enumeration_matches_engine() {
    let g = figure_one();
    let gp = to_eamp(&ChainGraph::new(variables(&["A", "B", "C"]), [Edge::directed("A", "B"), Edge::undirected("B", "C")]).unwrap()).unwrap();
    for (h, t) in [(&g, &empty()), (&gp.graph, &gp.table)] {
        for sem in [Semantics::Amp, Semantics::Lwf] {
            let fast = Enumeration::new(h, t, sem, all(h)).run().unwrap();
            let slow = Enumeration::new(h, t, sem, all(h)).with_oracle().run().unwrap();
            assert_eq!(fast, slow);
        }
    }
}

#[test]
fn every_theorem_holds_on_figure_one() {
    let g = figure_one();
    for th in Theorem::ALL {
        if th == Theorem::Three {
            continue;
        }
        let v = check_theorem(&g, th, &set(&["A", "B", "F"])).unwrap();
        assert!(v.passed(), "theorem {th}");
    }
}

#[test]
fn theorem_names_round_trip() {
    for th in Theorem::ALL {
        assert_eq!(th.to_string().parse::<Theorem>().unwrap(), th);
    }
    assert!("5".parse::<Theorem>().is_err());
}

#[test]
fn a_flag_separates_the_readings() {
    let g = ChainGraph::new(variables(&["A", "B", "C"]), [Edge::directed("A", "B"), Edge::undirected("B", "C")]).unwrap();
    let amp = enumerate_model(&g, &empty(), Semantics::Amp, &all(&g)).unwrap();
    let lwf = enumerate_model(&g, &empty(), Semantics::Lwf, &all(&g)).unwrap();
    let (a, b) = model_diff(&amp, &lwf).unwrap();
    assert_eq!(a.dump(), "# universe A,B,C\nA | C |\n");
    assert_eq!(b.dump(), "# universe A,B,C\nA | C | B\n");
}

#[test]
fn counterexample_rendering() {
    let c = Counterexample {
        theorem: Theorem::Two,
        left: "I_AMP(G')".into(),
        right: "I_LWF(G')".into(),
        only_left: vec!["A | C |".into()],
        only_right: vec![],
        traces: vec!["amp on G': open route A -> B".into()],
        graph_file: "cgfile 1\nnode A variable\n".into(),
    };
    let text = c.to_string();
    assert!(text.starts_with("theorem 2: counterexample\n"));
    assert!(text.contains("only in left (1):\n  A | C |\n"));
    assert!(text.contains("trace amp on G': open route A -> B\n"));
    assert!(text.ends_with("graph:\ncgfile 1\nnode A variable\n"));
}

#[test]
fn theorem_four_rejects_non_variables() {
    let g = figure_one();
    assert!(check_theorem(&g, Theorem::Four, &set(&["eps(A)"])).is_err());
}

fn small_graph() -> impl Strategy<Value = ChainGraph> {
    (1..=4usize, 0.0..1.0f64, any::<u64>()).prop_map(|(n, d, s)| random_cg(n, d, s).unwrap())
}

fn subset(names: &BTreeSet<String>, mask: u64) -> BTreeSet<String> {
    names.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| n.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn given_enumeration_equals_projection(g in small_graph(), lm in any::<u64>(), sm in any::<u64>()) {
        let gp = to_eamp(&g).unwrap();
        let h = &gp.graph;
        let names = all(h);
        let l = subset(&names, lm);
        let s: BTreeSet<String> = subset(&names, sm).difference(&l).cloned().collect();
        let kept: BTreeSet<String> = names.iter().filter(|n| !l.contains(*n) && !s.contains(*n)).cloned().collect();
        for sem in [Semantics::Amp, Semantics::Lwf] {
            let full = Enumeration::new(h, &gp.table, sem, names.clone()).run().unwrap();
            let projected = project_model(&full, &l, &s).unwrap();
            let direct = Enumeration::new(h, &gp.table, sem, kept.clone()).given(s.clone()).run().unwrap();
            prop_assert_eq!(projected, direct);
        }
    }

    #[test]
    fn projections_compose(g in small_graph(), m1 in any::<u64>(), m2 in any::<u64>()) {
        let gp = to_eamp(&g).unwrap();
        let h = &gp.graph;
        let names = all(h);
        let m = enumerate_model(h, &gp.table, Semantics::Amp, &names).unwrap();
        let l1 = subset(&names, m1);
        let l2: BTreeSet<String> = subset(&names, m2).difference(&l1).cloned().collect();
        let none = BTreeSet::new();
        let stepwise = project_model(&project_model(&m, &l1, &none).unwrap(), &l2, &none).unwrap();
        let at_once = project_model(&m, &l1.union(&l2).cloned().collect(), &none).unwrap();
        prop_assert_eq!(stepwise, at_once);
    }

    #[test]
    fn models_are_closed_under_swapping(g in small_graph()) {
        let gp = to_eamp(&g).unwrap();
        let m = enumerate_model(&gp.graph, &gp.table, Semantics::Lwf, &all(&gp.graph)).unwrap();
        for t in m.triples() {
            let (x, y, z) = (m.names(t.x), m.names(t.y), m.names(t.z));
            prop_assert!(m.contains(&y, &x, &z).unwrap());
        }
    }

    #[test]
    fn theorems_hold_on_small_graphs(g in small_graph(), lm in 1u64..16) {
        let vars = all(&g);
        let mut l = subset(&vars, lm);
        if l.is_empty() {
            l = vars.iter().take(1).cloned().collect();
        }
        for th in Theorem::ALL {
            if th == Theorem::Three && g.node_count() > 3 {
                continue;
            }
            let v = check_theorem(&g, th, &l).unwrap();
            if let Verdict::Fail(c) = &v {
                prop_assert!(false, "{}", c);
            }
        }
    }
}
