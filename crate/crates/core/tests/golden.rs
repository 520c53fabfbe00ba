mod common;

use std::collections::BTreeSet;

use cgkit::gaussian::{joint_covariance, sample_system};
use cgkit::models::random_cg;
use cgkit::{marginalize_eamp, serialize, to_eamp, to_selection_dag, NodeKind};
use common::{frozen, golden, whole_system_covariance};

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn eamp_of_figure_one() {
    let g = golden("fig1_g.cg");
    let want = golden("fig1_g_prime.cg");
    let gp = to_eamp(&g.graph).unwrap();
    assert_eq!(gp.graph.edges(), want.graph.edges());
    assert_eq!(gp.graph, want.graph);
    assert_eq!(gp.table, want.table);
    assert_eq!(gp.graph.node_count(), 12);
    assert!(gp.graph.find_flags().is_empty());
}

#[test]
fn selection_dag_of_figure_one() {
    let gp = to_eamp(&golden("fig1_g.cg").graph).unwrap();
    let want = golden("fig1_g_double_prime.cg");
    let dag = to_selection_dag(&gp).unwrap();
    assert_eq!(dag.graph, want.graph);
    assert_eq!(dag.table, want.table);
    assert_eq!(dag.selection, want.graph.name_set(&want.graph.nodes_of_kind(NodeKind::Selection)));
    assert_eq!(dag.selection.len(), 4);
    assert!(dag.graph.is_dag());
}

#[test]
fn marginal_of_figure_one() {
    let gp = to_eamp(&golden("fig1_g.cg").graph).unwrap();
    let want = golden("fig1_marginal_abf.cg");
    let gl = marginalize_eamp(&gp, &set(&["A", "B", "F"])).unwrap();
    assert_eq!(gl.graph, want.graph);
    assert_eq!(gl.table, want.table);
    assert_eq!(gl.variables, set(&["C", "D", "E"]));
}

#[test]
fn serialization_of_goldens_is_stable() {
    for name in ["fig1_g.cg", "fig1_g_prime.cg", "fig1_g_double_prime.cg", "fig1_marginal_abf.cg"] {
        let f = golden(name);
        let text = serialize(&f.graph, &f.table);
        let again = cgkit::parse(&text).unwrap();
        assert_eq!(again, f, "{name}");
        assert_eq!(serialize(&again.graph, &again.table), text, "{name}");
    }
}

#[test]
fn random_graph_is_frozen() {
    let g = random_cg(4, 0.5, 7).unwrap();
    assert!(g.is_valid());
    frozen("random_n4_d05_s7.cg", &serialize(&g, &Default::default()));
}

#[test]
fn gaussian_system_is_frozen() {
    let g = golden("fig1_g.cg").graph;
    let sys = sample_system(&g, 1).unwrap();
    assert!(sys.violations(&g).is_empty());
    frozen("fig1_gaussian_seed1.txt", &sys.render());

    let sigma = joint_covariance(&sys, &g).unwrap();
    let oracle = whole_system_covariance(&sys, &g);
    assert!((sigma - oracle).abs().max() <= 1e-10);
}
