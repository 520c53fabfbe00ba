use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ChainGraph, Edge, Node};

/// `A`, `B`, ... for up to 26 nodes, `V01`, `V02`, ... beyond.
fn node_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        let width = n.to_string().len();
        (1..=n).map(|i| format!("V{i:0width$}")).collect()
    }
}

/// A random chain graph over `n` variables, reproducible from `seed`.
///
/// Nodes are shuffled and cut into consecutive blocks. Each pair inside a
/// block gets an undirected edge with probability `density`; each pair in
/// different blocks gets, with the same probability, an arrow from the
/// earlier block to the later one.
pub fn random_cg(n: usize, density: f64, seed: u64) -> Result<ChainGraph> {
    if n == 0 {
        return Err(Error::Argument("a graph needs at least one node".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Argument(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = node_names(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut block = vec![0usize; n];
    for k in 1..n {
        block[k] = block[k - 1] + usize::from(rng.gen_bool(0.5));
    }

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.gen_bool(density) {
                continue;
            }
            let (a, b) = (&names[order[i]], &names[order[j]]);
            if block[i] == block[j] {
                edges.push(Edge::undirected(a, b));
            } else {
                edges.push(Edge::directed(a, b));
            }
        }
    }
    ChainGraph::new(names.iter().map(Node::variable), edges)
}

/// Every chain graph over the given variable names.
pub fn all_chain_graphs<S: AsRef<str>>(names: &[S]) -> Vec<ChainGraph> {
    let names: Vec<&str> = names.iter().map(AsRef::as_ref).collect();
    let pairs: Vec<(usize, usize)> = (0..names.len())
        .flat_map(|i| (i + 1..names.len()).map(move |j| (i, j)))
        .collect();
    let total = 4usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 4 {
                1 => edges.push(Edge::directed(names[i], names[j])),
                2 => edges.push(Edge::directed(names[j], names[i])),
                3 => edges.push(Edge::undirected(names[i], names[j])),
                _ => {}
            }
            c /= 4;
        }
        let g = ChainGraph::new(names.iter().map(|&n| Node::variable(n)), edges)
            .expect("distinct names");
        if g.is_valid() {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_and_edgeless() {
        let g = random_cg(1, 0.7, 3).unwrap();
        assert_eq!(g.node_count(), 1);
        let g = random_cg(6, 0.0, 3).unwrap();
        assert!(g.edges().is_empty());
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for seed in 0..200 {
            let n = 1 + (seed as usize % 7);
            let g = random_cg(n, 0.6, seed).unwrap();
            assert!(g.is_valid(), "seed {seed}");
            assert_eq!(g, random_cg(n, 0.6, seed).unwrap());
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(random_cg(0, 0.5, 1).is_err());
        assert!(random_cg(3, 1.5, 1).is_err());
    }

    #[test]
    fn three_node_chain_graphs() {
        // 64 edge assignments minus the 2 directed 3-cycles, the 6 triangles
        // with one arrow and two lines, and the 6 with a directed 2-path
        // closed by a line.
        let all = all_chain_graphs(&["A", "B", "C"]);
        assert_eq!(all.len(), 64 - 2 - 6 - 6);
        assert!(all.iter().all(ChainGraph::is_valid));
    }

    #[test]
    fn many_names() {
        let g = random_cg(30, 0.1, 9).unwrap();
        assert_eq!(g.nodes()[0].name, "V01");
        assert!(g.is_valid());
    }
}
