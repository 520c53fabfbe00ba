//! LWF separation by moralizing the anterior graph of `X ∪ Y ∪ D(Z)`.

use std::collections::VecDeque;

use super::SeparationQuery;
use crate::error::Result;
use crate::graph::{ChainGraph, NodeSet};

#[derive(Clone, Debug)]
pub struct LwfTrace {
    pub separated: bool,
    /// Anterior set the moral graph was built on.
    pub anterior: NodeSet,
    /// A path in the moral graph avoiding `D(Z)`, when one exists.
    pub moral_path: Option<Vec<usize>>,
}

pub fn lwf_separated(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    Ok(lwf_trace(g, q)?.separated)
}

pub fn lwf_trace(g: &ChainGraph, q: &SeparationQuery) -> Result<LwfTrace> {
    q.check(g)?;
    let n = g.node_count();
    let (sources, targets) = q.live_endpoints();
    let det = q.effective_conditioning().mask(n);

    let mut seed: Vec<usize> = sources.clone();
    seed.extend((0..n).filter(|&v| targets[v] || det[v]));
    let anterior = anterior_set(g, &seed);
    let moral = moralize(g, &anterior);

    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in &sources {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if targets[u] {
            let mut path = vec![u];
            let mut cur = u;
            while let Some(p) = pred[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok(LwfTrace {
                separated: false,
                anterior,
                moral_path: Some(path),
            });
        }
        for &w in &moral[u] {
            if !seen[w] && !det[w] {
                seen[w] = true;
                pred[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    Ok(LwfTrace {
        separated: true,
        anterior,
        moral_path: None,
    })
}

/// The seed plus every node with a route into it along `--` edges and
/// arrows followed head-ward.
fn anterior_set(g: &ChainGraph, seed: &[usize]) -> NodeSet {
    let mut seen = vec![false; g.node_count()];
    let mut stack = Vec::new();
    for &s in seed {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &u in g.parents_of(v).iter().chain(g.neighbors_of(v)) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    (0..g.node_count()).filter(|&v| seen[v]).collect()
}

/// Moral graph of the subgraph induced by `keep`: parents of each
/// connectivity component are married and orientations dropped.
fn moralize(g: &ChainGraph, keep: &NodeSet) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inside = keep.mask(n);
    let mut adj = vec![vec![false; n]; n];
    let mut link = |a: usize, b: usize| {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    };
    for v in keep.iter() {
        for &u in g.parents_of(v).iter().chain(g.neighbors_of(v)) {
            if inside[u] {
                link(u, v);
            }
        }
    }
    // `keep` is closed under parents and neighbours, so each component of
    // the induced subgraph is a full component of `g`.
    for comp in g.components() {
        if !comp.first().is_some_and(|v| inside[v]) {
            continue;
        }
        let parents: Vec<usize> = g
            .parents(&comp)
            .expect("component nodes are in range")
            .iter()
            .filter(|&p| inside[p])
            .collect();
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                link(a, b);
            }
        }
    }
    adj.into_iter()
        .map(|row| (0..n).filter(|&j| row[j]).collect())
        .collect()
}
