//! AMP separation as reachability over (node, arrival mark) states.
//!
//! A route is open when each of its triplex occurrences lies in `D(Z)` and
//! each non-triplex occurrence lies outside it. Whether an occurrence of `B`
//! is triplex depends only on how the incoming and outgoing edges meet `B`,
//! so the set of open route prefixes collapses onto a finite state space.

use std::collections::VecDeque;

use super::SeparationQuery;
use crate::error::Result;
use crate::graph::{ChainGraph, NodeSet};

/// How the edge a route arrived by meets the current node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mark {
    Start,
    /// `prev -> cur`
    Head,
    /// `prev <- cur`
    Tail,
    /// `prev -- cur`
    Line,
}

impl Mark {
    fn slot(self) -> usize {
        self as usize
    }
}

/// `→B←`, `→B−` and `−B←` are the triplex shapes.
fn is_triplex(incoming: Mark, outgoing: Mark) -> bool {
    matches!(
        (incoming, outgoing),
        (Mark::Head, Mark::Head) | (Mark::Head, Mark::Line) | (Mark::Line, Mark::Head)
    )
}

/// Outcome of an AMP query with the evidence behind it.
#[derive(Clone, Debug)]
pub struct AmpTrace {
    pub separated: bool,
    /// An open route from `X` to `Y`, when one exists.
    pub route: Option<Vec<usize>>,
    /// Nodes reached by some open route prefix.
    pub reached: NodeSet,
}

pub fn amp_separated(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    Ok(amp_trace(g, q)?.separated)
}

pub fn amp_trace(g: &ChainGraph, q: &SeparationQuery) -> Result<AmpTrace> {
    q.check(g)?;
    let (sources, targets) = q.live_endpoints();
    let det = q.effective_conditioning().mask(g.node_count());
    Ok(search(g, &sources, &targets, &det))
}

fn search(g: &ChainGraph, sources: &[usize], targets: &[bool], det: &[bool]) -> AmpTrace {
    let n = g.node_count();
    let state = |v: usize, m: Mark| v * 4 + m.slot();
    let mut pred: Vec<Option<usize>> = vec![None; n * 4];
    let mut seen = vec![false; n * 4];
    let mut queue = VecDeque::new();
    for &s in sources {
        seen[state(s, Mark::Start)] = true;
        queue.push_back((s, Mark::Start));
    }

    let mut reached = NodeSet::new();
    while let Some((b, m_in)) = queue.pop_front() {
        reached.insert(b);
        if targets[b] && m_in != Mark::Start {
            let mut route = vec![b];
            let mut cur = state(b, m_in);
            while let Some(p) = pred[cur] {
                route.push(p / 4);
                cur = p;
            }
            route.reverse();
            return AmpTrace {
                separated: false,
                route: Some(route),
                reached,
            };
        }
        let moves = g
            .children_of(b)
            .iter()
            .map(|&c| (c, Mark::Tail, Mark::Head))
            .chain(g.parents_of(b).iter().map(|&c| (c, Mark::Head, Mark::Tail)))
            .chain(g.neighbors_of(b).iter().map(|&c| (c, Mark::Line, Mark::Line)));
        for (c, m_out, m_next) in moves {
            if m_in != Mark::Start && is_triplex(m_in, m_out) != det[b] {
                continue;
            }
            let s = state(c, m_next);
            if !seen[s] {
                seen[s] = true;
                pred[s] = Some(state(b, m_in));
                queue.push_back((c, m_next));
            }
        }
    }
    AmpTrace {
        separated: true,
        route: None,
        reached,
    }
}
