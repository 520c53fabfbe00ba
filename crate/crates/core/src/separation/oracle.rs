//! Brute-force separation deciders for small graphs.
//!
//! These read the path and route criteria off their definitions and share no
//! code with the engines, so the test suites can use them as references.

use std::collections::VecDeque;

use super::SeparationQuery;
use crate::error::{Error, Result};
use crate::graph::ChainGraph;

/// Largest graph the AMP path oracle accepts.
pub const AMP_ORACLE_LIMIT: usize = 12;
/// Largest graph the LWF route oracle accepts.
pub const LWF_ORACLE_LIMIT: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Arrow,
    Tail,
    Line,
}

/// How the edge between `b` and `other` meets `b`.
fn end_at(g: &ChainGraph, b: usize, other: usize) -> End {
    if g.has_directed(other, b) {
        End::Arrow
    } else if g.has_directed(b, other) {
        End::Tail
    } else {
        End::Line
    }
}

fn guard(g: &ChainGraph, limit: usize, what: &str) -> Result<()> {
    if g.node_count() > limit {
        return Err(Error::Guard(format!(
            "{what} oracle handles at most {limit} nodes, graph has {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Enumerates simple paths and applies the AMP path criterion with `D(Z)`:
/// triplex nodes in `D(Z) ∪ san(D(Z))`; non-triplex nodes outside `D(Z)`
/// unless they sit in `A -- B -- C` and have a parent outside `D(Z)`.
pub fn amp_separated_oracle(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    q.check(g)?;
    guard(g, AMP_ORACLE_LIMIT, "AMP path")?;
    let n = g.node_count();
    let d = q.effective_conditioning();
    let det = d.mask(n);
    let san = g.strict_ascendants(d)?.mask(n);
    let loose_parent: Vec<bool> = (0..n)
        .map(|b| g.parents_of(b).iter().any(|&p| !det[p]))
        .collect();
    let (sources, targets) = q.live_endpoints();

    let ctx = PathSearch {
        g,
        det: &det,
        san: &san,
        loose_parent: &loose_parent,
        targets: &targets,
    };
    for s in sources {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        if ctx.extend(&mut vec![s], &mut on_path) {
            return Ok(false);
        }
    }
    Ok(true)
}

struct PathSearch<'a> {
    g: &'a ChainGraph,
    det: &'a [bool],
    san: &'a [bool],
    loose_parent: &'a [bool],
    targets: &'a [bool],
}

impl PathSearch<'_> {
    fn interior_ok(&self, a: usize, b: usize, c: usize) -> bool {
        let (left, right) = (end_at(self.g, b, a), end_at(self.g, b, c));
        let triplex = matches!(
            (left, right),
            (End::Arrow, End::Arrow) | (End::Arrow, End::Line) | (End::Line, End::Arrow)
        );
        if triplex {
            self.det[b] || self.san[b]
        } else {
            !self.det[b] || (left == End::Line && right == End::Line && self.loose_parent[b])
        }
    }

    /// True if some open path extends `path` to a target.
    fn extend(&self, path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
        let b = *path.last().expect("path is never empty");
        if path.len() > 1 && self.targets[b] {
            return true;
        }
        let g = self.g;
        let next: Vec<usize> = g
            .parents_of(b)
            .iter()
            .chain(g.children_of(b))
            .chain(g.neighbors_of(b))
            .copied()
            .collect();
        for c in next {
            if on_path[c] {
                continue;
            }
            if path.len() > 1 && !self.interior_ok(path[path.len() - 2], b, c) {
                continue;
            }
            path.push(c);
            on_path[c] = true;
            let found = self.extend(path, on_path);
            on_path[c] = false;
            path.pop();
            if found {
                return true;
            }
        }
        false
    }
}

/// Route prefixes are summarised by the node they end at, whether the
/// section they end in was entered through an arrowhead, and whether that
/// section already holds a node of `D(Z)`. Closing a section checks it
/// against the collider-section criterion; prefixes are explored up to
/// `2·n²` edges.
pub fn lwf_route_oracle(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    q.check(g)?;
    guard(g, LWF_ORACLE_LIMIT, "LWF route")?;
    let n = g.node_count();
    let det = q.effective_conditioning().mask(n);
    let (sources, targets) = q.live_endpoints();
    let bound = 2 * n * n;

    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    struct Prefix {
        node: usize,
        entered_by_arrow: bool,
        section_determined: bool,
    }
    let key = |p: Prefix| p.node * 4 + (p.entered_by_arrow as usize) * 2 + p.section_determined as usize;

    let mut seen = vec![false; n * 4];
    let mut queue = VecDeque::new();
    for s in sources {
        let p = Prefix {
            node: s,
            entered_by_arrow: false,
            section_determined: det[s],
        };
        seen[key(p)] = true;
        queue.push_back((p, 0usize));
    }
    while let Some((p, len)) = queue.pop_front() {
        // The last section ends at the route's endpoint, so it is not a collider.
        if len > 0 && targets[p.node] && !p.section_determined {
            return Ok(false);
        }
        if len == bound {
            continue;
        }
        let v = p.node;
        let mut steps = Vec::new();
        for &w in g.neighbors_of(v) {
            steps.push(Prefix {
                node: w,
                entered_by_arrow: p.entered_by_arrow,
                section_determined: p.section_determined || det[w],
            });
        }
        for (w, arrow_into_v) in g
            .parents_of(v)
            .iter()
            .map(|&w| (w, true))
            .chain(g.children_of(v).iter().map(|&w| (w, false)))
        {
            let collider = p.entered_by_arrow && arrow_into_v;
            if collider != p.section_determined {
                continue;
            }
            steps.push(Prefix {
                node: w,
                entered_by_arrow: !arrow_into_v,
                section_determined: det[w],
            });
        }
        for s in steps {
            if !seen[key(s)] {
                seen[key(s)] = true;
                queue.push_back((s, len + 1));
            }
        }
    }
    Ok(true)
}
