//! The `cgfile 1` plain-text graph format.
//!
//! ```text
//! cgfile 1
//! # comment
//! node A
//! node eps(A) error
//! edge eps(A) -> A
//! edge A -- B
//! det eps(A) <- A
//! ```
//!
//! Node kinds default to `variable`. Nodes may be declared after the edges
//! that use them. Serialization is byte-stable: nodes, then arrows, then
//! lines, then rules, each in name order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::determinism::{DeterminationTable, Rule};
use crate::graph::{ChainGraph, Edge, Node, NodeKind};

pub const HEADER: &str = "cgfile 1";

/// Every problem found in a file, with 1-based line numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub problems: Vec<(usize, String)>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (line, msg)) in self.problems.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "line {line}: {msg}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: ChainGraph,
    pub table: DeterminationTable,
}

pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
    let mut problems = Vec::new();
    let mut nodes: BTreeMap<String, (usize, NodeKind)> = BTreeMap::new();
    let mut edges: Vec<(usize, Edge)> = Vec::new();
    let mut rules: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut header_seen = false;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !header_seen {
            if tokens != ["cgfile", "1"] {
                problems.push((line_no, format!("expected header `{HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        match tokens[0] {
            "node" => {
                let kind = match tokens.len() {
                    2 => Ok(NodeKind::Variable),
                    3 => tokens[2].parse::<NodeKind>(),
                    _ => Err("expected `node <name> [variable|error|selection]`".to_string()),
                };
                match kind {
                    Ok(kind) => {
                        let name = tokens[1].to_string();
                        if let Some((first, _)) = nodes.get(&name) {
                            problems.push((line_no, format!("duplicate node `{name}` (first declared on line {first})")));
                        } else {
                            nodes.insert(name, (line_no, kind));
                        }
                    }
                    Err(msg) => problems.push((line_no, msg)),
                }
            }
            "edge" => match tokens.as_slice() {
                [_, a, op, b] if *op == "->" || *op == "--" => {
                    if a == b {
                        problems.push((line_no, format!("self-loop at `{a}`")));
                    } else if *op == "->" {
                        edges.push((line_no, Edge::directed(*a, *b)));
                    } else {
                        edges.push((line_no, Edge::undirected(*a, *b)));
                    }
                }
                _ => problems.push((line_no, "expected `edge <a> -> <b>` or `edge <a> -- <b>`".into())),
            },
            "det" => match tokens.as_slice() {
                [_, target, arrow, dets @ ..] if *arrow == "<-" && !dets.is_empty() => {
                    rules.push((
                        line_no,
                        target.to_string(),
                        dets.iter().map(|d| d.to_string()).collect(),
                    ));
                }
                _ => problems.push((line_no, "expected `det <target> <- <d1> <d2> ...`".into())),
            },
            other => problems.push((line_no, format!("unknown directive `{other}`"))),
        }
    }
    if !header_seen {
        problems.push((1, format!("missing header `{HEADER}`")));
    }

    let mut pairs: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (line_no, e) in &edges {
        let (a, b) = e.endpoints();
        for end in [a, b] {
            if !nodes.contains_key(end) {
                problems.push((*line_no, format!("unknown node `{end}`")));
            }
        }
        let key = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
        if let Some(first) = pairs.get(&key) {
            problems.push((*line_no, format!("second edge between `{a}` and `{b}` (first on line {first})")));
        } else {
            pairs.insert(key, *line_no);
        }
    }
    let mut table = DeterminationTable::new();
    for (line_no, target, dets) in rules {
        let unknown: Vec<&String> = std::iter::once(&target)
            .chain(&dets)
            .filter(|n| !nodes.contains_key(*n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !unknown.is_empty() {
            for n in unknown {
                problems.push((line_no, format!("unknown node `{n}`")));
            }
            continue;
        }
        match Rule::new(target, dets) {
            Ok(rule) => table.insert(rule),
            Err(e) => problems.push((line_no, e.to_string())),
        }
    }

    if !problems.is_empty() {
        problems.sort();
        return Err(ParseError { problems });
    }
    let graph = ChainGraph::new(
        nodes.into_iter().map(|(name, (_, kind))| Node::new(name, kind)),
        edges.into_iter().map(|(_, e)| e),
    )
    .map_err(|e| ParseError {
        problems: vec![(1, e.to_string())],
    })?;
    Ok(GraphFile { graph, table })
}

pub fn serialize(g: &ChainGraph, table: &DeterminationTable) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for n in g.nodes() {
        out.push_str(&format!("node {} {}\n", n.name, n.kind));
    }
    for e in g.edges() {
        out.push_str(&format!("edge {e}\n"));
    }
    let mut rules: Vec<&Rule> = table.rules().collect();
    rules.sort_by(|a, b| (a.target(), a.determinants()).cmp(&(b.target(), b.determinants())));
    for r in rules {
        let dets: Vec<&str> = r.determinants().iter().map(String::as_str).collect();
        out.push_str(&format!("det {} <- {}\n", r.target(), dets.join(" ")));
    }
    out
}
