//! Separation under the AMP and LWF readings of a chain graph, with
//! deterministic nodes.
//!
//! Every query computes `D(Z)` once and runs the criterion with `D(Z)` in
//! place of `Z`. A node of `X` or `Y` that is determined by `Z` without
//! being in it blocks every route it ends: under both readings such a node
//! behaves exactly like a conditioned endpoint, which the LWF section
//! criterion already rules out on its own.
//!
//! Each reading has a fast engine ([`amp_separated`], [`lwf_separated`])
//! and a brute-force oracle for small graphs ([`amp_separated_oracle`],
//! [`lwf_route_oracle`]).

mod amp;
mod lwf;
mod oracle;

use std::fmt;

use crate::determinism::{CompiledTable, DeterminationTable};
use crate::error::{Error, Result};
use crate::graph::{ChainGraph, NodeSet};

pub use amp::{amp_separated, amp_trace, AmpTrace};
pub use lwf::{lwf_separated, lwf_trace, LwfTrace};
pub use oracle::{amp_separated_oracle, lwf_route_oracle, AMP_ORACLE_LIMIT, LWF_ORACLE_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Amp,
    Lwf,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Amp => "amp",
            Semantics::Lwf => "lwf",
        })
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amp" => Ok(Semantics::Amp),
            "lwf" => Ok(Semantics::Lwf),
            other => Err(format!("unknown semantics `{other}` (expected amp or lwf)")),
        }
    }
}

/// A validated `X ⊥ Y | Z` question about one graph.
#[derive(Clone, Debug)]
pub struct SeparationQuery {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
    pub semantics: Semantics,
    determined: NodeSet,
    node_count: usize,
}

impl SeparationQuery {
    pub fn new(
        g: &ChainGraph,
        x: NodeSet,
        y: NodeSet,
        z: NodeSet,
        semantics: Semantics,
        table: &DeterminationTable,
    ) -> Result<Self> {
        let compiled = table.compile(g)?;
        Self::with_compiled(g, x, y, z, semantics, &compiled)
    }

    pub fn with_compiled(
        g: &ChainGraph,
        x: NodeSet,
        y: NodeSet,
        z: NodeSet,
        semantics: Semantics,
        table: &CompiledTable,
    ) -> Result<Self> {
        let n = g.node_count();
        for (label, s) in [("x", &x), ("y", &y), ("z", &z)] {
            if let Some(i) = s.iter().find(|&i| i >= n) {
                return Err(Error::Query(format!("{label} holds out-of-range node index {i}")));
            }
        }
        if x.is_empty() || y.is_empty() {
            return Err(Error::Query("x and y must be nonempty".into()));
        }
        if !x.is_disjoint(&y) || !x.is_disjoint(&z) || !y.is_disjoint(&z) {
            return Err(Error::Query("x, y and z must be pairwise disjoint".into()));
        }
        let determined = table.determined(&z);
        Ok(SeparationQuery {
            x,
            y,
            z,
            semantics,
            determined,
            node_count: n,
        })
    }

    /// Builds a query from node names.
    pub fn from_names<S: AsRef<str>>(
        g: &ChainGraph,
        x: &[S],
        y: &[S],
        z: &[S],
        semantics: Semantics,
        table: &DeterminationTable,
    ) -> Result<Self> {
        Self::new(g, g.set(x)?, g.set(y)?, g.set(z)?, semantics, table)
    }

    /// `D(Z)`.
    pub fn effective_conditioning(&self) -> &NodeSet {
        &self.determined
    }

    /// Query endpoints that `Z` determines without containing them.
    pub fn determined_endpoints(&self) -> NodeSet {
        self.x.union(&self.y).intersection(&self.determined)
    }

    fn check(&self, g: &ChainGraph) -> Result<()> {
        if g.node_count() != self.node_count {
            return Err(Error::Query("query was built for a different graph".into()));
        }
        Ok(())
    }

    /// Endpoints that can still carry an open route.
    fn live_endpoints(&self) -> (Vec<usize>, Vec<bool>) {
        let sources = self.x.difference(&self.determined).iter().collect();
        let targets = self.y.difference(&self.determined).mask(self.node_count);
        (sources, targets)
    }
}

/// `D(Z)` of a query.
pub fn effective_conditioning(q: &SeparationQuery) -> NodeSet {
    q.effective_conditioning().clone()
}

/// Dispatches on the query's semantics.
pub fn separated(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    match q.semantics {
        Semantics::Amp => amp_separated(g, q),
        Semantics::Lwf => lwf_separated(g, q),
    }
}

/// Dispatches to the oracle of the query's semantics.
pub fn separated_oracle(g: &ChainGraph, q: &SeparationQuery) -> Result<bool> {
    match q.semantics {
        Semantics::Amp => amp_separated_oracle(g, q),
        Semantics::Lwf => lwf_route_oracle(g, q),
    }
}

/// Renders a route using the edge symbols of `g`, e.g. `C <- A -> B`.
pub fn render_route(g: &ChainGraph, route: &[usize]) -> String {
    let mut out = String::new();
    for (k, &v) in route.iter().enumerate() {
        if k > 0 {
            let u = route[k - 1];
            let sym = if g.has_directed(u, v) {
                " -> "
            } else if g.has_directed(v, u) {
                " <- "
            } else if g.has_undirected(u, v) {
                " -- "
            } else {
                " ~ "
            };
            out.push_str(sym);
        }
        out.push_str(g.name(v));
    }
    out
}
