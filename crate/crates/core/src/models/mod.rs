//! Independence models: exhaustive enumeration, marginalization and
//! conditioning, and comparison.
//!
//! A model is kept as an explicit sorted list of canonical triples. Node
//! sets are bit masks over the model's universe, which is sorted by name.
//! A triple `(x, y, z)` is canonical when the smallest name of `x` sorts
//! before the smallest name of `y`; for disjoint sets that is the same as
//! comparing their sorted name lists.

mod equiv;
mod random;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::determinism::DeterminationTable;
use crate::error::{Error, Result};
use crate::graph::{ChainGraph, NodeSet};
use crate::separation::{separated, separated_oracle, Semantics, SeparationQuery};

pub use equiv::{check_theorem, Counterexample, Theorem, Verdict, EQUIV_LIMIT};
pub use random::{all_chain_graphs, random_cg};

/// Largest universe [`enumerate_model`] accepts.
pub const UNIVERSE_LIMIT: usize = 8;

/// Canonical triple of bit masks over a model's universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl Triple {
    /// Orders `x` and `y` canonically.
    pub fn canonical(x: u64, y: u64, z: u64) -> Self {
        if lowest(x) < lowest(y) {
            Triple { x, y, z }
        } else {
            Triple { x: y, y: x, z }
        }
    }
}

fn lowest(mask: u64) -> u32 {
    mask.trailing_zeros()
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// Number of canonical disjoint triples over a universe of `m` nodes.
pub fn triple_count(m: usize) -> f64 {
    let m = m as i32;
    (4f64.powi(m) - 2.0 * 3f64.powi(m) + 2f64.powi(m)) / 2.0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceModel {
    universe: Vec<String>,
    triples: Vec<Triple>,
}

impl IndependenceModel {
    /// Builds a model from named triples, canonicalizing their order.
    pub fn from_named<S: AsRef<str>>(
        universe: impl IntoIterator<Item = S>,
        triples: impl IntoIterator<Item = (Vec<S>, Vec<S>, Vec<S>)>,
    ) -> Result<Self> {
        let universe: Vec<String> = universe
            .into_iter()
            .map(|s| s.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if universe.len() > 64 {
            return Err(Error::Guard("models hold at most 64 nodes".into()));
        }
        let mut model = IndependenceModel {
            universe,
            triples: Vec::new(),
        };
        for (x, y, z) in triples {
            let (x, y, z) = (model.mask(&x)?, model.mask(&y)?, model.mask(&z)?);
            if x == 0 || y == 0 {
                return Err(Error::Argument("x and y must be nonempty".into()));
            }
            if x & y != 0 || x & z != 0 || y & z != 0 {
                return Err(Error::Argument("x, y and z must be disjoint".into()));
            }
            model.triples.push(Triple::canonical(x, y, z));
        }
        model.triples.sort_unstable();
        model.triples.dedup();
        Ok(model)
    }

    fn from_parts(universe: Vec<String>, mut triples: Vec<Triple>) -> Self {
        triples.sort_unstable();
        triples.dedup();
        IndependenceModel { universe, triples }
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.universe
            .binary_search_by(|u| u.as_str().cmp(name))
            .map_err(|_| Error::UnknownNode(name.to_string()))
    }

    /// Bit mask of a set of universe names.
    pub fn mask<S: AsRef<str>>(&self, names: &[S]) -> Result<u64> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | 1 << self.position(n.as_ref())?))
    }

    pub fn names(&self, mask: u64) -> Vec<&str> {
        bits(mask).map(|i| self.universe[i].as_str()).collect()
    }

    /// Whether `x ⊥ y | z` is in the model, in either orientation.
    pub fn contains<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> Result<bool> {
        let t = Triple::canonical(self.mask(x)?, self.mask(y)?, self.mask(z)?);
        Ok(self.triples.binary_search(&t).is_ok())
    }

    /// One `X | Y | Z` line, names comma-separated.
    pub fn render(&self, t: &Triple) -> String {
        format!(
            "{} | {} | {}",
            self.names(t.x).join(","),
            self.names(t.y).join(","),
            self.names(t.z).join(",")
        )
        .trim_end()
        .to_string()
    }

    /// Triples in name order.
    fn sorted_for_display(&self) -> Vec<&Triple> {
        let mut out: Vec<&Triple> = self.triples.iter().collect();
        out.sort_by_cached_key(|t| (bits(t.x).collect::<Vec<_>>(), bits(t.y).collect::<Vec<_>>(), bits(t.z).collect::<Vec<_>>()));
        out
    }

    /// Text dump: a `# universe` comment, then one canonical triple per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# universe {}", self.universe.join(",")).unwrap();
        for t in self.sorted_for_display() {
            out.push_str(&self.render(t));
            out.push('\n');
        }
        out
    }

    /// Reads a dump. Without a `# universe` line the universe is the set of
    /// names mentioned by the triples.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut universe: Option<Vec<String>> = None;
        let mut triples = Vec::new();
        let mut problems = Vec::new();
        let split = |s: &str| -> Vec<String> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect()
        };
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# universe") {
                universe = Some(split(rest));
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 3 {
                problems.push((k + 1, format!("expected `X | Y | Z`, got `{line}`")));
                continue;
            }
            triples.push((split(parts[0]), split(parts[1]), split(parts[2])));
        }
        if !problems.is_empty() {
            return Err(crate::format::ParseError { problems }.into());
        }
        let universe = universe.unwrap_or_else(|| {
            triples
                .iter()
                .flat_map(|(x, y, z)| x.iter().chain(y).chain(z).cloned())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        });
        Self::from_named(universe, triples)
    }
}

/// Configures an exhaustive enumeration of `[I(G)]^S` over a universe.
///
/// Triples range over disjoint `(X, Y, Z)` inside the universe; each is
/// evaluated with `Z ∪ given` as the conditioning set, so the result equals
/// projecting the model over `universe ∪ given` with `s = given`.
#[derive(Clone, Debug)]
pub struct Enumeration<'a> {
    graph: &'a ChainGraph,
    table: &'a DeterminationTable,
    semantics: Semantics,
    universe: BTreeSet<String>,
    given: BTreeSet<String>,
    limit: usize,
    oracle: bool,
}

impl<'a> Enumeration<'a> {
    pub fn new(
        graph: &'a ChainGraph,
        table: &'a DeterminationTable,
        semantics: Semantics,
        universe: BTreeSet<String>,
    ) -> Self {
        Enumeration {
            graph,
            table,
            semantics,
            universe,
            given: BTreeSet::new(),
            limit: UNIVERSE_LIMIT,
            oracle: false,
        }
    }

    /// Nodes added to every conditioning set.
    pub fn given(mut self, given: BTreeSet<String>) -> Self {
        self.given = given;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    /// Decide triples with the brute-force oracle instead of the engine.
    pub fn with_oracle(mut self) -> Self {
        self.oracle = true;
        self
    }

    pub fn run(&self) -> Result<IndependenceModel> {
        let g = self.graph;
        let m = self.universe.len();
        if m > self.limit.min(64) {
            return Err(Error::Guard(format!(
                "universe of {m} nodes exceeds the limit of {} (about {:.0} triples)",
                self.limit,
                triple_count(m)
            )));
        }
        let members: Vec<usize> = self
            .universe
            .iter()
            .map(|n| g.require(n))
            .collect::<Result<_>>()?;
        let given = g.set(&self.given)?;
        if members.iter().any(|&v| given.contains(v)) {
            return Err(Error::Argument("universe and conditioning nodes overlap".into()));
        }
        let table = self.table.compile(g)?;
        let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

        let decide = |a: usize, b: usize, z: &NodeSet| -> Result<bool> {
            let q = SeparationQuery::with_compiled(
                g,
                NodeSet::singleton(members[a]),
                NodeSet::singleton(members[b]),
                z.clone(),
                self.semantics,
                &table,
            )?;
            if self.oracle {
                separated_oracle(g, &q)
            } else {
                separated(g, &q)
            }
        };

        let per_z: Vec<Vec<Triple>> = (0..=full)
            .into_par_iter()
            .map(|zmask| -> Result<Vec<Triple>> {
                let mut z = given.clone();
                z.extend(bits(zmask).map(|i| members[i]));
                let rest = full & !zmask;
                // sep[a]: members separated from a given z
                let mut sep = vec![0u64; m];
                for a in bits(rest) {
                    for b in bits(rest).filter(|&b| b > a) {
                        if decide(a, b, &z)? {
                            sep[a] |= 1 << b;
                            sep[b] |= 1 << a;
                        }
                    }
                }
                Ok(expand(rest, zmask, &sep))
            })
            .collect::<Result<_>>()?;

        let universe = self.universe.iter().cloned().collect();
        Ok(IndependenceModel::from_parts(
            universe,
            per_z.into_iter().flatten().collect(),
        ))
    }
}

/// All canonical `(X, Y)` inside `rest` whose cross pairs are all separated.
fn expand(rest: u64, z: u64, sep: &[u64]) -> Vec<Triple> {
    let mut out = Vec::new();
    let mut x = rest;
    while x != 0 {
        let common = bits(x).fold(rest, |acc, a| acc & sep[a]) & !x;
        // Y must not contain anything below min(X) for canonical order.
        let low = lowest(x);
        let allowed = common & !((1u64 << low) - 1);
        let mut y = allowed;
        while y != 0 {
            out.push(Triple { x, y, z });
            y = (y - 1) & allowed;
        }
        x = (x - 1) & rest;
    }
    out
}

/// All separations among `universe`, under the given semantics and rules.
pub fn enumerate_model(
    g: &ChainGraph,
    table: &DeterminationTable,
    semantics: Semantics,
    universe: &BTreeSet<String>,
) -> Result<IndependenceModel> {
    Enumeration::new(g, table, semantics, universe.clone()).run()
}

/// `[m]_l^s`: marginalize `l`, condition on `s`.
pub fn project_model(
    m: &IndependenceModel,
    l: &BTreeSet<String>,
    s: &BTreeSet<String>,
) -> Result<IndependenceModel> {
    if let Some(both) = l.intersection(s).next() {
        return Err(Error::Argument(format!("`{both}` is both marginalized and conditioned")));
    }
    let lmask = m.mask(&l.iter().collect::<Vec<_>>())?;
    let smask = m.mask(&s.iter().collect::<Vec<_>>())?;
    let kept: Vec<usize> = (0..m.universe.len())
        .filter(|&i| (lmask | smask) >> i & 1 == 0)
        .collect();
    let mut remap = [u8::MAX; 64];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new as u8;
    }
    let compress = |mask: u64| bits(mask).fold(0u64, |acc, i| acc | 1 << remap[i]);
    let triples = m
        .triples
        .iter()
        .filter(|t| t.z & smask == smask && (t.x | t.y | t.z) & lmask == 0 && (t.x | t.y) & smask == 0)
        .map(|t| Triple {
            x: compress(t.x),
            y: compress(t.y),
            z: compress(t.z & !smask),
        })
        .collect();
    let universe = kept.iter().map(|&i| m.universe[i].clone()).collect();
    Ok(IndependenceModel::from_parts(universe, triples))
}

/// Triples only in `m1` and only in `m2`.
pub fn model_diff(
    m1: &IndependenceModel,
    m2: &IndependenceModel,
) -> Result<(IndependenceModel, IndependenceModel)> {
    if m1.universe != m2.universe {
        return Err(Error::Argument(format!(
            "universes differ: {{{}}} vs {{{}}}",
            m1.universe.join(","),
            m2.universe.join(",")
        )));
    }
    let only = |a: &IndependenceModel, b: &IndependenceModel| {
        let triples = a
            .triples
            .iter()
            .filter(|t| b.triples.binary_search(t).is_err())
            .copied()
            .collect();
        IndependenceModel::from_parts(a.universe.clone(), triples)
    };
    Ok((only(m1, m2), only(m2, m1)))
}

#[cfg(test)]
mod tests;
