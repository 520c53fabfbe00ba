//! Markov-equivalence checks between a chain graph and the graphs derived
//! from it, with counterexample reporting.

use std::collections::BTreeSet;
use std::fmt;

use super::{model_diff, Enumeration, IndependenceModel, Triple};
use crate::determinism::DeterminationTable;
use crate::error::{Error, Result};
use crate::format::serialize;
use crate::graph::ChainGraph;
use crate::separation::{amp_trace, lwf_trace, render_route, Semantics, SeparationQuery};
use crate::transforms::{marginalize_eamp, to_eamp, to_selection_dag};

/// Largest universe an equivalence check enumerates.
pub const EQUIV_LIMIT: usize = 12;

/// The equivalences between `G`, its error-augmented graph `G'`, the
/// selection DAG `G''` and the marginalized `[G']_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// `I_AMP(G) = [I_AMP(G')]_eps`
    One,
    /// `I_AMP(G') = I_LWF(G')`
    Two,
    /// `I_LWF(G') = [I_LWF(G'')]^S`
    Three,
    /// `[I_AMP(G')]_{L ∪ eps} = [I_AMP([G']_L)]_eps`
    Four,
    /// `I_AMP(G) = [I_LWF(G')]_eps`
    CorollaryOne,
    /// `I_AMP(G) = [I_LWF(G'')]_eps^S = [I_AMP(G'')]_eps^S`
    CorollaryTwo,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::One,
        Theorem::Two,
        Theorem::Three,
        Theorem::Four,
        Theorem::CorollaryOne,
        Theorem::CorollaryTwo,
    ];
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::One => "1",
            Theorem::Two => "2",
            Theorem::Three => "3",
            Theorem::Four => "4",
            Theorem::CorollaryOne => "c1",
            Theorem::CorollaryTwo => "c2",
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1" => Ok(Theorem::One),
            "2" => Ok(Theorem::Two),
            "3" => Ok(Theorem::Three),
            "4" => Ok(Theorem::Four),
            "c1" => Ok(Theorem::CorollaryOne),
            "c2" => Ok(Theorem::CorollaryTwo),
            other => Err(format!("unknown theorem `{other}` (expected 1, 2, 3, 4, c1 or c2)")),
        }
    }
}

/// A failed equivalence: the triples on which the two models disagree and
/// what each engine saw for the first of them.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub theorem: Theorem,
    pub left: String,
    pub right: String,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
    pub traces: Vec<String>,
    /// The input graph in file format.
    pub graph_file: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem {}: counterexample", self.theorem)?;
        writeln!(f, "left: {}", self.left)?;
        writeln!(f, "right: {}", self.right)?;
        writeln!(f, "only in left ({}):", self.only_left.len())?;
        for t in &self.only_left {
            writeln!(f, "  {t}")?;
        }
        writeln!(f, "only in right ({}):", self.only_right.len())?;
        for t in &self.only_right {
            writeln!(f, "  {t}")?;
        }
        for t in &self.traces {
            writeln!(f, "trace {t}")?;
        }
        writeln!(f, "graph:")?;
        f.write_str(&self.graph_file)
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    Fail(Box<Counterexample>),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// One side of an equivalence: a graph read under some semantics, with
/// some nodes always conditioned on.
#[derive(Clone)]
struct Side {
    label: String,
    graph: ChainGraph,
    table: DeterminationTable,
    semantics: Semantics,
    universe: BTreeSet<String>,
    given: BTreeSet<String>,
}

impl Side {
    fn model(&self) -> Result<IndependenceModel> {
        Enumeration::new(&self.graph, &self.table, self.semantics, self.universe.clone())
            .given(self.given.clone())
            .limit(EQUIV_LIMIT)
            .run()
    }

    fn trace(&self, m: &IndependenceModel, t: &Triple) -> Result<String> {
        let g = &self.graph;
        let x = g.set(m.names(t.x))?;
        let y = g.set(m.names(t.y))?;
        let z = g.set(m.names(t.z).into_iter().chain(self.given.iter().map(String::as_str)))?;
        let q = SeparationQuery::new(g, x, y, z, self.semantics, &self.table)?;
        let d = g.names(q.effective_conditioning()).join(",");
        let what = match self.semantics {
            Semantics::Amp => {
                let tr = amp_trace(g, &q)?;
                match tr.route {
                    Some(r) => format!("open route {}", render_route(g, &r)),
                    None => format!("separated; reachable {{{}}}", g.names(&tr.reached).join(",")),
                }
            }
            Semantics::Lwf => {
                let tr = lwf_trace(g, &q)?;
                match tr.moral_path {
                    Some(p) => format!("moral path {}", render_route(g, &p)),
                    None => format!("separated; anterior {{{}}}", g.names(&tr.anterior).join(",")),
                }
            }
        };
        Ok(format!("{} on {}: D(Z)={{{d}}}: {what}", self.semantics, self.label))
    }
}

/// Checks one equivalence for the variable-only chain graph `g`.
///
/// `marginal` is the set `L` of Theorem 4 and is ignored otherwise.
/// Projected models are enumerated directly over the surviving universe with
/// the conditioned nodes added to every conditioning set.
pub fn check_theorem(
    g: &ChainGraph,
    theorem: Theorem,
    marginal: &BTreeSet<String>,
) -> Result<Verdict> {
    let gp = to_eamp(g)?;
    let vars = gp.variables.clone();
    let all = gp.graph.name_set(&gp.graph.all_nodes());
    let empty = DeterminationTable::new();

    let base = Side {
        label: "G".into(),
        graph: g.clone(),
        table: empty,
        semantics: Semantics::Amp,
        universe: vars.clone(),
        given: BTreeSet::new(),
    };
    let eamp = |semantics: Semantics, universe: &BTreeSet<String>| Side {
        label: "G'".into(),
        graph: gp.graph.clone(),
        table: gp.table.clone(),
        semantics,
        universe: universe.clone(),
        given: BTreeSet::new(),
    };
    let selection = |semantics: Semantics, universe: &BTreeSet<String>| -> Result<Side> {
        let dag = to_selection_dag(&gp)?;
        Ok(Side {
            label: "G''".into(),
            graph: dag.graph,
            table: dag.table,
            semantics,
            universe: universe.clone(),
            given: dag.selection,
        })
    };

    let pairs: Vec<(Side, Side)> = match theorem {
        Theorem::One => vec![(base, eamp(Semantics::Amp, &vars))],
        Theorem::Two => vec![(eamp(Semantics::Amp, &all), eamp(Semantics::Lwf, &all))],
        Theorem::Three => vec![(eamp(Semantics::Lwf, &all), selection(Semantics::Lwf, &all)?)],
        Theorem::CorollaryOne => vec![(base, eamp(Semantics::Lwf, &vars))],
        Theorem::CorollaryTwo => vec![
            (base.clone(), selection(Semantics::Lwf, &vars)?),
            (base, selection(Semantics::Amp, &vars)?),
        ],
        Theorem::Four => {
            if let Some(bad) = marginal.iter().find(|v| !vars.contains(*v)) {
                return Err(Error::Argument(format!("`{bad}` is not a variable of the graph")));
            }
            let kept: BTreeSet<String> = vars.difference(marginal).cloned().collect();
            let gl = marginalize_eamp(&gp, marginal)?;
            let right = Side {
                label: "[G']_L".into(),
                graph: gl.graph.clone(),
                table: gl.table.clone(),
                semantics: Semantics::Amp,
                universe: kept.clone(),
                given: BTreeSet::new(),
            };
            vec![(eamp(Semantics::Amp, &kept), right)]
        }
    };

    for (left, right) in pairs {
        let (lm, rm) = (left.model()?, right.model()?);
        let (only_l, only_r) = model_diff(&lm, &rm)?;
        if only_l.is_empty() && only_r.is_empty() {
            continue;
        }
        let first = only_l
            .triples()
            .first()
            .map(|t| (&only_l, *t))
            .or_else(|| only_r.triples().first().map(|t| (&only_r, *t)));
        let mut traces = Vec::new();
        if let Some((m, t)) = first {
            traces.push(format!("for {}", m.render(&t)));
            traces.push(left.trace(m, &t)?);
            traces.push(right.trace(m, &t)?);
        }
        let label = |s: &Side| {
            let mut l = format!("I_{}({})", s.semantics.to_string().to_uppercase(), s.label);
            if !s.given.is_empty() {
                l.push_str(" given {");
                l.push_str(&s.given.iter().cloned().collect::<Vec<_>>().join(","));
                l.push('}');
            }
            l.push_str(&format!(" over {{{}}}", s.universe.iter().cloned().collect::<Vec<_>>().join(",")));
            l
        };
        return Ok(Verdict::Fail(Box::new(Counterexample {
            theorem,
            left: label(&left),
            right: label(&right),
            only_left: only_l.triples().iter().map(|t| only_l.render(t)).collect(),
            only_right: only_r.triples().iter().map(|t| only_r.render(t)).collect(),
            traces,
            graph_file: serialize(g, &DeterminationTable::new()),
        })));
    }
    Ok(Verdict::Pass)
}
