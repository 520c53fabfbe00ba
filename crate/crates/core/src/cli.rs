//! The `cgkit` command line.
//!
//! Exit codes: 0 success (or "separated"), 1 a negative answer ("connected",
//! an invalid graph, a failed check), 2 usage, parse and input errors, 3 size
//! guard refusals. Errors go to standard error as `error[<category>]: <msg>`.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::determinism::determined_set;
use crate::error::{Error, Result};
use crate::format::{parse, serialize, GraphFile};
use crate::gaussian::{markov_check, sample_system, MarkovReport};
use crate::models::{
    check_theorem, project_model, random_cg, Enumeration, IndependenceModel, Theorem, Verdict,
    UNIVERSE_LIMIT,
};
use crate::separation::{amp_trace, lwf_trace, render_route, Semantics, SeparationQuery};
use crate::transforms::{marginalize_eamp_ordered, to_eamp, to_selection_dag, EampGraph};

/// Environment variable that replaces the default of every `--seed`.
pub const SEED_VAR: &str = "CGKIT_SEED";

#[derive(Parser, Debug)]
#[command(name = "cgkit", version, about = "Chain graphs under AMP and LWF separation, with deterministic nodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Graph file, or `-` for standard input.
    file: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the file describes a chain graph.
    Validate(Input),
    /// Decide X ⊥ Y | Z.
    Separate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "amp")]
        semantics: Semantics,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
        /// Print the open route or what blocks every route.
        #[arg(long)]
        trace: bool,
    },
    /// List D(Z), the nodes Z determines.
    Determine {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// Add an error node per variable.
    ToEamp(Input),
    /// Replace the lines of an error-augmented graph by selection nodes.
    ToDag(Input),
    /// Remove variables from an error-augmented graph, in the order given.
    Marginalize {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        drop: Vec<String>,
    },
    /// Dump every separation among a set of nodes.
    Model {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "amp")]
        semantics: Semantics,
        /// Defaults to every node of the graph.
        #[arg(long, value_delimiter = ',')]
        universe: Vec<String>,
        /// Nodes added to every conditioning set.
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
        #[arg(long, default_value_t = UNIVERSE_LIMIT)]
        limit: usize,
    },
    /// Marginalize and condition a model dump.
    Project {
        /// Model dump, or `-` for standard input.
        #[arg(default_value = "-")]
        file: String,
        #[arg(long, value_delimiter = ',')]
        l: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        s: Vec<String>,
    },
    /// Check one equivalence on a variable-only chain graph.
    Equiv {
        #[command(flatten)]
        input: Input,
        /// 1, 2, 3, 4, c1 or c2.
        #[arg(long)]
        theorem: Theorem,
        /// Variables to marginalize, required by theorem 4.
        #[arg(long, value_delimiter = ',')]
        l: Vec<String>,
    },
    /// Sample Gaussian systems and test every separation numerically.
    GaussCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print every entry instead of failures only.
        #[arg(long)]
        all: bool,
    },
    /// Print a random chain graph.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Outcome of a command that ran to completion.
struct Done {
    code: i32,
    out: String,
}

fn ok(out: String) -> Result<Done> {
    Ok(Done { code: 0, out })
}

fn nonempty(names: Vec<String>) -> Vec<String> {
    names.into_iter().filter(|n| !n.is_empty()).collect()
}

fn default_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("{SEED_VAR}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        let mut text = String::new();
        let res = if path == "-" {
            self.stdin.read_to_string(&mut text).map(|_| ())
        } else {
            std::fs::read_to_string(path).map(|t| text = t)
        };
        res.map_err(|e| Error::Argument(format!("cannot read `{path}`: {e}")))?;
        Ok(text)
    }

    fn graph(&mut self, path: &str) -> Result<GraphFile> {
        Ok(parse(&self.read(path)?)?)
    }

    fn valid_graph(&mut self, path: &str) -> Result<GraphFile> {
        let f = self.graph(path)?;
        let problems = f.graph.validate();
        if !problems.is_empty() {
            let list: Vec<String> = problems.iter().map(ToString::to_string).collect();
            return Err(Error::Structure(list.join("; ")));
        }
        Ok(f)
    }

    fn eamp(&mut self, path: &str) -> Result<EampGraph> {
        let f = self.graph(path)?;
        let gp = EampGraph::from_graph(f.graph)?;
        if !f.table.is_empty() && f.table != gp.table {
            return Err(Error::Structure(
                "det lines differ from the rules the error nodes imply".into(),
            ));
        }
        Ok(gp)
    }
}

fn execute(cmd: Command, io: &mut Io<'_>) -> Result<Done> {
    match cmd {
        Command::Validate(input) => {
            let f = io.graph(&input.file)?;
            let mut problems: Vec<String> = f.graph.validate().iter().map(ToString::to_string).collect();
            if let Err(e) = f.table.compile(&f.graph) {
                problems.push(e.to_string());
            }
            if problems.is_empty() {
                ok("ok\n".into())
            } else {
                Ok(Done {
                    code: 1,
                    out: problems.iter().map(|p| format!("{p}\n")).collect(),
                })
            }
        }
        Command::Separate {
            input,
            semantics,
            x,
            y,
            z,
            trace,
        } => {
            let f = io.valid_graph(&input.file)?;
            let g = &f.graph;
            let q = SeparationQuery::from_names(g, &nonempty(x), &nonempty(y), &nonempty(z), semantics, &f.table)?;
            let mut out = String::new();
            let sep = match semantics {
                Semantics::Amp => {
                    let tr = amp_trace(g, &q)?;
                    if trace {
                        out.push_str(&format!("D(Z) = {{{}}}\n", g.names(q.effective_conditioning()).join(",")));
                        match &tr.route {
                            Some(r) => out.push_str(&format!("open route: {}\n", render_route(g, r))),
                            None => out.push_str(&format!("reachable from X: {{{}}}\n", g.names(&tr.reached).join(","))),
                        }
                    }
                    tr.separated
                }
                Semantics::Lwf => {
                    let tr = lwf_trace(g, &q)?;
                    if trace {
                        out.push_str(&format!("D(Z) = {{{}}}\n", g.names(q.effective_conditioning()).join(",")));
                        out.push_str(&format!("anterior set: {{{}}}\n", g.names(&tr.anterior).join(",")));
                        if let Some(p) = &tr.moral_path {
                            out.push_str(&format!("moral path: {}\n", render_route(g, p)));
                        }
                    }
                    tr.separated
                }
            };
            let blocked = q.determined_endpoints();
            if trace && !blocked.is_empty() {
                out.push_str(&format!("determined endpoints: {{{}}}\n", g.names(&blocked).join(",")));
            }
            out.insert_str(0, if sep { "separated\n" } else { "connected\n" });
            Ok(Done {
                code: if sep { 0 } else { 1 },
                out,
            })
        }
        Command::Determine { input, z } => {
            let f = io.graph(&input.file)?;
            let z: BTreeSet<String> = nonempty(z).into_iter().collect();
            f.graph.set(&z)?;
            f.table.compile(&f.graph)?;
            ok(determined_set(&f.table, &z).into_iter().map(|n| n + "\n").collect())
        }
        Command::ToEamp(input) => {
            let f = io.valid_graph(&input.file)?;
            let gp = to_eamp(&f.graph)?;
            ok(serialize(&gp.graph, &gp.table))
        }
        Command::ToDag(input) => {
            let gp = io.eamp(&input.file)?;
            let dag = to_selection_dag(&gp)?;
            ok(serialize(&dag.graph, &dag.table))
        }
        Command::Marginalize { input, drop } => {
            let gp = io.eamp(&input.file)?;
            let gl = marginalize_eamp_ordered(&gp, &nonempty(drop))?;
            ok(serialize(&gl.graph, &gl.table))
        }
        Command::Model {
            input,
            semantics,
            universe,
            given,
            limit,
        } => {
            let f = io.valid_graph(&input.file)?;
            let g = &f.graph;
            let given: BTreeSet<String> = nonempty(given).into_iter().collect();
            let universe: BTreeSet<String> = match nonempty(universe) {
                u if u.is_empty() => g.name_set(&g.all_nodes()).difference(&given).cloned().collect(),
                u => u.into_iter().collect(),
            };
            let m = Enumeration::new(g, &f.table, semantics, universe)
                .given(given)
                .limit(limit)
                .run()?;
            ok(m.dump())
        }
        Command::Project { file, l, s } => {
            let m = IndependenceModel::parse_dump(&io.read(&file)?)?;
            let l = nonempty(l).into_iter().collect();
            let s = nonempty(s).into_iter().collect();
            ok(project_model(&m, &l, &s)?.dump())
        }
        Command::Equiv { input, theorem, l } => {
            let f = io.valid_graph(&input.file)?;
            let l: BTreeSet<String> = nonempty(l).into_iter().collect();
            if theorem == Theorem::Four && l.is_empty() {
                return Err(Error::Argument("theorem 4 needs --l".into()));
            }
            match check_theorem(&f.graph, theorem, &l)? {
                Verdict::Pass => ok("pass\n".into()),
                Verdict::Fail(c) => Ok(Done {
                    code: 1,
                    out: c.to_string(),
                }),
            }
        }
        Command::GaussCheck {
            input,
            seeds,
            seed,
            all,
        } => {
            let f = io.valid_graph(&input.file)?;
            let g = &f.graph;
            if !f.table.is_empty() {
                return Err(Error::Argument("gauss-check takes a graph without det lines".into()));
            }
            let first = default_seed(seed)?;
            let vars = g.name_set(&g.all_nodes());
            let model = Enumeration::new(g, &f.table, Semantics::Amp, vars).run()?;
            let reports: Vec<(u64, MarkovReport)> = (first..first.saturating_add(seeds))
                .into_par_iter()
                .map(|s| Ok((s, markov_check(g, &sample_system(g, s)?, &model)?)))
                .collect::<Result<_>>()?;
            let mut out = String::from("# triple\ta\tb\tpcor\tverdict\n");
            let mut violations = 0;
            for (s, r) in &reports {
                out.push_str(&format!("# seed {s}\n"));
                out.push_str(&r.render(!all));
                violations += r.violations;
            }
            out.push_str(&format!("total\tseeds {}\tviolations {violations}\n", reports.len()));
            Ok(Done {
                code: if violations == 0 { 0 } else { 1 },
                out,
            })
        }
        Command::Gen { nodes, density, seed } => {
            let g = random_cg(nodes, density, default_seed(seed)?)?;
            ok(serialize(&g, &Default::default()))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard(_) => 3,
        _ => 2,
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let body = text.split("\n\nUsage").next().unwrap_or("");
            let msg: Vec<&str> = body.split_whitespace().collect();
            let msg = msg.join(" ");
            let _ = writeln!(stderr, "error[usage]: {}", msg.trim_start_matches("error: "));
            return 2;
        }
    };
    let mut io = Io { stdin };
    match execute(cli.command, &mut io) {
        Ok(done) => {
            let _ = stdout.write_all(done.out.as_bytes());
            done.code
        }
        Err(Error::Parse(p)) => {
            for (line, msg) in &p.problems {
                let _ = writeln!(stderr, "error[parse]: line {line}: {msg}");
            }
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.category());
            exit_code(&e)
        }
    }
}
