//! Gaussian parameterization of a chain graph as a system of linear
//! equations with correlated errors, and a numeric check of the Markov
//! property against the AMP independence model.
//!
//! Each component `K` satisfies `K = beta · pa(K) + e` with
//! `e ~ N(0, lambda)`. Zeros of `beta` follow the missing arrows and zeros of
//! `lambda⁻¹` the missing lines inside `K`. Means are zero throughout.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::ChainGraph;
use crate::models::IndependenceModel;

/// Largest `|pcor|` accepted as a vanishing partial correlation.
pub const MARKOV_TOLERANCE: f64 = 1e-7;
/// Smallest `|pcor|` counted as a visible dependence.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-3;

/// The equations of one component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentBlock {
    /// Node indices of the component, ascending.
    pub members: Vec<usize>,
    /// `pa(K)`, ascending.
    pub parents: Vec<usize>,
    /// `|K| × |pa(K)|` coefficients.
    pub beta: DMatrix<f64>,
    /// `|K| × |K|` error covariance.
    pub lambda: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSystem {
    pub names: Vec<String>,
    /// Components in topological order.
    pub blocks: Vec<ComponentBlock>,
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn spd_inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numeric(format!("{what} is not positive definite")))
}

/// Draws a system for `g`, reproducible from `seed`.
pub fn sample_system(g: &ChainGraph, seed: u64) -> Result<GaussianSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    for comp in g.component_order()? {
        let members: Vec<usize> = comp.iter().collect();
        let parents: Vec<usize> = g.parents(&comp)?.iter().collect();
        let k = members.len();

        let lambda = if k == 1 {
            DMatrix::from_element(1, 1, rng.gen_range(0.5..=2.0))
        } else {
            let mut precision = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in i + 1..k {
                    if g.has_undirected(members[i], members[j]) {
                        let v = signed(&mut rng, 0.1, 0.9);
                        precision[(i, j)] = v;
                        precision[(j, i)] = v;
                    }
                }
            }
            for i in 0..k {
                precision[(i, i)] = precision.row(i).iter().map(|v| v.abs()).sum::<f64>() + 1.0;
            }
            let mut lambda = spd_inverse(&precision, "error precision")?;
            // Symmetrize away rounding so downstream factorizations see an exact SPD matrix.
            lambda = (&lambda + lambda.transpose()) * 0.5;
            lambda
        };

        let mut beta = DMatrix::zeros(k, parents.len());
        for (r, &m) in members.iter().enumerate() {
            for (c, &p) in parents.iter().enumerate() {
                if g.has_directed(p, m) {
                    beta[(r, c)] = signed(&mut rng, 0.1, 1.0);
                }
            }
        }
        blocks.push(ComponentBlock {
            members,
            parents,
            beta,
            lambda,
        });
    }
    Ok(GaussianSystem {
        names: g.nodes().iter().map(|n| n.name.clone()).collect(),
        blocks,
    })
}

impl GaussianSystem {
    /// Departures from the zero pattern and definiteness `g` demands.
    pub fn violations(&self, g: &ChainGraph) -> Vec<String> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let label = b.members.iter().map(|&i| g.name(i)).collect::<Vec<_>>().join(",");
            match spd_inverse(&b.lambda, "lambda") {
                Err(_) => out.push(format!("lambda of {{{label}}} is not positive definite")),
                Ok(p) => {
                    for (i, &u) in b.members.iter().enumerate() {
                        for (j, &v) in b.members.iter().enumerate() {
                            if i < j && !g.has_undirected(u, v) && p[(i, j)].abs() > 1e-10 {
                                out.push(format!(
                                    "precision entry ({},{}) is {:e} without a line",
                                    g.name(u),
                                    g.name(v),
                                    p[(i, j)]
                                ));
                            }
                        }
                    }
                }
            }
            for (r, &m) in b.members.iter().enumerate() {
                for (c, &p) in b.parents.iter().enumerate() {
                    if !g.has_directed(p, m) && b.beta[(r, c)] != 0.0 {
                        out.push(format!("beta entry ({},{}) is nonzero without an arrow", g.name(m), g.name(p)));
                    }
                }
            }
        }
        out
    }

    fn check_shape(&self, g: &ChainGraph) -> Result<()> {
        let names: Vec<&str> = g.nodes().iter().map(|n| n.name.as_str()).collect();
        if self.names.iter().map(String::as_str).ne(names.iter().copied()) {
            return Err(Error::Argument("system was sampled for a different graph".into()));
        }
        let mut seen = vec![false; g.node_count()];
        for b in &self.blocks {
            let k = b.members.len();
            if b.beta.shape() != (k, b.parents.len()) || b.lambda.shape() != (k, k) {
                return Err(Error::Argument("block dimensions do not match its members".into()));
            }
            for &m in &b.members {
                if m >= seen.len() || std::mem::replace(&mut seen[m], true) {
                    return Err(Error::Argument("blocks do not partition the nodes".into()));
                }
            }
            if b.parents.iter().any(|&p| p >= seen.len() || !seen[p] || b.members.contains(&p)) {
                return Err(Error::Argument("blocks are not in topological order".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Argument("blocks do not cover every node".into()));
        }
        Ok(())
    }

    /// A stable text rendering, one matrix row per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let names = |idx: &[usize]| idx.iter().map(|&i| self.names[i].as_str()).collect::<Vec<_>>().join(",");
        let matrix = |out: &mut String, label: &str, m: &DMatrix<f64>| {
            let _ = writeln!(out, "{label}");
            for r in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.10}", m[(r, c)])).collect();
                let _ = writeln!(out, "  {}", row.join(" "));
            }
        };
        for b in &self.blocks {
            let _ = writeln!(out, "component {{{}}} parents {{{}}}", names(&b.members), names(&b.parents));
            if !b.parents.is_empty() {
                matrix(&mut out, "beta", &b.beta);
            }
            matrix(&mut out, "lambda", &b.lambda);
        }
        out
    }
}

/// Covariance over all nodes of `g`, built block by block.
pub fn joint_covariance(sys: &GaussianSystem, g: &ChainGraph) -> Result<DMatrix<f64>> {
    sys.check_shape(g)?;
    let n = g.node_count();
    let mut sigma = DMatrix::zeros(n, n);
    let mut done: Vec<usize> = Vec::new();
    for b in &sys.blocks {
        let s_pq = sigma.select_rows(&b.parents).select_columns(&done);
        let cov_kq = &b.beta * s_pq;
        let s_pp = sigma.select_rows(&b.parents).select_columns(&b.parents);
        let var_k = &b.beta * s_pp * b.beta.transpose() + &b.lambda;
        for (r, &m) in b.members.iter().enumerate() {
            for (c, &q) in done.iter().enumerate() {
                sigma[(m, q)] = cov_kq[(r, c)];
                sigma[(q, m)] = cov_kq[(r, c)];
            }
            for (c, &m2) in b.members.iter().enumerate() {
                sigma[(m, m2)] = var_k[(r, c)];
            }
        }
        done.extend(&b.members);
        let sub = sigma.select_rows(&done).select_columns(&done);
        if sub.cholesky().is_none() {
            return Err(Error::Numeric("covariance lost positive definiteness".into()));
        }
    }
    Ok(sigma)
}

/// Partial correlation of `a` and `b` given `z`.
pub fn partial_correlation(sigma: &DMatrix<f64>, a: usize, b: usize, z: &[usize]) -> Result<f64> {
    let n = sigma.nrows();
    if a == b || z.contains(&a) || z.contains(&b) {
        return Err(Error::Argument("a and b must be distinct and outside z".into()));
    }
    if a >= n || b >= n || z.iter().any(|&i| i >= n) {
        return Err(Error::Argument("index outside the covariance matrix".into()));
    }
    let mut idx = vec![a, b];
    idx.extend_from_slice(z);
    let sub = sigma.select_rows(&idx).select_columns(&idx);
    let p = spd_inverse(&sub, "covariance submatrix")?;
    Ok(-p[(0, 1)] / (p[(0, 0)] * p[(1, 1)]).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovEntry {
    pub triple: String,
    pub a: String,
    pub b: String,
    pub pcor: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MarkovReport {
    pub entries: Vec<MarkovEntry>,
    pub violations: usize,
    /// Pairwise triples `(a, b, z)` outside the model.
    pub dependent: usize,
    /// How many of those have `|pcor|` above [`DEPENDENCE_THRESHOLD`].
    pub visibly_dependent: usize,
}

impl MarkovReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn summary(&self) -> String {
        let frac = if self.dependent == 0 {
            1.0
        } else {
            self.visibly_dependent as f64 / self.dependent as f64
        };
        format!(
            "summary\tchecked {}\tviolations {}\tdependent {}/{} ({:.3})",
            self.entries.len(),
            self.violations,
            self.visibly_dependent,
            self.dependent,
            frac
        )
    }

    /// Tab-separated entries followed by the summary line.
    pub fn render(&self, failures_only: bool) -> String {
        let mut out = String::new();
        for e in self.entries.iter().filter(|e| !failures_only || !e.pass) {
            let verdict = if e.pass { "pass" } else { "FAIL" };
            let _ = writeln!(out, "{}\t{}\t{}\t{:.3e}\t{verdict}", e.triple, e.a, e.b, e.pcor);
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }
}

/// Checks every separation of `model` against the partial correlations of
/// `sys`, one entry per triple and pair `a ∈ X`, `b ∈ Y`.
pub fn markov_check(g: &ChainGraph, sys: &GaussianSystem, model: &IndependenceModel) -> Result<MarkovReport> {
    let sigma = joint_covariance(sys, g)?;
    let idx: Vec<usize> = model
        .universe()
        .iter()
        .map(|u| g.require(u))
        .collect::<Result<_>>()?;
    let bits = |mask: u64| -> Vec<usize> { (0..idx.len()).filter(|&k| mask >> k & 1 == 1).collect() };
    let to_nodes = |ks: &[usize]| -> Vec<usize> { ks.iter().map(|&k| idx[k]).collect() };

    let mut cache: HashMap<(usize, usize, u64), f64> = HashMap::new();
    let mut pcor = |ka: usize, kb: usize, z: u64| -> Result<f64> {
        let key = (ka.min(kb), ka.max(kb), z);
        if let Some(&v) = cache.get(&key) {
            return Ok(v);
        }
        let v = partial_correlation(&sigma, idx[key.0], idx[key.1], &to_nodes(&bits(z)))?;
        cache.insert(key, v);
        Ok(v)
    };

    let mut report = MarkovReport::default();
    for t in model.triples() {
        for ka in bits(t.x) {
            for kb in bits(t.y) {
                let v = pcor(ka, kb, t.z)?;
                let pass = v.abs() <= MARKOV_TOLERANCE;
                if !pass {
                    report.violations += 1;
                }
                report.entries.push(MarkovEntry {
                    triple: model.render(t),
                    a: model.universe()[ka].clone(),
                    b: model.universe()[kb].clone(),
                    pcor: v,
                    pass,
                });
            }
        }
    }

    let m = idx.len();
    let full = (1u64 << m) - 1;
    for ka in 0..m {
        for kb in ka + 1..m {
            let rest = full & !(1 << ka) & !(1 << kb);
            let mut z = rest;
            loop {
                let x = model.universe()[ka].as_str();
                let y = model.universe()[kb].as_str();
                let zn: Vec<&str> = model.names(z);
                if !model.contains(&[x], &[y], &zn)? {
                    report.dependent += 1;
                    if pcor(ka, kb, z)?.abs() > DEPENDENCE_THRESHOLD {
                        report.visibly_dependent += 1;
                    }
                }
                if z == 0 {
                    break;
                }
                z = (z - 1) & rest;
            }
        }
    }
    Ok(report)
}
