//! Machine-checked instances of each counting identity and inequality.
//!
//! Every check produces a [`VerificationReport`]. Theorem-typed checks must
//! pass on every instance; a failure is a defect. Observation-typed checks
//! (the per-vertex ratio against `ℓ`) only record what happens at desk-scale
//! degrees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chromatic::{available_colors, coloring_ratio_with, Budget, Counter, PartialColoring};
use crate::coupon::{self, BoundParams, CouponInstance};
use crate::error::{Error, Result};
use crate::graph::{self, Graph, Palette};
use crate::number::{BigCount, ExactRatio};
use crate::rng;
use crate::sampling::{exact_expected_available, exact_tail_probability, UniformSampler};

pub mod check {
    pub const IDENTITY: &str = "identity";
    pub const TAIL_BOUND: &str = "tail_bound";
    pub const FACTORIZATION: &str = "factorization";
    pub const CLAIM_RATIO: &str = "claim_ratio";
    pub const CONSTRUCTIVE: &str = "constructive_coloring";
    pub const COUNT_ORACLE: &str = "count_oracle";
    pub const COUNT_POLYNOMIAL: &str = "count_polynomial";
    pub const COUPON_MEAN_ORACLE: &str = "coupon_mean_oracle";
    pub const COUPON_VARIANCE_ORACLE: &str = "coupon_variance_oracle";
    pub const COUPON_NEGATIVE_CORRELATION: &str = "coupon_negative_correlation";
    pub const COUPON_VARIANCE_LE_MEAN: &str = "coupon_variance_le_mean";
    pub const COUPON_AMGM: &str = "coupon_amgm";
    pub const COUPON_REORDERING: &str = "coupon_reordering";
    pub const FINAL_BOUND: &str = "final_bound";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Exact identity or inequality that must hold.
    Theorem,
    /// Recorded measurement; no pass/fail.
    Observation,
    /// Float comparison with a stated tolerance.
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
    HypothesisViolated,
    Holds,
    FailsAtThisScale,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("status serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    /// `g:<hash>` for graphs, the instance JSON for coupon checks.
    pub instance: String,
    pub kind: CheckKind,
    pub status: Status,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn new(check: &str, instance: impl Into<String>, kind: CheckKind) -> Self {
        VerificationReport {
            check: check.to_string(),
            instance: instance.into(),
            kind,
            status: Status::Inapplicable,
            params: BTreeMap::new(),
            lhs: None,
            relation: None,
            rhs: None,
            tolerance: None,
            note: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn sides(mut self, lhs: impl ToString, relation: &str, rhs: impl ToString) -> Self {
        self.lhs = Some(lhs.to_string());
        self.relation = Some(relation.to_string());
        self.rhs = Some(rhs.to_string());
        self
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn pass_if(self, ok: bool) -> Self {
        self.status(if ok { Status::Pass } else { Status::Fail })
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A theorem-typed check that failed.
    pub fn is_failure(&self) -> bool {
        self.kind != CheckKind::Observation && self.status == Status::Fail
    }

    /// Witness sides differ; meaningful for equality checks.
    pub fn sides_differ(&self) -> bool {
        self.lhs.is_some() && self.lhs != self.rhs
    }

    pub const CSV_HEADER: [&'static str; 10] = [
        "check", "instance", "kind", "status", "params", "lhs", "relation", "rhs", "tolerance",
        "note",
    ];

    /// One CSV row matching [`CSV_HEADER`](Self::CSV_HEADER); params are
    /// `key=value` pairs joined by `;`.
    pub fn csv_row(&self) -> [String; 10] {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        [
            self.check.clone(),
            self.instance.clone(),
            serde_json::to_value(self.kind).expect("kind").as_str().expect("str").to_string(),
            self.status.to_string(),
            params,
            self.lhs.clone().unwrap_or_default(),
            self.relation.clone().unwrap_or_default(),
            self.rhs.clone().unwrap_or_default(),
            self.tolerance.map(|t| t.to_string()).unwrap_or_default(),
            self.note.clone().unwrap_or_default(),
        ]
    }
}

/// Six significant digits, printed in shortest form.
pub fn float6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.5e}").parse::<f64>().expect("formatted float parses").to_string()
}

pub fn graph_instance(g: &Graph) -> String {
    format!("g:{}", g.hash_hex())
}

fn graph_report(check: &str, g: &Graph, kind: CheckKind, k: u32) -> VerificationReport {
    VerificationReport::new(check, graph_instance(g), kind)
        .param("n", g.n())
        .param("m", g.edge_count())
        .param("k", k)
}

/// `E|L_c(v)| = |C(G)| / |C(G − v)|`, both sides exact.
pub fn verify_identity(counter: &mut Counter, g: &Graph, v: usize, k: u32) -> Result<VerificationReport> {
    let r = graph_report(check::IDENTITY, g, CheckKind::Theorem, k).param("v", v);
    let ratio = match coloring_ratio_with(counter, g, v, k as u64) {
        Ok(ratio) => ratio,
        Err(Error::ZeroDenominator(msg)) => return Ok(r.note(msg)),
        Err(e) => return Err(e),
    };
    let mean = exact_expected_available(counter, g, v, k)?;
    Ok(r.pass_if(mean == ratio).sides(&mean, "=", &ratio))
}

/// `P(|L_c(u)| ≤ t) ≤ t·|C(G−v−u)| / |C(G−v)|`.
pub fn verify_tail_bound(
    counter: &mut Counter,
    g: &Graph,
    v: usize,
    u: usize,
    k: u32,
    t: u32,
) -> Result<VerificationReport> {
    g.check_vertex(v)?;
    g.check_vertex(u)?;
    if !g.has_edge(v, u) {
        return Err(Error::NotANeighbor { v, u });
    }
    let r = graph_report(check::TAIL_BOUND, g, CheckKind::Theorem, k)
        .param("v", v)
        .param("u", u)
        .param("t", t);
    let (gv, _) = g.delete_vertex(v)?;
    let (gvu, _) = g.delete_vertices(&[v, u]);
    let den = counter.count_colorings(&gv, k as u64)?;
    if den.is_zero() {
        return Ok(r.note("G - v has no proper coloring"));
    }
    let num = counter.count_colorings(&gvu, k as u64)?;
    let rhs = ExactRatio::from(
        ExactRatio::from_counts(&num, &den)?.into_rational() * num_bigint::BigInt::from(t),
    );
    let lhs = exact_tail_probability(counter, g, v, u, k, t)?;
    let mut r = r.pass_if(lhs <= rhs).sides(&lhs, "<=", &rhs);
    if !num.is_zero() {
        // t / (|C(G−v)| / |C(G−v−u)|): the same bound read through the
        // vertex-ratio of G − v at u.
        let ratio_at_u = ExactRatio::from_counts(&den, &num)?;
        let t_over = ExactRatio::from(
            num_rational::BigRational::from_integer(t.into()) / ratio_at_u.as_rational(),
        );
        r = r.param("ratio_at_u", &ratio_at_u).param("t_over_ratio", t_over);
    }
    if lhs == rhs {
        r = r.note("tight");
    }
    Ok(r)
}

/// Extensions of a coloring `c0` of `G₀ = G − v − N(v)` to `G − v` are in
/// bijection with `Π_{u ∈ N(v)} L_{c0}(u)`.
///
/// `c0` is indexed by the vertices of `g` and must color exactly `V(G₀)`.
/// On graphs with a triangle the report says `hypothesis_violated` and the
/// witnesses show whether the product formula survived.
pub fn verify_factorization(
    counter: &mut Counter,
    g: &Graph,
    v: usize,
    c0: &PartialColoring,
) -> Result<VerificationReport> {
    g.check_vertex(v)?;
    let k = c0.k();
    if c0.n() != g.n() {
        return Err(Error::param("c0 must be indexed by the vertices of g"));
    }
    let nbrs = g.neighbors(v);
    for w in 0..g.n() {
        let outside_g0 = w == v || nbrs.contains(&w);
        if outside_g0 == c0.get(w).is_some() {
            return Err(Error::param(format!(
                "c0 must color exactly G - v - N(v); vertex {w} disagrees"
            )));
        }
    }
    if !c0.is_proper(g) {
        return Err(Error::param("c0 is not a proper coloring"));
    }
    let lists: Vec<Vec<u32>> = nbrs
        .iter()
        .map(|&u| available_colors(g, c0, u))
        .collect::<Result<_>>()?;
    let product: BigCount = lists.iter().map(|l| BigCount::from(l.len() as u64)).product();
    let (gv, map) = g.delete_vertex(v)?;
    let start = c0.restrict(&map);
    let positions: Vec<usize> = nbrs
        .iter()
        .map(|&u| map.old_to_new[u].expect("neighbor survives"))
        .collect();
    let mut tuples = BTreeSet::new();
    let mut all_in_lists = true;
    let visited = counter.enumerate_extensions(&gv, &start, |c| {
        let tuple: Vec<u32> = positions.iter().map(|&p| c[p]).collect();
        all_in_lists &= tuple
            .iter()
            .zip(&lists)
            .all(|(x, l)| l.binary_search(x).is_ok());
        tuples.insert(tuple);
    })?;
    let extensions = BigCount::from(visited);
    let bijective = all_in_lists && tuples.len() as u64 == visited && extensions == product;
    let triangle_free = g.is_triangle_free();
    let r = graph_report(check::FACTORIZATION, g, CheckKind::Theorem, k)
        .param("v", v)
        .param("c0", serde_json::to_string(c0.colors()).expect("colors serialize"))
        .sides(&extensions, "=", &product);
    Ok(if triangle_free {
        r.pass_if(bijective)
    } else {
        r.status(Status::HypothesisViolated).note(if bijective {
            "graph has a triangle; product formula holds here"
        } else {
            "graph has a triangle; product formula fails"
        })
    })
}

/// Per-vertex `|C(G)|/|C(G − v)|` against `ℓ`. Observational.
pub fn verify_claim_ratio(
    counter: &mut Counter,
    g: &Graph,
    k: u32,
    ell: f64,
) -> Result<Vec<VerificationReport>> {
    let total = counter.count_colorings(g, k as u64)?;
    (0..g.n())
        .map(|v| {
            let r = graph_report(check::CLAIM_RATIO, g, CheckKind::Observation, k)
                .param("v", v)
                .param("ell", float6(ell));
            if total.is_zero() {
                return Ok(r.note(format!("G has no proper {k}-coloring")));
            }
            let ratio = match coloring_ratio_with(counter, g, v, k as u64) {
                Ok(ratio) => ratio,
                Err(Error::ZeroDenominator(msg)) => return Ok(r.note(msg)),
                Err(e) => return Err(e),
            };
            let holds = ratio.to_f64() >= ell;
            Ok(r.sides(&ratio, ">=", float6(ell)).status(if holds {
                Status::Holds
            } else {
                Status::FailsAtThisScale
            }))
        })
        .collect()
}

/// Colors vertices `0, 1, …` in turn with the smallest color that still
/// has a positive extension count. `None` when `g` has no proper
/// `k`-coloring.
pub fn construct_coloring_sequential(
    counter: &mut Counter,
    g: &Graph,
    k: u32,
) -> Result<Option<PartialColoring>> {
    if counter.count_colorings(g, k as u64)?.is_zero() {
        return Ok(None);
    }
    let mut partial = PartialColoring::empty(g.n(), k);
    for v in 0..g.n() {
        let mut placed = false;
        for c in 1..=k {
            let next = partial.with(v, c)?;
            if !counter.count_extensions(g, &next)?.is_zero() {
                partial = next;
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::NoProperColoring);
        }
    }
    Ok(Some(partial))
}

pub fn verify_construction(counter: &mut Counter, g: &Graph, k: u32) -> Result<VerificationReport> {
    let count = counter.count_colorings(g, k as u64)?;
    let built = construct_coloring_sequential(counter, g, k)?;
    let r = graph_report(check::CONSTRUCTIVE, g, CheckKind::Theorem, k).param("count", &count);
    Ok(match built {
        Some(c) => {
            let ok = !count.is_zero() && c.is_total() && c.is_proper(g);
            r.pass_if(ok)
                .note(serde_json::to_string(c.colors()).expect("colors serialize"))
        }
        None => r.pass_if(count.is_zero()).note("infeasible"),
    })
}

/// Oracle: all `k^n` assignments, when there are at most `limit`.
pub fn brute_force_count(g: &Graph, k: u32, limit: u64) -> Option<u64> {
    let n = g.n() as u32;
    let space = (k as u64).checked_pow(n).filter(|&s| s <= limit)?;
    if space == 0 {
        return Some(0);
    }
    let edges = g.edges();
    let mut colors = vec![0u32; g.n()];
    let mut count = 0;
    for mut code in 0..space {
        for c in colors.iter_mut() {
            *c = (code % k as u64) as u32;
            code /= k as u64;
        }
        if edges.iter().all(|&(u, v)| colors[u] != colors[v]) {
            count += 1;
        }
    }
    Some(count)
}

/// Coupon-process checks on one instance: oracle equalities (when the
/// outcome space fits), negative correlation, `Var ≤ E`, AM-GM and the
/// reordered product.
pub fn verify_coupon(
    inst: &CouponInstance,
    params: &BoundParams,
    delta: u64,
    max_outcomes: u64,
) -> Result<Vec<VerificationReport>> {
    let id = inst.to_json();
    let base = |check: &str| {
        VerificationReport::new(check, id.clone(), CheckKind::Theorem)
            .param("k", inst.k())
            .param("d", inst.d())
    };
    let mut out = Vec::new();
    let mean = coupon::exact_uncovered_expectation(inst, &BoundParams::unconditioned())?;
    let var = coupon::uncovered_variance(inst);
    match coupon::enumerate_uncovered(inst, max_outcomes) {
        Ok(dist) => {
            let m = dist.mean();
            let v = dist.variance();
            out.push(base(check::COUPON_MEAN_ORACLE).pass_if(mean == m).sides(&mean, "=", &m));
            out.push(base(check::COUPON_VARIANCE_ORACLE).pass_if(var == v).sides(&var, "=", &v));
        }
        Err(Error::ResourceGuard(msg)) => {
            out.push(base(check::COUPON_MEAN_ORACLE).note(msg.clone()));
            out.push(base(check::COUPON_VARIANCE_ORACLE).note(msg));
        }
        Err(e) => return Err(e),
    }

    let mut worst: Option<(ExactRatio, u32, u32)> = None;
    for j in 1..=inst.k() {
        for j2 in j + 1..=inst.k() {
            let cov = coupon::uncovered_covariance(inst, j, j2)?;
            if worst.as_ref().is_none_or(|(w, _, _)| cov > *w) {
                worst = Some((cov, j, j2));
            }
        }
    }
    let r = base(check::COUPON_NEGATIVE_CORRELATION);
    out.push(match worst {
        Some((cov, j, j2)) => r
            .param("pair", format!("{j},{j2}"))
            .pass_if(cov.is_negative() || cov == ExactRatio::zero())
            .sides(&cov, "<=", ExactRatio::zero()),
        None => r.note("fewer than two colors"),
    });
    out.push(base(check::COUPON_VARIANCE_LE_MEAN).pass_if(var <= mean).sides(&var, "<=", &mean));

    let b = params.b.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let r = base(check::COUPON_AMGM).param("t", params.t).param("b", &b);
    out.push(if params.b.len() as u64 >= inst.k() as u64 {
        r.note("B covers the palette")
    } else {
        let am = coupon::amgm_lower_bound(inst, params)?;
        let lhs = ExactRatio::from(am.mean.as_rational() / num_bigint::BigInt::from(am.m)).pow(am.m as i32);
        r.param("mean", &am.mean)
            .param("bound", float6(am.value))
            .pass_if(am.holds)
            .sides(lhs, ">=", &am.inner_product)
    });

    let r = base(check::COUPON_REORDERING)
        .param("t", params.t)
        .param("b", &b)
        .param("delta", delta);
    out.push(if params.t == 0 {
        r.note("t = 0")
    } else {
        let re = coupon::reordering_lower_bound(inst, params, delta)?;
        r.pass_if(re.holds && re.equals_inner_product).sides(&re.lhs, ">=", &re.rhs)
    });
    Ok(out)
}

/// Lists `L_{c0}(u)` for `u ∈ N(v)`, in neighbor order.
pub fn harvest_lists(g: &Graph, v: usize, c0: &PartialColoring) -> Result<CouponInstance> {
    g.check_vertex(v)?;
    let lists = g
        .neighbors(v)
        .iter()
        .map(|&u| available_colors(g, c0, u))
        .collect::<Result<Vec<_>>>()?;
    CouponInstance::new(c0.k(), lists)
}

/// Draws `X_i` for every list with `|L_i| ≤ t`; returns the colors drawn.
pub fn condition_small_lists(inst: &CouponInstance, t: u32, rng: &mut rng::Rng) -> BTreeSet<u32> {
    inst.small_lists(t)
        .map(|l| l[rng.gen_range(0..l.len())])
        .collect()
}

/// One family of test graphs.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Every labeled graph on `1..=max_n` vertices.
    AllGraphs { max_n: usize },
    /// `K₂, C₅, Grötzsch, …`, `depth` graphs.
    Mycielski { depth: usize },
    /// `count` random triangle-free graphs.
    Random { n: usize, p: f64, count: usize },
    /// Anything [`graph::named`] accepts.
    Named(String),
}

/// Comma-separated families: `all-n<N>`, `mycielski-<d>`,
/// `random-n<N>-p<P>-x<count>`, or graph names (`petersen`, `c5`, …).
/// An empty string is the empty corpus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusSpec {
    pub families: Vec<Family>,
}

impl FromStr for CorpusSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut families = Vec::new();
        for (i, tok) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: format!("{tok:?}: {msg}") };
            let tok = tok.to_ascii_lowercase();
            let fam = if let Some(n) = tok.strip_prefix("all-n") {
                let max_n = n.parse().map_err(|_| bad("bad vertex count"))?;
                if max_n > 8 {
                    return Err(bad("all-graph enumeration is limited to n <= 8"));
                }
                Family::AllGraphs { max_n }
            } else if let Some(d) = tok.strip_prefix("mycielski-") {
                Family::Mycielski { depth: d.parse().map_err(|_| bad("bad depth"))? }
            } else if let Some(rest) = tok.strip_prefix("random-n") {
                let (n, rest) = rest.split_once("-p").ok_or_else(|| bad("expected -p<P>"))?;
                let (p, count) = rest.split_once("-x").ok_or_else(|| bad("expected -x<count>"))?;
                let p: f64 = p.parse().map_err(|_| bad("bad probability"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad("probability outside [0, 1]"));
                }
                Family::Random {
                    n: n.parse().map_err(|_| bad("bad vertex count"))?,
                    p,
                    count: count.parse().map_err(|_| bad("bad count"))?,
                }
            } else {
                graph::named(&tok, 0).map_err(|_| bad("unknown family or graph"))?;
                Family::Named(tok)
            };
            families.push(fam);
        }
        Ok(CorpusSpec { families })
    }
}

impl CorpusSpec {
    /// Materializes the corpus. Random family member `i` uses seed
    /// `seed + i`.
    pub fn graphs(&self, seed: u64) -> Result<Vec<Graph>> {
        let mut out = Vec::new();
        for fam in &self.families {
            match fam {
                Family::AllGraphs { max_n } => {
                    for n in 1..=*max_n {
                        out.extend(graph::all_graphs(n));
                    }
                }
                Family::Mycielski { depth } => out.extend(graph::mycielski_tower(*depth)),
                Family::Random { n, p, count } => {
                    for i in 0..*count {
                        out.push(graph::gen_random_triangle_free(*n, *p, seed.wrapping_add(i as u64))?);
                    }
                }
                Family::Named(name) => out.push(graph::named(name, seed)?),
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KPolicy {
    Fixed(Vec<u32>),
    /// `k = ⌈(1+ε)Δ/ln Δ⌉` from the graph's max degree; `Δ + 1` when
    /// `Δ < 2`.
    DegreeDerived { eps: f64 },
}

impl KPolicy {
    pub fn palettes(&self, g: &Graph) -> Result<Vec<u32>> {
        match self {
            KPolicy::Fixed(ks) => Ok(ks.clone()),
            KPolicy::DegreeDerived { eps } => {
                let delta = g.max_degree() as u64;
                let k = if delta < 2 {
                    delta + 1
                } else {
                    Palette::from_degree(delta, *eps)?.k
                };
                let k = u32::try_from(k).map_err(|_| Error::param("palette too large"))?;
                Ok(vec![k])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub budget: Budget,
    /// Colorings `c0` of `G₀` tried per vertex in the factorization check,
    /// in lexicographic order; `None` tries all of them.
    pub max_c0: Option<usize>,
    /// Overrides `ℓ(Δ) = ln²Δ`.
    pub ell: Option<f64>,
    /// Overrides `t(Δ) = max(2, ⌈√(ln Δ)⌉)`.
    pub t: Option<u32>,
    /// Graphs with `k^n` at most this get a brute-force count oracle.
    pub brute_force_limit: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            budget: Budget::default(),
            max_c0: Some(4),
            ell: None,
            t: None,
            brute_force_limit: 1_000_000,
        }
    }
}

/// Runs every check over the corpus, one aggregated report per
/// `(check, graph, k)`, sorted by check name then instance.
pub fn run_suite(corpus: &CorpusSpec, policy: &KPolicy, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let graphs = corpus.graphs(cfg.seed)?;
    let jobs: Vec<(Graph, u32)> = graphs
        .into_iter()
        .map(|g| Ok(policy.palettes(&g)?.into_iter().map(move |k| (g.clone(), k)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let results: Vec<Result<Vec<VerificationReport>>> = jobs
        .par_iter()
        .map(|(g, k)| check_graph(g, *k, cfg))
        .collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    reports.sort_by(|a, b| (&a.check, &a.instance).cmp(&(&b.check, &b.instance)));
    Ok(reports)
}

/// All graph checks for one `(g, k)`, aggregated per check.
pub fn check_graph(g: &Graph, k: u32, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut counter = Counter::new(cfg.budget);
    let counter = &mut counter;
    let delta = g.max_degree() as u64;
    let mut out = Vec::new();

    let count = counter.count_colorings(g, k as u64)?;
    let poly = counter.chromatic_polynomial(g)?.eval(k as i64);
    out.push(
        graph_report(check::COUNT_POLYNOMIAL, g, CheckKind::Theorem, k)
            .pass_if(poly == count.to_bigint())
            .sides(&count, "=", &poly),
    );
    if let Some(brute) = brute_force_count(g, k, cfg.brute_force_limit) {
        out.push(
            graph_report(check::COUNT_ORACLE, g, CheckKind::Theorem, k)
                .pass_if(count == brute)
                .sides(&count, "=", brute),
        );
    }
    out.push(verify_construction(counter, g, k)?);

    let ell = cfg.ell.unwrap_or_else(|| coupon::default_ell(delta.max(1)));
    out.push(aggregate(check::CLAIM_RATIO, g, k, verify_claim_ratio(counter, g, k, ell)?));

    let mut identity = Vec::new();
    let mut tails = Vec::new();
    let mut factor = Vec::new();
    let mut coupons: BTreeMap<&'static str, Vec<VerificationReport>> = BTreeMap::new();
    let graph_seed = u64::from_str_radix(&g.hash_hex(), 16).expect("hex hash");
    for v in 0..g.n() {
        identity.push(verify_identity(counter, g, v, k)?);
        for &u in g.neighbors(v) {
            for t in 0..=k {
                tails.push(verify_tail_bound(counter, g, v, u, k, t)?);
            }
        }
        let nbrs = g.neighbors(v);
        let mut removed = nbrs.to_vec();
        removed.push(v);
        let (g0, map0) = g.delete_vertices(&removed);
        let mut c0s = Vec::new();
        counter.enumerate_extensions(&g0, &PartialColoring::empty(g0.n(), k), |c| {
            if cfg.max_c0.is_none_or(|m| c0s.len() < m) {
                c0s.push(c.to_vec());
            }
        })?;
        for c in c0s {
            let c0 = PartialColoring::total(k, &c)?.lift(&map0);
            factor.push(verify_factorization(counter, g, v, &c0)?);
        }

        if nbrs.is_empty() {
            continue;
        }
        let (gv, map) = g.delete_vertex(v)?;
        let mut sampler = match UniformSampler::new(&gv, k, cfg.budget) {
            Ok(s) => s,
            Err(Error::NoProperColoring) => continue,
            Err(e) => return Err(e),
        };
        let mut rng = rng::from_seed(cfg.seed ^ graph_seed ^ ((v as u64) << 40) ^ ((k as u64) << 20));
        let mut c0 = sampler.sample(&mut rng)?.lift(&map);
        for &u in nbrs {
            c0 = PartialColoring::from_colors(k, {
                let mut colors = c0.colors().to_vec();
                colors[u] = None;
                colors
            })?;
        }
        let inst = harvest_lists(g, v, &c0)?;
        let t = cfg.t.unwrap_or_else(|| coupon::default_t(delta.max(2)));
        let b = condition_small_lists(&inst, t, &mut rng);
        let params = BoundParams { t, b, eps: 1.0, ell };
        for r in verify_coupon(&inst, &params, delta, cfg.budget.max_outcomes)? {
            let r = r.param("v", v).param("graph", graph_instance(g));
            coupons.entry(check_name(&r.check)).or_default().push(r);
        }
    }
    out.push(aggregate(check::IDENTITY, g, k, identity));
    out.push(aggregate(check::TAIL_BOUND, g, k, tails));
    out.push(aggregate(check::FACTORIZATION, g, k, factor));
    for (name, reports) in coupons {
        out.push(aggregate(name, g, k, reports));
    }
    Ok(out)
}

fn check_name(s: &str) -> &'static str {
    [
        check::COUPON_MEAN_ORACLE,
        check::COUPON_VARIANCE_ORACLE,
        check::COUPON_NEGATIVE_CORRELATION,
        check::COUPON_VARIANCE_LE_MEAN,
        check::COUPON_AMGM,
        check::COUPON_REORDERING,
    ]
    .into_iter()
    .find(|&c| c == s)
    .expect("known coupon check")
}

/// Folds per-instance reports of one check on one graph into a single
/// report carrying status counts and the first decisive witness.
pub fn aggregate(name: &str, g: &Graph, k: u32, parts: Vec<VerificationReport>) -> VerificationReport {
    let kind = parts.first().map_or(CheckKind::Theorem, |r| r.kind);
    let mut counts: BTreeMap<Status, usize> = BTreeMap::new();
    for r in &parts {
        *counts.entry(r.status).or_default() += 1;
    }
    let has = |s: Status| counts.contains_key(&s);
    let status = if has(Status::Fail) {
        Status::Fail
    } else if has(Status::HypothesisViolated) {
        Status::HypothesisViolated
    } else if has(Status::FailsAtThisScale) {
        Status::FailsAtThisScale
    } else if has(Status::Pass) {
        Status::Pass
    } else if has(Status::Holds) {
        Status::Holds
    } else {
        Status::Inapplicable
    };
    let witness = parts
        .iter()
        .find(|r| r.status == status && (status != Status::HypothesisViolated || r.sides_differ()))
        .or_else(|| parts.iter().find(|r| r.status == status));
    let mut out = graph_report(name, g, kind, k).status(status).param("instances", parts.len());
    for (s, n) in &counts {
        out = out.param(&s.to_string(), n);
    }
    let tight = parts.iter().filter(|r| r.note.as_deref() == Some("tight")).count();
    if name == check::TAIL_BOUND {
        out = out.param("tight", tight);
    }
    if status == Status::HypothesisViolated {
        let counterexamples = parts.iter().filter(|r| r.sides_differ()).count();
        out = out.param("counterexamples", counterexamples);
    }
    if let Some(w) = witness {
        for (key, val) in &w.params {
            if !out.params.contains_key(key) {
                out.params.insert(format!("witness.{key}"), val.clone());
            }
        }
        out.lhs = w.lhs.clone();
        out.relation = w.relation.clone();
        out.rhs = w.rhs.clone();
        out.tolerance = w.tolerance;
        out.note = w.note.clone();
    }
    out
}
