//! Exact counting of proper `k`-colorings and of extensions of partial
//! colorings.
//!
//! Two engines share a bitmask graph representation (at most 64 vertices):
//!
//! * `P(G, k)` by deletion–contraction, memoized on a relabeled adjacency
//!   key, with component splitting and closed forms for trees, cycles,
//!   cliques and simplicial vertices.
//! * Extension counts by backtracking over uncolored vertices, always
//!   branching on the vertex with the fewest remaining colors. Colors not
//!   used anywhere yet are interchangeable, so they are branched on once and
//!   weighted by their multiplicity. Connected components whose lists are
//!   all identical are handed to the first engine.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Relabel};
use crate::number::{BigCount, ExactRatio};

/// Hard ceiling imposed by the 64-bit adjacency masks.
pub const MASK_VERTICES: usize = 64;

const MEMO_LIMIT: usize = 1 << 21;

/// Limits on exponential work. Exceeding one yields [`Error::ResourceGuard`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest graph accepted for counting without a partial coloring.
    pub max_vertices: usize,
    /// Largest estimated backtracking space for extension counts: per
    /// connected component of uncolored vertices, the product over vertices
    /// of (named colors still available + 1 if any unused color remains).
    pub max_search: f64,
    /// Largest number of colorings an enumeration may visit.
    pub max_enumeration: u64,
    /// Largest number of joint outcomes for coupon enumeration.
    pub max_outcomes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vertices: 40,
            max_search: 1e9,
            max_enumeration: 10_000_000,
            max_outcomes: 1_000_000,
        }
    }
}

impl Budget {
    /// Defaults overridden by `TFCOLOR_MAX_VERTICES`, `TFCOLOR_MAX_SEARCH`,
    /// `TFCOLOR_MAX_ENUMERATION` and `TFCOLOR_MAX_OUTCOMES` when set.
    pub fn from_env() -> Result<Self> {
        fn var<T: std::str::FromStr>(name: &str, default: T) -> Result<T> {
            match std::env::var(name) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(format!("{name}={s:?} is not a number"))),
                Err(_) => Ok(default),
            }
        }
        let d = Budget::default();
        let b = Budget {
            max_vertices: var("TFCOLOR_MAX_VERTICES", d.max_vertices)?,
            max_search: var("TFCOLOR_MAX_SEARCH", d.max_search)?,
            max_enumeration: var("TFCOLOR_MAX_ENUMERATION", d.max_enumeration)?,
            max_outcomes: var("TFCOLOR_MAX_OUTCOMES", d.max_outcomes)?,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_vertices == 0
            || self.max_search.is_nan() || self.max_search <= 0.0
            || self.max_enumeration == 0
            || self.max_outcomes == 0
        {
            return Err(Error::param("budgets must be positive"));
        }
        Ok(())
    }
}

/// A partial map from vertices to colors `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialColoring {
    k: u32,
    colors: Vec<Option<u32>>,
}

impl PartialColoring {
    pub fn empty(n: usize, k: u32) -> Self {
        PartialColoring { k, colors: vec![None; n] }
    }

    pub fn from_colors(k: u32, colors: Vec<Option<u32>>) -> Result<Self> {
        for &c in colors.iter().flatten() {
            check_color(c, k)?;
        }
        Ok(PartialColoring { k, colors })
    }

    pub fn total(k: u32, colors: &[u32]) -> Result<Self> {
        Self::from_colors(k, colors.iter().map(|&c| Some(c)).collect())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn get(&self, v: usize) -> Option<u32> {
        self.colors.get(v).copied().flatten()
    }

    pub fn colors(&self) -> &[Option<u32>] {
        &self.colors
    }

    pub fn assign(&mut self, v: usize, c: u32) -> Result<()> {
        check_color(c, self.k)?;
        let n = self.n();
        let slot = self
            .colors
            .get_mut(v)
            .ok_or(Error::VertexOutOfRange { vertex: v, n })?;
        *slot = Some(c);
        Ok(())
    }

    pub fn with(&self, v: usize, c: u32) -> Result<Self> {
        let mut out = self.clone();
        out.assign(v, c)?;
        Ok(out)
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    /// Total assignment as a plain vector, if every vertex is colored.
    pub fn to_total(&self) -> Option<Vec<u32>> {
        self.colors.iter().copied().collect()
    }

    pub fn colored(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.colors
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|c| (v, c)))
    }

    pub fn uncolored(&self) -> impl Iterator<Item = usize> + '_ {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(v, _)| v)
    }

    /// No edge of `g` has both endpoints assigned the same color.
    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().into_iter().all(|(u, v)| match (self.get(u), self.get(v)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        })
    }

    /// Restriction to the subgraph described by `relabel`.
    pub fn restrict(&self, relabel: &Relabel) -> Self {
        PartialColoring {
            k: self.k,
            colors: relabel.new_to_old.iter().map(|&v| self.get(v)).collect(),
        }
    }

    /// Inverse of [`restrict`](Self::restrict): lifts a coloring of the
    /// subgraph back to the original vertex set, leaving removed vertices
    /// uncolored.
    pub fn lift(&self, relabel: &Relabel) -> Self {
        PartialColoring {
            k: self.k,
            colors: relabel
                .old_to_new
                .iter()
                .map(|m| m.and_then(|i| self.get(i)))
                .collect(),
        }
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::param(format!(
                "coloring covers {} vertices, graph has {}",
                self.n(),
                g.n()
            )));
        }
        Ok(())
    }
}

fn check_color(c: u32, k: u32) -> Result<()> {
    if c == 0 || c > k {
        Err(Error::ColorOutOfRange { color: c, k })
    } else {
        Ok(())
    }
}

/// `{1..k}` minus the colors on `u`'s neighbors. `u`'s own color is ignored.
pub fn available_colors(g: &Graph, partial: &PartialColoring, u: usize) -> Result<Vec<u32>> {
    g.check_vertex(u)?;
    partial.check_graph(g)?;
    let mut blocked: Vec<u32> = g.neighbors(u).iter().filter_map(|&w| partial.get(w)).collect();
    blocked.sort_unstable();
    Ok((1..=partial.k())
        .filter(|c| blocked.binary_search(c).is_err())
        .collect())
}

/// Number of available colors for `u`, without materializing the set.
pub fn available_count(g: &Graph, partial: &PartialColoring, u: usize) -> u32 {
    let mut blocked: Vec<u32> = g.neighbors(u).iter().filter_map(|&w| partial.get(w)).collect();
    blocked.sort_unstable();
    blocked.dedup();
    partial.k() - blocked.len() as u32
}

/// Coefficients of `P(G, x)`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaticPolynomial {
    #[serde(with = "coeff_strings")]
    coeffs: Vec<BigInt>,
}

mod coeff_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ChromaticPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ChromaticPolynomial { coeffs }
    }

    /// Lowest degree first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &x + c)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_default();
        Self::from_coeffs((0..len).map(|i| at(self, i) - at(other, i)).collect())
    }

    fn monomial(deg: usize) -> Self {
        let mut c = vec![BigInt::zero(); deg + 1];
        c[deg] = BigInt::one();
        Self::from_coeffs(c)
    }

    /// `x − a`
    fn linear(a: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(-a), BigInt::one()])
    }

    fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::monomial(0), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for ChromaticPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (deg, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{deg}")?,
                (_, false) => write!(f, "{mag}x^{deg}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Memoizing counting engine. Reusing one `Counter` across related calls
/// (as the samplers do) shares its caches.
#[derive(Debug, Default)]
pub struct Counter {
    budget: Budget,
    chrom_memo: HashMap<(u64, Vec<u64>), BigInt>,
    poly_memo: HashMap<Vec<u64>, ChromaticPolynomial>,
    ext_memo: HashMap<(Vec<u64>, Vec<u64>, u64), BigInt>,
}

impl Counter {
    pub fn new(budget: Budget) -> Self {
        Counter { budget, ..Default::default() }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn guard_vertices(&self, n: usize, what: &str) -> Result<()> {
        let cap = self.budget.max_vertices.min(MASK_VERTICES);
        if n > cap {
            return Err(Error::ResourceGuard(format!(
                "{what} on {n} vertices exceeds the {cap}-vertex cap"
            )));
        }
        Ok(())
    }

    /// `|C(G)| = P(G, k)`.
    pub fn count_colorings(&mut self, g: &Graph, k: u64) -> Result<BigCount> {
        self.guard_vertices(g.n(), "counting")?;
        let adj = masks(g);
        Ok(BigCount::from_nonnegative(self.chrom(&adj, k)))
    }

    /// Coefficients of `P(G, x)` by an independent deletion–contraction over
    /// polynomials.
    pub fn chromatic_polynomial(&mut self, g: &Graph) -> Result<ChromaticPolynomial> {
        self.guard_vertices(g.n(), "chromatic polynomial")?;
        Ok(self.poly(&masks(g)))
    }

    /// Number of proper total colorings of `g` that agree with `partial`.
    pub fn count_extensions(&mut self, g: &Graph, partial: &PartialColoring) -> Result<BigCount> {
        partial.check_graph(g)?;
        if g.n() > MASK_VERTICES {
            return Err(Error::ResourceGuard(format!(
                "extension counting on {} vertices exceeds the {MASK_VERTICES}-vertex cap",
                g.n()
            )));
        }
        let Some(state) = ListState::new(g, partial) else {
            return Ok(BigCount::zero());
        };
        self.guard_search(&state)?;
        Ok(BigCount::from_nonnegative(self.lists(
            &state.adj,
            state.residual,
            &state.lists,
            state.free,
        )))
    }

    fn guard_search(&self, s: &ListState) -> Result<()> {
        for comp in components(&s.adj, s.residual) {
            let first = s.lists[comp.trailing_zeros() as usize];
            if bits(comp).all(|v| s.lists[v] == first) {
                self.guard_vertices(comp.count_ones() as usize, "counting")?;
                continue;
            }
            let space: f64 = bits(comp)
                .map(|v| (s.lists[v].count_ones() as f64 + s.free.min(1) as f64).max(1.0))
                .product();
            if space > self.budget.max_search {
                return Err(Error::ResourceGuard(format!(
                    "extension search space {space:.3e} exceeds budget {:.3e}",
                    self.budget.max_search
                )));
            }
        }
        Ok(())
    }

    /// Calls `visit` with every proper total coloring (colors `1..=k`)
    /// extending `partial`, in lexicographic order. Returns how many were
    /// visited.
    pub fn enumerate_extensions(
        &mut self,
        g: &Graph,
        partial: &PartialColoring,
        mut visit: impl FnMut(&[u32]),
    ) -> Result<u64> {
        let total = self.count_extensions(g, partial)?;
        let cap = self.budget.max_enumeration;
        if total.to_u64().is_none_or(|t| t > cap) {
            return Err(Error::ResourceGuard(format!(
                "{total} colorings exceed the enumeration budget {cap}"
            )));
        }
        if total.is_zero() {
            return Ok(0);
        }
        let order: Vec<usize> = partial.uncolored().collect();
        let mut colors: Vec<u32> = (0..g.n()).map(|v| partial.get(v).unwrap_or(0)).collect();
        let mut visited = 0u64;
        enumerate_rec(g, partial.k(), &order, 0, &mut colors, &mut |c| {
            visited += 1;
            visit(c)
        });
        debug_assert_eq!(total, visited);
        Ok(visited)
    }

    fn chrom(&mut self, adj: &[u64], k: u64) -> BigInt {
        let n = adj.len();
        if n == 0 {
            return BigInt::one();
        }
        let all = full_mask(n);
        let comps = components(adj, all);
        if comps.len() > 1 {
            return comps
                .into_iter()
                .map(|c| self.chrom(&induced(adj, c), k))
                .product();
        }
        let kk = BigInt::from(k);
        let degrees: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
        let m = degrees.iter().sum::<u32>() as usize / 2;
        if n == 1 {
            return kk;
        }
        if m == n - 1 {
            return &kk * pow_i(&(&kk - 1), n - 1);
        }
        if m == n * (n - 1) / 2 {
            return falling(k, n);
        }
        if m == n && degrees.iter().all(|&d| d == 2) {
            let km1 = &kk - 1;
            let sign = if n.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
            return pow_i(&km1, n) + sign * km1;
        }
        if let Some(v) = simplicial_vertex(adj) {
            let d = degrees[v] as u64;
            if k <= d {
                return BigInt::zero();
            }
            return BigInt::from(k - d) * self.chrom(&remove_vertex(adj, v), k);
        }
        let canon = canonical(adj);
        let key = (k, canon);
        if let Some(hit) = self.chrom_memo.get(&key) {
            return hit.clone();
        }
        let adj = &key.1;
        let degrees: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
        let u = (0..n).min_by_key(|&v| (degrees[v], v)).expect("nonempty");
        let w = bits(adj[u])
            .max_by_key(|&w| (degrees[w], std::cmp::Reverse(w)))
            .expect("connected graph has edges");
        let deleted = self.chrom(&delete_edge(adj, u, w), k);
        let contracted = self.chrom(&contract(adj, u, w), k);
        let value = deleted - contracted;
        if self.chrom_memo.len() > MEMO_LIMIT {
            self.chrom_memo.clear();
        }
        self.chrom_memo.insert(key, value.clone());
        value
    }

    fn poly(&mut self, adj: &[u64]) -> ChromaticPolynomial {
        let n = adj.len();
        let comps = components(adj, full_mask(n));
        if comps.len() > 1 {
            return comps.into_iter().fold(ChromaticPolynomial::monomial(0), |acc, c| {
                acc.mul(&self.poly(&induced(adj, c)))
            });
        }
        let m = adj.iter().map(|x| x.count_ones()).sum::<u32>() as usize / 2;
        if n <= 1 {
            return ChromaticPolynomial::monomial(n);
        }
        if m == n - 1 {
            return ChromaticPolynomial::monomial(1).mul(&ChromaticPolynomial::linear(1).pow(n - 1));
        }
        let key = canonical(adj);
        if let Some(hit) = self.poly_memo.get(&key) {
            return hit.clone();
        }
        // First edge of the canonical labeling.
        let u = (0..n).find(|&v| key[v] != 0).expect("has edges");
        let w = key[u].trailing_zeros() as usize;
        let value = self
            .poly(&delete_edge(&key, u, w))
            .sub(&self.poly(&contract(&key, u, w)));
        if self.poly_memo.len() > MEMO_LIMIT {
            self.poly_memo.clear();
        }
        self.poly_memo.insert(key, value.clone());
        value
    }

    /// Counts list colorings of the residual vertex set `r`. `lists[v]` is a
    /// bitmask over named colors; each of the `free` unnamed colors is in
    /// every list.
    fn lists(&mut self, adj: &[u64], r: u64, lists: &[u64], free: u64) -> BigInt {
        if r == 0 {
            return BigInt::one();
        }
        let comps = components(adj, r);
        if comps.len() > 1 {
            let mut acc = BigInt::one();
            for c in comps {
                let part = self.lists(adj, c, lists, free);
                if part.is_zero() {
                    return part;
                }
                acc *= part;
            }
            return acc;
        }
        let first = lists[r.trailing_zeros() as usize];
        if r.count_ones() == 1 {
            return BigInt::from(first.count_ones() as u64 + free);
        }
        if bits(r).all(|v| lists[v] == first) {
            return self.chrom(&induced(adj, r), first.count_ones() as u64 + free);
        }
        let key = (induced(adj, r), renumber_lists(r, lists), free);
        if let Some(hit) = self.ext_memo.get(&key) {
            return hit.clone();
        }
        let v = bits(r)
            .min_by_key(|&v| (lists[v].count_ones() as u64 + free, v))
            .expect("nonempty");
        let rest = r & !(1u64 << v);
        let nbrs = adj[v] & rest;
        let mut total = BigInt::zero();
        let mut child = lists.to_vec();
        for c in bits(lists[v]) {
            for w in bits(nbrs) {
                child[w] = lists[w] & !(1u64 << c);
            }
            total += self.lists(adj, rest, &child, free);
        }
        if free > 0 {
            let used = bits(r).fold(0u64, |acc, x| acc | lists[x]);
            let fresh = (!used).trailing_zeros() as usize;
            debug_assert!(fresh < 64, "named colors never exceed vertex count");
            for w in bits(rest) {
                child[w] = if nbrs >> w & 1 == 1 {
                    lists[w]
                } else {
                    lists[w] | 1u64 << fresh
                };
            }
            total += BigInt::from(free) * self.lists(adj, rest, &child, free - 1);
        }
        if self.ext_memo.len() > MEMO_LIMIT {
            self.ext_memo.clear();
        }
        self.ext_memo.insert(key, total.clone());
        total
    }
}

/// Residual list-coloring instance derived from a partial coloring.
struct ListState {
    adj: Vec<u64>,
    residual: u64,
    lists: Vec<u64>,
    free: u64,
}

impl ListState {
    /// `None` if `partial` is already improper.
    fn new(g: &Graph, partial: &PartialColoring) -> Option<Self> {
        if !partial.is_proper(g) {
            return None;
        }
        let mut used: Vec<u32> = partial.colored().map(|(_, c)| c).collect();
        used.sort_unstable();
        used.dedup();
        let named = |c: u32| used.binary_search(&c).expect("used color");
        let all_named = full_mask(used.len());
        let adj = masks(g);
        let mut residual = 0u64;
        let mut lists = vec![0u64; g.n()];
        for v in partial.uncolored() {
            residual |= 1 << v;
            let blocked = g
                .neighbors(v)
                .iter()
                .filter_map(|&w| partial.get(w))
                .fold(0u64, |acc, c| acc | 1 << named(c));
            lists[v] = all_named & !blocked;
        }
        Some(ListState {
            adj,
            residual,
            lists,
            free: partial.k() as u64 - used.len() as u64,
        })
    }
}

fn enumerate_rec(
    g: &Graph,
    k: u32,
    order: &[usize],
    depth: usize,
    colors: &mut [u32],
    visit: &mut dyn FnMut(&[u32]),
) {
    let Some(&v) = order.get(depth) else {
        visit(colors);
        return;
    };
    for c in 1..=k {
        if g.neighbors(v).iter().all(|&w| colors[w] != c) {
            colors[v] = c;
            enumerate_rec(g, k, order, depth + 1, colors, visit);
        }
    }
    colors[v] = 0;
}

/// Counts with a fresh default-budget [`Counter`].
pub fn count_colorings(g: &Graph, k: u64) -> Result<BigCount> {
    Counter::default().count_colorings(g, k)
}

pub fn chromatic_polynomial(g: &Graph) -> Result<ChromaticPolynomial> {
    Counter::default().chromatic_polynomial(g)
}

pub fn count_extensions(g: &Graph, partial: &PartialColoring) -> Result<BigCount> {
    Counter::default().count_extensions(g, partial)
}

/// `|C(G)| / |C(G − v)|` in lowest terms.
pub fn coloring_ratio(g: &Graph, v: usize, k: u64) -> Result<ExactRatio> {
    coloring_ratio_with(&mut Counter::default(), g, v, k)
}

pub fn coloring_ratio_with(counter: &mut Counter, g: &Graph, v: usize, k: u64) -> Result<ExactRatio> {
    let (gv, _) = g.delete_vertex(v)?;
    let den = counter.count_colorings(&gv, k)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator(format!(
            "G - {v} has no proper {k}-coloring"
        )));
    }
    let num = counter.count_colorings(g, k)?;
    ExactRatio::from_counts(&num, &den)
}

// --- bitmask graph helpers -------------------------------------------------

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect()
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Connected components of the subgraph induced by `set`, as vertex masks.
fn components(adj: &[u64], set: u64) -> Vec<u64> {
    let mut left = set;
    let mut out = Vec::new();
    while left != 0 {
        let mut comp = left & left.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            let next = bits(frontier).fold(0u64, |acc, v| acc | adj[v]) & set & !comp;
            comp |= next;
            frontier = next;
        }
        left &= !comp;
        out.push(comp);
    }
    out
}

/// Subgraph induced by `set`, relabeled to `0..|set|` in index order.
fn induced(adj: &[u64], set: u64) -> Vec<u64> {
    let verts: Vec<usize> = bits(set).collect();
    let mut pos = [0u8; 64];
    for (i, &v) in verts.iter().enumerate() {
        pos[v] = i as u8;
    }
    verts
        .iter()
        .map(|&v| bits(adj[v] & set).fold(0u64, |m, w| m | 1 << pos[w]))
        .collect()
}

fn squeeze(m: u64, u: usize) -> u64 {
    let low = m & ((1u64 << u) - 1);
    let high = m.checked_shr(u as u32 + 1).unwrap_or(0) << u;
    low | high
}

fn remove_vertex(adj: &[u64], u: usize) -> Vec<u64> {
    adj.iter()
        .enumerate()
        .filter(|&(i, _)| i != u)
        .map(|(_, &m)| squeeze(m & !(1u64 << u), u))
        .collect()
}

fn delete_edge(adj: &[u64], u: usize, w: usize) -> Vec<u64> {
    let mut a = adj.to_vec();
    a[u] &= !(1u64 << w);
    a[w] &= !(1u64 << u);
    a
}

/// Merges `u` into `w` (parallel edges collapse) and drops `u`.
fn contract(adj: &[u64], u: usize, w: usize) -> Vec<u64> {
    let mut a = adj.to_vec();
    let nu = a[u] & !(1u64 << w);
    for x in bits(nu) {
        a[x] = (a[x] & !(1u64 << u)) | 1u64 << w;
    }
    a[w] = (a[w] | nu) & !(1u64 << u);
    remove_vertex(&a, u)
}

/// A vertex whose neighborhood is a clique, lowest index first.
fn simplicial_vertex(adj: &[u64]) -> Option<usize> {
    (0..adj.len()).find(|&v| bits(adj[v]).all(|w| adj[v] & !(adj[w] | 1u64 << w) == 0))
}

/// Relabels vertices by a degree-based refinement so that many isomorphic
/// subproblems share a memo key. Any relabeling is sound: the key is the
/// graph itself.
fn canonical(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| {
        let mut nd: Vec<u32> = bits(adj[v]).map(|w| deg[w]).collect();
        nd.sort_unstable();
        (deg[v], nd, v)
    });
    let mut pos = [0u8; 64];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i as u8;
    }
    order
        .iter()
        .map(|&v| bits(adj[v]).fold(0u64, |m, w| m | 1 << pos[w]))
        .collect()
}

/// Lists of the vertices in `r` (index order) with named colors renumbered
/// by first appearance.
fn renumber_lists(r: u64, lists: &[u64]) -> Vec<u64> {
    let mut map = [u8::MAX; 64];
    let mut next = 0u8;
    bits(r)
        .map(|v| {
            bits(lists[v]).fold(0u64, |m, c| {
                if map[c] == u8::MAX {
                    map[c] = next;
                    next += 1;
                }
                m | 1 << map[c]
            })
        })
        .collect()
}

fn pow_i(base: &BigInt, e: usize) -> BigInt {
    num_traits::pow(base.clone(), e)
}

/// `k (k−1) ⋯ (k−n+1)`, zero when `n > k`.
fn falling(k: u64, n: usize) -> BigInt {
    if n as u64 > k {
        return BigInt::zero();
    }
    (0..n as u64).map(|i| BigInt::from(k - i)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, Graph};
    use proptest::prelude::*;

    /// Oracle: enumerate all `k^n` assignments.
    fn brute_count(g: &Graph, k: u32, fixed: &[Option<u32>]) -> u64 {
        let n = g.n();
        let mut colors = vec![1u32; n];
        let mut count = 0;
        if k == 0 {
            return (n == 0) as u64;
        }
        loop {
            let agrees = (0..n).all(|v| fixed.get(v).copied().flatten().is_none_or(|c| c == colors[v]));
            if agrees && g.edges().iter().all(|&(u, v)| colors[u] != colors[v]) {
                count += 1;
            }
            let mut i = 0;
            while i < n && colors[i] == k {
                colors[i] = 1;
                i += 1;
            }
            if i == n {
                return count;
            }
            colors[i] += 1;
        }
    }

    /// Oracle: Whitney's subset expansion `Σ_A (−1)^|A| x^c(A)`.
    fn whitney(g: &Graph) -> Vec<i64> {
        let edges = g.edges();
        let n = g.n();
        let mut coeffs = vec![0i64; n + 1];
        for mask in 0u64..1 << edges.len() {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            let mut comps = n;
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                    if a != b {
                        parent[a] = b;
                        comps -= 1;
                    }
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            coeffs[comps] += sign;
        }
        coeffs
    }

    fn count(g: &Graph, k: u64) -> u64 {
        count_colorings(g, k).unwrap().to_u64().unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&Graph::empty(1), 3), 3);
        assert_eq!(count(&graph::path(3), 3), 12);
        assert_eq!(count(&graph::cycle(5), 3), 30);
        assert_eq!(count(&Graph::empty(0), 0), 1);
        assert_eq!(count(&Graph::empty(2), 0), 0);
    }

    #[test]
    fn named_counts_match_brute_force() {
        let petersen = graph::petersen();
        assert_eq!(brute_count(&petersen, 3, &[]), 120);
        assert_eq!(count(&petersen, 3), 120);
        let grotzsch = graph::grotzsch();
        assert_eq!(brute_count(&grotzsch, 3, &[]), 0);
        assert_eq!(count(&grotzsch, 3), 0);
        assert_eq!(count(&grotzsch, 4), brute_count(&grotzsch, 4, &[]));
    }

    #[test]
    fn polynomial_small_cases() {
        let k2 = chromatic_polynomial(&graph::complete(2)).unwrap();
        assert_eq!(k2.to_string(), "x^2 - x");
        // (x−1)^5 − (x−1) = x^5 − 5x^4 + 10x^3 − 10x^2 + 4x
        let c5 = chromatic_polynomial(&graph::cycle(5)).unwrap();
        assert_eq!(c5.to_string(), "x^5 - 5x^4 + 10x^3 - 10x^2 + 4x");
        assert_eq!(c5.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>(),
                   whitney(&graph::cycle(5)));
        assert_eq!(chromatic_polynomial(&Graph::empty(3)).unwrap().to_string(), "x^3");
        assert_eq!(chromatic_polynomial(&Graph::empty(0)).unwrap().to_string(), "1");
    }

    #[test]
    fn petersen_polynomial_matches_whitney() {
        let g = graph::petersen();
        let p = chromatic_polynomial(&g).unwrap();
        let w = whitney(&g);
        assert_eq!(p.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>(), w);
        assert_eq!(p.eval(3), BigInt::from(120));
    }

    #[test]
    fn extension_examples() {
        let p3 = graph::path(3);
        let mut partial = PartialColoring::empty(3, 3);
        partial.assign(0, 1).unwrap();
        assert_eq!(count_extensions(&p3, &partial).unwrap(), 4);
        let total = PartialColoring::total(3, &[1, 2, 1]).unwrap();
        assert_eq!(count_extensions(&p3, &total).unwrap(), 1);
        let bad = PartialColoring::from_colors(3, vec![Some(1), Some(1), None]).unwrap();
        assert_eq!(count_extensions(&p3, &bad).unwrap(), 0);
    }

    #[test]
    fn extension_matches_identification_construction() {
        // Independent route: identify equally-colored precolored vertices,
        // join the color classes into a clique, divide by (k)_m.
        let g = graph::petersen();
        let k = 4u32;
        let partial = PartialColoring::from_colors(
            k,
            vec![Some(1), None, Some(2), None, None, None, None, Some(1), None, None],
        )
        .unwrap();
        let classes = [vec![0usize, 7], vec![2]];
        let mut rep = (0..g.n()).collect::<Vec<_>>();
        for class in &classes {
            for &v in class {
                rep[v] = class[0];
            }
        }
        let keep: Vec<usize> = (0..g.n()).filter(|&v| rep[v] == v).collect();
        let idx = |v: usize| keep.iter().position(|&x| x == rep[v]).unwrap();
        let mut edges: Vec<(usize, usize)> =
            g.edges().into_iter().map(|(u, v)| (idx(u), idx(v))).collect();
        edges.push((idx(0), idx(2)));
        let h = Graph::from_edges(keep.len(), edges).unwrap();
        let ph = count_colorings(&h, k as u64).unwrap().to_u64().unwrap();
        let expected = ph / (4 * 3);
        assert_eq!(count_extensions(&g, &partial).unwrap(), expected);
        assert_eq!(
            expected,
            brute_count(&g, k, partial.colors())
        );
    }

    #[test]
    fn available_color_definition() {
        let p3 = graph::path(3);
        let empty = PartialColoring::empty(3, 4);
        assert_eq!(available_colors(&p3, &empty, 1).unwrap(), vec![1, 2, 3, 4]);
        let a1 = PartialColoring::from_colors(3, vec![Some(1), None, None]).unwrap();
        assert_eq!(available_colors(&p3, &a1, 1).unwrap(), vec![2, 3]);
        let p2 = graph::path(2);
        let both = PartialColoring::total(3, &[1, 2]).unwrap();
        assert_eq!(available_colors(&p2, &both, 1).unwrap(), vec![2, 3]);
        assert!(matches!(
            available_colors(&p2, &both, 2),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(coloring_ratio(&Graph::empty(3), 1, 5).unwrap(), ExactRatio::from_integer(5));
        assert_eq!(coloring_ratio(&graph::path(3), 0, 3).unwrap(), ExactRatio::from_integer(2));
        assert_eq!(coloring_ratio(&graph::star(3), 0, 3).unwrap(), ExactRatio::frac(8, 9));
        assert!(matches!(
            coloring_ratio(&graph::complete(4), 0, 2),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn guards_refuse_large_instances() {
        let g = graph::cycle(41);
        assert!(matches!(count_colorings(&g, 3), Err(Error::ResourceGuard(_))));
        let mut c = Counter::new(Budget { max_search: 10.0, ..Budget::default() });
        let mut partial = PartialColoring::empty(8, 3);
        partial.assign(0, 1).unwrap();
        assert!(matches!(
            c.count_extensions(&graph::path(8), &partial),
            Err(Error::ResourceGuard(_))
        ));
        let mut c = Counter::new(Budget { max_enumeration: 5, ..Budget::default() });
        assert!(matches!(
            c.enumerate_extensions(&graph::path(3), &PartialColoring::empty(3, 3), |_| {}),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn partial_coloring_validation() {
        assert!(matches!(
            PartialColoring::from_colors(3, vec![Some(4)]),
            Err(Error::ColorOutOfRange { color: 4, k: 3 })
        ));
        assert!(PartialColoring::from_colors(3, vec![Some(0)]).is_err());
        let mut p = PartialColoring::empty(2, 3);
        assert!(p.assign(5, 1).is_err());
        assert!(count_extensions(&graph::path(3), &p).is_err());
    }

    #[test]
    fn enumeration_lists_every_coloring_once() {
        let g = graph::cycle(5);
        let mut seen = std::collections::HashSet::new();
        let n = Counter::default()
            .enumerate_extensions(&g, &PartialColoring::empty(5, 3), |c| {
                assert!(seen.insert(c.to_vec()));
            })
            .unwrap();
        assert_eq!(n, 30);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (0..=max_n).prop_flat_map(|n| {
            let pairs = n * n.saturating_sub(1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |keep| {
                let mut es = Vec::new();
                let mut i = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if keep[i] {
                            es.push((u, v));
                        }
                        i += 1;
                    }
                }
                Graph::from_edges(n, es).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn count_matches_enumeration(g in arb_graph(8), k in 2u32..=4) {
            prop_assert_eq!(count(&g, k as u64), brute_count(&g, k, &[]));
        }

        #[test]
        fn polynomial_evaluates_to_count(g in arb_graph(7), k in 0u64..6) {
            let p = chromatic_polynomial(&g).unwrap();
            prop_assert_eq!(p.degree(), g.n());
            if g.n() > 0 {
                prop_assert!(p.coeffs()[g.n()].is_one());
                for (i, c) in p.coeffs().iter().enumerate() {
                    // Signs alternate; zero coefficients allowed.
                    let expected_sign = if (g.n() - i) % 2 == 0 { 1 } else { -1 };
                    prop_assert!(c.is_zero() || (c.signum() == BigInt::from(expected_sign)));
                }
            }
            prop_assert_eq!(p.eval(k as i64), count_colorings(&g, k).unwrap().to_bigint());
        }

        #[test]
        fn deletion_contraction_identity(g in arb_graph(8), k in 1u64..5, pick: usize) {
            let edges = g.edges();
            prop_assume!(!edges.is_empty());
            let (u, v) = edges[pick % edges.len()];
            let deleted = g.delete_edge(u, v);
            // G / e: merge v into u.
            let (rest, map) = g.delete_vertex(v).unwrap();
            let mut es = rest.edges();
            let nu = map.old_to_new[u].unwrap();
            for &w in g.neighbors(v) {
                if w != u {
                    es.push((nu, map.old_to_new[w].unwrap()));
                }
            }
            let contracted = Graph::from_edges(rest.n(), es).unwrap();
            let lhs = count_colorings(&g, k).unwrap().to_bigint();
            let rhs = count_colorings(&deleted, k).unwrap().to_bigint()
                - count_colorings(&contracted, k).unwrap().to_bigint();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn components_multiply(a in arb_graph(5), b in arb_graph(5), k in 1u64..5) {
            let u = a.disjoint_union(&b);
            prop_assert_eq!(
                count_colorings(&u, k).unwrap(),
                count_colorings(&a, k).unwrap() * count_colorings(&b, k).unwrap()
            );
        }

        #[test]
        fn self_reducibility(g in arb_graph(7), k in 1u32..5, seed: u64) {
            prop_assume!(g.n() > 0);
            // Random partial coloring from the seed.
            let n = g.n();
            let colors: Vec<Option<u32>> = (0..n)
                .map(|i| {
                    let h = seed.rotate_left(i as u32 * 7) ^ (i as u64 * 0x9e37_79b9);
                    if h.is_multiple_of(3) { Some((h / 3 % k as u64) as u32 + 1) } else { None }
                })
                .collect();
            let partial = PartialColoring::from_colors(k, colors).unwrap();
            let whole = count_extensions(&g, &partial).unwrap();
            prop_assert_eq!(whole.to_u64().unwrap(), brute_count(&g, k, partial.colors()));
            if let Some(v) = partial.uncolored().next() {
                let parts: BigCount = (1..=k)
                    .map(|c| count_extensions(&g, &partial.with(v, c).unwrap()).unwrap())
                    .sum();
                prop_assert_eq!(whole, parts);
            }
            let empty = PartialColoring::empty(n, k);
            prop_assert_eq!(count_extensions(&g, &empty).unwrap(), count_colorings(&g, k as u64).unwrap());
            for u in 0..n {
                let avail = available_colors(&g, &partial, u).unwrap().len();
                prop_assert!(avail + g.degree(u) >= k as usize);
            }
        }
    }
}
