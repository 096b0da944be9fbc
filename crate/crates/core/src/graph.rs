//! Simple undirected graphs on dense vertex indices `0..n`, the
//! triangle-free families used as test corpora, and DIMACS / JSON I/O.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng;

/// An undirected simple graph. Immutable once built.
///
/// Neighbor lists are kept sorted; the edge set is derived from them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

/// Wire form: `{"n": int, "edges": [[u, v], ...]}` with 0-based vertices.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        Graph::from_edges(j.n, j.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

/// Vertex relabeling produced by deleting vertices.
///
/// Remaining vertices keep their relative order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabel {
    pub new_to_old: Vec<usize>,
    pub old_to_new: Vec<Option<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            sets[u].insert(v);
            sets[v].insert(u);
        }
        Ok(Graph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// The lexicographically first triangle `(a, b, c)` with `a < b < c`.
    pub fn first_triangle(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n() {
            for &b in self.adj[a].iter().filter(|&&b| b > a) {
                for &c in self.adj[b].iter().filter(|&&c| c > b) {
                    if self.has_edge(a, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// True iff every neighborhood is an independent set.
    pub fn is_triangle_free(&self) -> bool {
        self.first_triangle().is_none()
    }

    /// Induced subgraph on `V ∖ {v}`.
    pub fn delete_vertex(&self, v: usize) -> Result<(Graph, Relabel)> {
        self.check_vertex(v)?;
        Ok(self.delete_vertices(&[v]))
    }

    /// Induced subgraph on the vertices not listed in `removed`.
    /// Out-of-range entries are ignored.
    pub fn delete_vertices(&self, removed: &[usize]) -> (Graph, Relabel) {
        let mut keep = vec![true; self.n()];
        for &v in removed {
            if v < self.n() {
                keep[v] = false;
            }
        }
        let new_to_old: Vec<usize> = (0..self.n()).filter(|&v| keep[v]).collect();
        let mut old_to_new = vec![None; self.n()];
        for (i, &v) in new_to_old.iter().enumerate() {
            old_to_new[v] = Some(i);
        }
        let adj = new_to_old
            .iter()
            .map(|&v| self.adj[v].iter().filter_map(|&w| old_to_new[w]).collect())
            .collect();
        (Graph { adj }, Relabel { new_to_old, old_to_new })
    }

    pub fn delete_edge(&self, u: usize, v: usize) -> Graph {
        let mut g = self.clone();
        g.adj[u].retain(|&w| w != v);
        g.adj[v].retain(|&w| w != u);
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|ns| ns.iter().map(|&w| w + off).collect()),
        );
        Graph { adj }
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Stable content hash: first 16 hex digits of SHA-256 over the
    /// canonical JSON form.
    pub fn hash_hex(&self) -> String {
        let json = serde_json::to_string(self).expect("graph serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        Ok(serde_json::from_str(text)?)
    }

    /// DIMACS `.col` text: a comment line, the `p edge n m` header, then
    /// sorted 1-indexed `e u v` lines.
    pub fn to_dimacs(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "c {line}");
        }
        let _ = writeln!(out, "p edge {} {}", self.n(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }
}

/// Parses DIMACS `.col` text into a graph with 0-based vertices.
///
/// Accepts `c` comments, one `p edge n m` (or `p col n m`) header and
/// `e u v` lines with 1-indexed vertices. Repeated edges collapse.
pub fn parse_dimacs(text: &[u8]) -> Result<Graph> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("not UTF-8: {e}"),
    })?;
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                let fmt = toks.next();
                if !matches!(fmt, Some("edge") | Some("col")) {
                    return Err(err(format!("expected `p edge n m`, got {raw:?}")));
                }
                let nv = toks
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| err(format!("bad vertex count in {raw:?}")))?;
                toks.next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| err(format!("bad edge count in {raw:?}")))?;
                if toks.next().is_some() {
                    return Err(err(format!("trailing tokens in {raw:?}")));
                }
                n = Some(nv);
            }
            Some("e") => {
                let nv = n.ok_or_else(|| err("edge line before `p edge` header".into()))?;
                let mut endpoint = || -> Result<usize> {
                    let t = toks
                        .next()
                        .ok_or_else(|| err(format!("edge line needs two vertices: {raw:?}")))?;
                    let x: usize = t
                        .parse()
                        .map_err(|_| err(format!("bad vertex {t:?}")))?;
                    if x == 0 || x > nv {
                        return Err(err(format!("vertex {x} out of range 1..={nv}")));
                    }
                    Ok(x - 1)
                };
                let u = endpoint()?;
                let v = endpoint()?;
                if u == v {
                    return Err(err(format!("self-loop at vertex {}", u + 1)));
                }
                edges.push((u, v));
            }
            Some(other) => return Err(err(format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `p edge n m` header".into(),
    })?;
    Graph::from_edges(n, edges)
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// Cycle on `n ≥ 3` vertices; smaller `n` gives a path.
pub fn cycle(n: usize) -> Graph {
    if n < 3 {
        return path(n);
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid")
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).expect("valid")
}

/// Star `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> Graph {
    complete_bipartite(1, leaves)
}

/// Petersen graph: outer 5-cycle `0..5`, spokes `i ~ i+5`, inner pentagram.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, edges).expect("valid petersen")
}

/// Mycielskian: originals `0..n`, shadows `n..2n` with shadow `n+i`
/// adjacent to `N(i)`, and apex `2n` adjacent to every shadow.
pub fn mycielski(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges = g.edges();
    for (u, v) in g.edges() {
        edges.push((n + u, v));
        edges.push((n + v, u));
    }
    edges.extend((0..n).map(|i| (n + i, 2 * n)));
    Graph::from_edges(2 * n + 1, edges).expect("valid mycielskian")
}

/// Grötzsch graph, the Mycielskian of `C₅`.
pub fn grotzsch() -> Graph {
    mycielski(&cycle(5))
}

/// The first `depth` graphs of the Mycielski tower `K₂, C₅, Grötzsch, …`.
pub fn mycielski_tower(depth: usize) -> Vec<Graph> {
    let mut out: Vec<Graph> = Vec::with_capacity(depth);
    for i in 0..depth {
        let next = if i == 0 { complete(2) } else { mycielski(&out[i - 1]) };
        out.push(next);
    }
    out
}

/// Erdős–Rényi `G(n, p)` followed by triangle removal.
///
/// Pairs `u < v` are visited in lexicographic order and kept when a uniform
/// draw in `[0, 1)` falls below `p`. Then, while a triangle remains, the
/// lexicographically first one loses one of its three edges, chosen
/// uniformly. Deterministic for fixed `(n, p, seed)`.
pub fn gen_random_triangle_free(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = rng::from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mut g = Graph::from_edges(n, edges)?;
    while let Some((a, b, c)) = g.first_triangle() {
        let (x, y) = [(a, b), (a, c), (b, c)][rng.gen_range(0..3)];
        g = g.delete_edge(x, y);
    }
    Ok(g)
}

/// All labeled graphs on exactly `n` vertices, by edge-subset enumeration
/// in increasing bitmask order. `n ≤ 11` (2^55 subsets is the hard limit).
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 11, "edge-subset enumeration limited to n <= 11");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let total: u64 = 1 << pairs.len();
    (0..total).map(move |mask| {
        Graph::from_edges(
            n,
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e),
        )
        .expect("valid subset")
    })
}

/// Resolves a graph name: `petersen`, `grotzsch`, `c<N>`, `p<N>`, `k<N>`,
/// `star<N>`, `bip<A>x<B>`, `empty<N>`, `mycielski-<d>` (last graph of the
/// depth-`d` tower), or `random-n<N>-p<P>` (uses `seed`).
pub fn named(name: &str, seed: u64) -> Result<Graph> {
    let bad = || Error::param(format!("unknown graph name {name:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let name = name.trim().to_ascii_lowercase();
    if name == "petersen" {
        return Ok(petersen());
    }
    if name == "grotzsch" {
        return Ok(grotzsch());
    }
    if let Some(d) = name.strip_prefix("mycielski-") {
        let d = num(d)?;
        return mycielski_tower(d).pop().ok_or_else(bad);
    }
    if let Some(rest) = name.strip_prefix("random-n") {
        let (n, p) = rest.split_once("-p").ok_or_else(bad)?;
        let p: f64 = p.parse().map_err(|_| bad())?;
        return gen_random_triangle_free(num(n)?, p, seed);
    }
    if let Some(rest) = name.strip_prefix("bip") {
        let (a, b) = rest.split_once('x').ok_or_else(bad)?;
        return Ok(complete_bipartite(num(a)?, num(b)?));
    }
    if let Some(n) = name.strip_prefix("star") {
        return Ok(star(num(n)?));
    }
    if let Some(n) = name.strip_prefix("empty") {
        return Ok(Graph::empty(num(n)?));
    }
    if let Some(n) = name.strip_prefix('c') {
        return Ok(cycle(num(n)?));
    }
    if let Some(n) = name.strip_prefix('p') {
        return Ok(path(num(n)?));
    }
    if let Some(n) = name.strip_prefix('k') {
        return Ok(complete(num(n)?));
    }
    Err(bad())
}

/// Palette size `k`, optionally derived from a degree bound and slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub k: u64,
    pub delta: Option<u64>,
    pub eps: Option<f64>,
}

impl Palette {
    pub fn new(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("palette needs at least one color"));
        }
        Ok(Palette { k, delta: None, eps: None })
    }

    /// `k = ⌈(1+ε)Δ/ln Δ⌉`. Requires `Δ ≥ 2` and `ε > 0`.
    ///
    /// The float estimate is corrected so that `k·ln Δ ≥ (1+ε)Δ` and
    /// `(k−1)·ln Δ < (1+ε)Δ` hold in `f64`.
    pub fn from_degree(delta: u64, eps: f64) -> Result<Self> {
        if delta < 2 {
            return Err(Error::param(format!("Δ = {delta} must be at least 2")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param(format!("ε = {eps} must be positive")));
        }
        let ln = (delta as f64).ln();
        let target = (1.0 + eps) * delta as f64;
        let mut k = (target / ln).ceil().max(1.0) as u64;
        while k > 1 && (k - 1) as f64 * ln >= target {
            k -= 1;
        }
        while (k as f64) * ln < target {
            k += 1;
        }
        Ok(Palette { k, delta: Some(delta), eps: Some(eps) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle_free_brute(g: &Graph) -> bool {
        let n = g.n();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn is_c5(g: &Graph) -> bool {
        // Brute-force isomorphism against the standard 5-cycle.
        let c5 = cycle(5);
        if g.n() != 5 || g.edge_count() != 5 {
            return false;
        }
        let mut perm: Vec<usize> = (0..5).collect();
        fn heap(k: usize, p: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
            if k == 1 {
                return f(p);
            }
            for i in 0..k {
                if heap(k - 1, p, f) {
                    return true;
                }
                let j = if k.is_multiple_of(2) { i } else { 0 };
                p.swap(j, k - 1);
            }
            false
        }
        heap(5, &mut perm, &mut |p| {
            c5.edges().iter().all(|&(u, v)| g.has_edge(p[u], p[v]))
        })
    }

    #[test]
    fn parse_single_edge() {
        let g = parse_dimacs(b"p edge 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn parse_empty_graph_and_duplicates() {
        let g = parse_dimacs(b"c hello\np edge 3 0\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 0));
        let g = parse_dimacs(b"p edge 3 3\ne 1 2\ne 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_dimacs(b"p edge 2 1\ne 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, ref msg } if msg.contains("self-loop")));
        let err = parse_dimacs(b"c x\np edge 2 1\ne 1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_dimacs(b"p edgy 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_dimacs(b"e 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_dimacs(b"c nothing\n").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let g = petersen();
        let text = g.to_dimacs("petersen graph\ngenerated by tests");
        assert!(text.starts_with("c petersen graph\nc generated by tests\np edge 10 15\ne 1 2\n"));
        assert_eq!(parse_dimacs(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn json_form() {
        let g = path(3);
        assert_eq!(g.to_json(), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
    }

    #[test]
    fn triangle_detection() {
        assert!(!complete(3).is_triangle_free());
        assert!(cycle(5).is_triangle_free());
        assert!(petersen().is_triangle_free());
        assert!(triangle_free_brute(&petersen()));
    }

    #[test]
    fn mycielski_of_k2_is_c5() {
        assert!(is_c5(&mycielski(&complete(2))));
    }

    #[test]
    fn grotzsch_shape() {
        let g = grotzsch();
        assert_eq!((g.n(), g.edge_count()), (11, 20));
        assert!(triangle_free_brute(&g));
        let tower = mycielski_tower(4);
        assert_eq!((tower[2].n(), tower[2].edge_count()), (11, 20));
        assert!(is_c5(&tower[1]));
        assert_eq!((tower[3].n(), tower[3].edge_count()), (23, 71));
    }

    #[test]
    fn vertex_deletion() {
        let (g, map) = complete(2).delete_vertex(0).unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
        assert_eq!(map.new_to_old, vec![1]);
        for v in 0..5 {
            let (g, _) = cycle(5).delete_vertex(v).unwrap();
            assert_eq!((g.n(), g.edge_count(), g.max_degree()), (4, 3, 2));
            assert_eq!(g.components().len(), 1);
        }
        for v in 0..10 {
            let (g, _) = petersen().delete_vertex(v).unwrap();
            assert_eq!((g.n(), g.edge_count()), (9, 12));
        }
        assert!(matches!(
            path(3).delete_vertex(3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn random_generator_edge_cases() {
        let g = gen_random_triangle_free(5, 0.0, 9).unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 0));
        for seed in 0..20 {
            let g = gen_random_triangle_free(4, 1.0, seed).unwrap();
            assert!(g.edge_count() <= 4);
            assert!(g.is_triangle_free());
        }
        assert!(gen_random_triangle_free(4, 1.5, 0).is_err());
    }

    #[test]
    fn all_graphs_counts() {
        assert_eq!(all_graphs(4).count(), 64);
        assert_eq!(all_graphs(0).count(), 1);
    }

    #[test]
    fn named_graphs() {
        assert_eq!(named("petersen", 0).unwrap(), petersen());
        assert_eq!(named("C5", 0).unwrap(), cycle(5));
        assert_eq!(named("mycielski-3", 0).unwrap(), mycielski_tower(3)[2]);
        assert_eq!(named("bip2x3", 0).unwrap().edge_count(), 6);
        assert_eq!(named("star3", 0).unwrap().degree(0), 3);
        assert!(named("random-n6-p0.5", 3).unwrap().is_triangle_free());
        assert!(named("banana", 0).is_err());
    }

    #[test]
    fn palette_from_degree() {
        let p = Palette::from_degree(1_000_000, 1.0).unwrap();
        assert_eq!(p.k, 144_765);
        let p = Palette::from_degree(3, 1.0).unwrap();
        assert_eq!(p.k, 6);
        assert!(Palette::from_degree(1, 1.0).is_err());
        assert!(Palette::from_degree(10, 0.0).is_err());
        assert!(Palette::new(0).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n.max(1), 0..n.max(1)), 0..20).prop_map(move |es| {
                Graph::from_edges(n, es.into_iter().filter(|(u, v)| u != v && *u < n && *v < n))
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric_and_loop_free(g in arb_graph()) {
            for u in 0..g.n() {
                prop_assert!(!g.has_edge(u, u));
                for &v in g.neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                }
            }
            let max = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
            prop_assert_eq!(g.max_degree(), max);
            prop_assert_eq!(g.edges().len(), g.edge_count());
        }

        #[test]
        fn mycielski_counts_and_triangle_freeness(g in arb_graph()) {
            let m = mycielski(&g);
            prop_assert_eq!(m.n(), 2 * g.n() + 1);
            prop_assert_eq!(m.edge_count(), 3 * g.edge_count() + g.n());
            if g.is_triangle_free() {
                prop_assert!(m.is_triangle_free());
            }
            prop_assert_eq!(g.is_triangle_free(), triangle_free_brute(&g));
        }

        #[test]
        fn deletion_drops_degree_edges(g in arb_graph(), v in 0usize..9) {
            prop_assume!(v < g.n());
            let (h, map) = g.delete_vertex(v).unwrap();
            prop_assert_eq!(h.n(), g.n() - 1);
            prop_assert_eq!(h.edge_count(), g.edge_count() - g.degree(v));
            prop_assert!(map.new_to_old.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn generator_is_reproducible(n in 0usize..12, p in 0.0f64..=1.0, seed: u64) {
            let a = gen_random_triangle_free(n, p, seed).unwrap();
            let b = gen_random_triangle_free(n, p, seed).unwrap();
            prop_assert!(a.is_triangle_free());
            prop_assert_eq!(a, b);
        }
    }
}
