//! Uniform proper colorings and the distribution of available-color lists.
//!
//! [`UniformSampler`] draws exactly uniform colorings by self-reducibility:
//! vertices are fixed one at a time, each color chosen with probability
//! proportional to the number of proper colorings extending the choice.
//! [`run_glauber`] is an approximate single-site chain for graphs beyond the
//! counting guard.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng as _, RngCore};
use serde::{Deserialize, Serialize};

use crate::chromatic::{available_colors, available_count, Budget, Counter, PartialColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::number::{BigCount, ExactRatio};
use crate::rng::{self, Rng};

/// Exact uniform sampler over `C(G)` for a fixed graph and palette.
///
/// Vertices are colored in descending-degree order (ties by index).
/// Extension counts for every visited prefix are cached, so repeated draws
/// get cheaper.
pub struct UniformSampler<'g> {
    graph: &'g Graph,
    k: u32,
    order: Vec<usize>,
    counter: Counter,
    cache: HashMap<Vec<u32>, BigUint>,
    total: BigCount,
}

impl<'g> UniformSampler<'g> {
    pub fn new(graph: &'g Graph, k: u32, budget: Budget) -> Result<Self> {
        let mut counter = Counter::new(budget);
        let total = counter.count_colorings(graph, k as u64)?;
        if total.is_zero() {
            return Err(Error::NoProperColoring);
        }
        let mut order: Vec<usize> = (0..graph.n()).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
        Ok(UniformSampler {
            graph,
            k,
            order,
            counter,
            cache: HashMap::new(),
            total,
        })
    }

    /// `|C(G)|`.
    pub fn total(&self) -> &BigCount {
        &self.total
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn prefix_count(&mut self, prefix: &[u32]) -> Result<BigUint> {
        if let Some(hit) = self.cache.get(prefix) {
            return Ok(hit.clone());
        }
        let mut partial = PartialColoring::empty(self.graph.n(), self.k);
        for (&v, &c) in self.order.iter().zip(prefix) {
            partial.assign(v, c)?;
        }
        let count = self
            .counter
            .count_extensions(self.graph, &partial)?
            .into_biguint();
        self.cache.insert(prefix.to_vec(), count.clone());
        Ok(count)
    }

    pub fn sample(&mut self, rng: &mut Rng) -> Result<PartialColoring> {
        self.sample_traced(rng).map(|(c, _)| c)
    }

    /// Draws a coloring and returns the exact probability of the draw, the
    /// product of the per-vertex choice probabilities. It always equals
    /// `1 / |C(G)|`.
    pub fn sample_traced(&mut self, rng: &mut Rng) -> Result<(PartialColoring, ExactRatio)> {
        let mut prefix: Vec<u32> = Vec::with_capacity(self.order.len());
        let mut here = self.total.as_biguint().clone();
        let mut prob = ExactRatio::one();
        for _ in 0..self.order.len() {
            let mut r = rng.gen_biguint_below(&here);
            let mut chosen = None;
            for c in 1..=self.k {
                prefix.push(c);
                let count = self.prefix_count(&prefix)?;
                if r < count {
                    let step = ExactRatio::from_counts(&count.clone().into(), &here.clone().into())?;
                    prob = ExactRatio::from(prob.into_rational() * step.into_rational());
                    here = count;
                    chosen = Some(c);
                    break;
                }
                r -= count;
                prefix.pop();
            }
            debug_assert!(chosen.is_some(), "extension counts must sum to the parent count");
            if chosen.is_none() {
                return Err(Error::NoProperColoring);
            }
        }
        let mut colors = vec![0u32; self.graph.n()];
        for (&v, &c) in self.order.iter().zip(&prefix) {
            colors[v] = c;
        }
        Ok((PartialColoring::total(self.k, &colors)?, prob))
    }
}

/// One exactly uniform proper `k`-coloring of `g`.
pub fn sample_uniform_coloring(g: &Graph, k: u32, seed: u64) -> Result<PartialColoring> {
    UniformSampler::new(g, k, Budget::default())?.sample(&mut rng::from_seed(seed))
}

/// `E|L_c(v)|` over `c` uniform in `C(G − v)`, by enumerating `C(G − v)`.
pub fn exact_expected_available(
    counter: &mut Counter,
    g: &Graph,
    v: usize,
    k: u32,
) -> Result<ExactRatio> {
    let (gv, map) = g.delete_vertex(v)?;
    let mut sum = 0u64;
    let visited = counter.enumerate_extensions(&gv, &PartialColoring::empty(gv.n(), k), |c| {
        let mut blocked: Vec<u32> = g
            .neighbors(v)
            .iter()
            .map(|&w| c[map.old_to_new[w].expect("neighbor survives")])
            .collect();
        blocked.sort_unstable();
        blocked.dedup();
        sum += (k as usize - blocked.len()) as u64;
    })?;
    if visited == 0 {
        return Err(Error::ZeroDenominator(format!(
            "G - {v} has no proper {k}-coloring"
        )));
    }
    Ok(ExactRatio::frac(sum as i64, visited as i64))
}

/// `P(|L_c(u)| ≤ t)` for `c` uniform in `C(G − v)` and `u ∈ N(v)`, by
/// enumeration.
pub fn exact_tail_probability(
    counter: &mut Counter,
    g: &Graph,
    v: usize,
    u: usize,
    k: u32,
    t: u32,
) -> Result<ExactRatio> {
    g.check_vertex(u)?;
    if !g.has_edge(v, u) {
        return Err(Error::NotANeighbor { v, u });
    }
    let (gv, map) = g.delete_vertex(v)?;
    let u_new = map.old_to_new[u].expect("u survives");
    let mut small = 0u64;
    let visited = counter.enumerate_extensions(&gv, &PartialColoring::empty(gv.n(), k), |c| {
        let mut blocked: Vec<u32> = gv.neighbors(u_new).iter().map(|&w| c[w]).collect();
        blocked.sort_unstable();
        blocked.dedup();
        if (k as usize - blocked.len()) as u64 <= t as u64 {
            small += 1;
        }
    })?;
    if visited == 0 {
        return Err(Error::ZeroDenominator(format!(
            "G - {v} has no proper {k}-coloring"
        )));
    }
    Ok(ExactRatio::frac(small as i64, visited as i64))
}

/// Greedy proper coloring in index order, smallest available color first.
pub fn greedy_coloring(g: &Graph, k: u32) -> Result<PartialColoring> {
    let mut c = PartialColoring::empty(g.n(), k);
    for v in 0..g.n() {
        let avail = available_colors(g, &c, v)?;
        let first = *avail.first().ok_or(Error::GreedyFailed(v))?;
        c.assign(v, first)?;
    }
    Ok(c)
}

/// Single-site Glauber dynamics started from [`greedy_coloring`].
///
/// Each step picks a uniform vertex and recolors it uniformly from its
/// available colors (its own color counts as available). Every state is
/// proper. Mixing is only guaranteed for `k ≥ Δ + 2`; smaller palettes log a
/// warning.
pub fn run_glauber(g: &Graph, k: u32, steps: u64, seed: u64) -> Result<PartialColoring> {
    if (k as usize) < g.max_degree() + 2 {
        log::warn!(
            "k = {k} < Δ + 2 = {}: Glauber dynamics may not be ergodic",
            g.max_degree() + 2
        );
    }
    let mut c = greedy_coloring(g, k)?;
    if g.n() == 0 {
        return Ok(c);
    }
    let mut rng = rng::from_seed(seed);
    for _ in 0..steps {
        let v = rng.gen_range(0..g.n());
        let avail = available_colors(g, &c, v)?;
        let pick = avail[rng.gen_range(0..avail.len())];
        c.assign(v, pick)?;
    }
    Ok(c)
}

/// A statistic that is exact under enumeration and a float under sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stat {
    Exact(ExactRatio),
    Float(f64),
}

impl Stat {
    pub fn to_f64(&self) -> f64 {
        match self {
            Stat::Exact(r) => r.to_f64(),
            Stat::Float(x) => *x,
        }
    }
}

/// Available-color statistics around `v` over colorings of `G − v`.
///
/// `tail_freq[t]` is the fraction of (coloring, neighbor) pairs with
/// `|L_c(u)| ≤ t`; it is empty when `v` has no neighbors. `histogram[s]` is
/// the fraction of colorings with `|L_c(v)| = s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub exact: bool,
    pub samples: BigCount,
    pub mean_available: Stat,
    pub tail_freq: BTreeMap<u32, Stat>,
    pub histogram: BTreeMap<u32, Stat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMode {
    /// Enumerate all of `C(G − v)`.
    Exact,
    /// Independent draws: the exact sampler, or independent Glauber chains
    /// of `glauber_steps` steps each when given.
    Sampled {
        samples: u64,
        seed: u64,
        glauber_steps: Option<u64>,
    },
}

#[derive(Default)]
struct Tally {
    draws: u64,
    sum_v: u64,
    hist: BTreeMap<u32, u64>,
    tail: BTreeMap<u32, u64>,
}

impl Tally {
    fn add(&mut self, g: &Graph, c: &PartialColoring, v: usize, k: u32) {
        let lv = available_count(g, c, v);
        self.draws += 1;
        self.sum_v += lv as u64;
        *self.hist.entry(lv).or_default() += 1;
        for &u in g.neighbors(v) {
            let lu = available_count(g, c, u);
            for t in lu..=k {
                *self.tail.entry(t).or_default() += 1;
            }
        }
        if g.degree(v) > 0 {
            for t in 0..=k {
                self.tail.entry(t).or_default();
            }
        }
    }

    fn finish(self, g: &Graph, v: usize, exact: bool) -> SampleStats {
        let pairs = self.draws * g.degree(v) as u64;
        let stat = |num: u64, den: u64| {
            if exact {
                Stat::Exact(ExactRatio::frac(num as i64, den as i64))
            } else {
                Stat::Float(num as f64 / den as f64)
            }
        };
        SampleStats {
            exact,
            samples: BigCount::from(self.draws),
            mean_available: stat(self.sum_v, self.draws),
            tail_freq: self.tail.iter().map(|(&t, &n)| (t, stat(n, pairs))).collect(),
            histogram: self.hist.iter().map(|(&s, &n)| (s, stat(n, self.draws))).collect(),
        }
    }
}

/// Aggregates `|L_c(u)|` for `u ∈ N(v)` and `|L_c(v)|` over colorings `c`
/// of `G − v`, measured in `G` with `v` left uncolored.
pub fn measure_neighborhood(
    counter: &mut Counter,
    g: &Graph,
    v: usize,
    k: u32,
    mode: MeasureMode,
) -> Result<SampleStats> {
    let (gv, map) = g.delete_vertex(v)?;
    let mut tally = Tally::default();
    match mode {
        MeasureMode::Exact => {
            counter.enumerate_extensions(&gv, &PartialColoring::empty(gv.n(), k), |c| {
                let lifted = lift_total(c, k, &map);
                tally.add(g, &lifted, v, k);
            })?;
            if tally.draws == 0 {
                return Err(Error::ZeroDenominator(format!(
                    "G - {v} has no proper {k}-coloring"
                )));
            }
            Ok(tally.finish(g, v, true))
        }
        MeasureMode::Sampled { samples, seed, glauber_steps } => {
            if samples == 0 {
                return Err(Error::NoSamples);
            }
            let mut rng = rng::from_seed(seed);
            let mut exact = match glauber_steps {
                None => Some(UniformSampler::new(&gv, k, *counter.budget())?),
                Some(_) => None,
            };
            for _ in 0..samples {
                let c = match (&mut exact, glauber_steps) {
                    (Some(s), _) => s.sample(&mut rng)?,
                    (None, Some(steps)) => run_glauber(&gv, k, steps, rng.next_u64())?,
                    (None, None) => unreachable!(),
                };
                tally.add(g, &c.lift(&map), v, k);
            }
            Ok(tally.finish(g, v, false))
        }
    }
}

fn lift_total(c: &[u32], k: u32, map: &crate::graph::Relabel) -> PartialColoring {
    let colors = map
        .old_to_new
        .iter()
        .map(|m| m.map(|i| c[i]))
        .collect();
    PartialColoring::from_colors(k, colors).expect("enumerated colors lie in the palette")
}
