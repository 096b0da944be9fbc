//! Brute-force reference implementations used by the integration tests.
//! Nothing here calls the library's counting, sampling or coupon code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use tfcolor::Graph;

pub fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n()];
    for (u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Visits every assignment of colors `1..=k` to the `None` entries of
/// `start` whose vertex is in `active`, proper on the edges among active or
/// precolored vertices. Vertices neither active nor precolored are ignored.
pub fn for_each_coloring(
    adj: &[Vec<usize>],
    k: u32,
    active: &[bool],
    start: &[Option<u32>],
    visit: &mut dyn FnMut(&[Option<u32>]),
) {
    let order: Vec<usize> = (0..adj.len()).filter(|&v| active[v] && start[v].is_none()).collect();
    let mut colors = start.to_vec();
    fn rec(
        i: usize,
        order: &[usize],
        adj: &[Vec<usize>],
        k: u32,
        colors: &mut Vec<Option<u32>>,
        visit: &mut dyn FnMut(&[Option<u32>]),
    ) {
        if i == order.len() {
            visit(colors);
            return;
        }
        let v = order[i];
        for c in 1..=k {
            if adj[v].iter().all(|&u| colors[u] != Some(c)) {
                colors[v] = Some(c);
                rec(i + 1, order, adj, k, colors, visit);
                colors[v] = None;
            }
        }
    }
    rec(0, &order, adj, k, &mut colors, visit);
}

/// Proper colorings of the subgraph induced on `active`.
pub fn count_active(adj: &[Vec<usize>], k: u32, active: &[bool]) -> u64 {
    let mut n = 0;
    for_each_coloring(adj, k, active, &vec![None; adj.len()], &mut |_| n += 1);
    n
}

pub fn count(g: &Graph, k: u32) -> u64 {
    count_active(&adjacency(g), k, &vec![true; g.n()])
}

pub fn all_but(n: usize, removed: &[usize]) -> Vec<bool> {
    (0..n).map(|v| !removed.contains(&v)).collect()
}

/// `k − |{colors on N(u)}|`, ignoring uncolored neighbors.
pub fn available(adj: &[Vec<usize>], k: u32, colors: &[Option<u32>], u: usize) -> u32 {
    let used: BTreeSet<u32> = adj[u].iter().filter_map(|&w| colors[w]).collect();
    k - used.len() as u32
}

pub fn available_list(adj: &[Vec<usize>], k: u32, colors: &[Option<u32>], u: usize) -> Vec<u32> {
    (1..=k)
        .filter(|&c| adj[u].iter().all(|&w| colors[w] != Some(c)))
        .collect()
}

pub fn is_proper(g: &Graph, colors: &[u32]) -> bool {
    colors.len() == g.n() && g.edges().iter().all(|&(u, v)| colors[u] != colors[v])
}

pub fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `E|X|`, `Var|X|` and `P(j, j' both uncovered)` over all tuples of
/// independent uniform picks from `lists`.
pub struct CouponOracle {
    pub mean: BigRational,
    pub variance: BigRational,
    pub pair: Vec<Vec<BigRational>>,
    pub single: Vec<BigRational>,
}

pub fn coupon_oracle(k: u32, lists: &[Vec<u32>]) -> CouponOracle {
    let k_us = k as usize;
    let total: u64 = lists.iter().map(|l| l.len() as u64).product();
    let mut idx = vec![0usize; lists.len()];
    let mut sum = 0u64;
    let mut sum_sq = 0u64;
    let mut single = vec![0u64; k_us + 1];
    let mut pair = vec![vec![0u64; k_us + 1]; k_us + 1];
    loop {
        let covered: BTreeSet<u32> = idx.iter().zip(lists).map(|(&i, l)| l[i]).collect();
        let unc: Vec<u32> = (1..=k).filter(|c| !covered.contains(c)).collect();
        sum += unc.len() as u64;
        sum_sq += (unc.len() * unc.len()) as u64;
        for &a in &unc {
            single[a as usize] += 1;
            for &b in &unc {
                pair[a as usize][b as usize] += 1;
            }
        }
        let mut pos = 0;
        loop {
            if pos == lists.len() {
                let mean = ratio(sum, total);
                let variance = ratio(sum_sq, total) - &mean * &mean;
                return CouponOracle {
                    mean,
                    variance,
                    pair: pair
                        .iter()
                        .map(|row| row.iter().map(|&x| ratio(x, total)).collect())
                        .collect(),
                    single: single.iter().map(|&x| ratio(x, total)).collect(),
                };
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `Σ_{j ∉ B} Π_{i : j ∈ L_i, |L_i| > t} (1 − 1/|L_i|)` and the product of
/// the same summands.
pub fn conditional_terms(k: u32, lists: &[Vec<u32>], t: u32, b: &BTreeSet<u32>) -> Vec<BigRational> {
    (1..=k)
        .filter(|j| !b.contains(j))
        .map(|j| {
            lists
                .iter()
                .filter(|l| l.len() > t as usize && l.contains(&j))
                .fold(BigRational::one(), |acc, l| acc * ratio(l.len() as u64 - 1, l.len() as u64))
        })
        .collect()
}

pub fn sum(xs: &[BigRational]) -> BigRational {
    xs.iter().fold(BigRational::zero(), |a, b| a + b)
}

pub fn product(xs: &[BigRational]) -> BigRational {
    xs.iter().fold(BigRational::one(), |a, b| a * b)
}
