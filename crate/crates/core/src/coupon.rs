//! Independent uniform picks `X_i ∈ L_i` from color lists over `[k]`, the
//! uncovered set `X = [k] ∖ {X_1, …, X_d}`, and lower bounds on `E|X|`.
//!
//! Everything probabilistic is computed in exact rationals. The only float
//! quantities are the AM-GM root, reported for display while its inequality
//! is checked exactly, and [`final_bound`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Palette;
use crate::number::ExactRatio;
use crate::rng;

/// Palette size `k` plus lists `L_1..L_d`, each a nonempty subset of
/// `{1..k}` stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct CouponInstance {
    k: u32,
    lists: Vec<Vec<u32>>,
}

/// Wire form: `{"k": int, "lists": [[int, ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct InstanceJson {
    k: u32,
    lists: Vec<Vec<u32>>,
}

impl TryFrom<InstanceJson> for CouponInstance {
    type Error = Error;
    fn try_from(j: InstanceJson) -> Result<Self> {
        CouponInstance::new(j.k, j.lists)
    }
}

impl From<CouponInstance> for InstanceJson {
    fn from(c: CouponInstance) -> Self {
        InstanceJson { k: c.k, lists: c.lists }
    }
}

impl CouponInstance {
    pub fn new(k: u32, lists: Vec<Vec<u32>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("palette needs at least one color"));
        }
        let mut out = Vec::with_capacity(lists.len());
        for (i, l) in lists.into_iter().enumerate() {
            let set: BTreeSet<u32> = l.into_iter().collect();
            if set.is_empty() {
                return Err(Error::param(format!("list {} is empty", i + 1)));
            }
            if let Some(&c) = set.iter().find(|&&c| c == 0 || c > k) {
                return Err(Error::ColorOutOfRange { color: c, k });
            }
            out.push(set.into_iter().collect());
        }
        Ok(CouponInstance { k, lists: out })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d(&self) -> usize {
        self.lists.len()
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    fn check_color(&self, j: u32) -> Result<()> {
        if j == 0 || j > self.k {
            Err(Error::ColorOutOfRange { color: j, k: self.k })
        } else {
            Ok(())
        }
    }

    /// Lists of size `≤ t`, the ones conditioned away.
    pub fn small_lists(&self, t: u32) -> impl Iterator<Item = &Vec<u32>> {
        self.lists.iter().filter(move |l| l.len() as u64 <= t as u64)
    }
}

/// Small-list threshold `t`, conditioned colors `B`, slack `ε` and target
/// `ℓ`. `t = 0` with empty `B` is the unconditioned setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub t: u32,
    pub b: BTreeSet<u32>,
    pub eps: f64,
    pub ell: f64,
}

impl BoundParams {
    pub fn unconditioned() -> Self {
        BoundParams { t: 0, b: BTreeSet::new(), eps: 1.0, ell: 0.0 }
    }

    pub fn new(t: u32, b: impl IntoIterator<Item = u32>) -> Self {
        BoundParams { t, b: b.into_iter().collect(), eps: 1.0, ell: 0.0 }
    }

    fn check(&self, inst: &CouponInstance) -> Result<()> {
        for &j in &self.b {
            inst.check_color(j)?;
        }
        Ok(())
    }
}

/// `ℓ(Δ) = ln²Δ`.
pub fn default_ell(delta: u64) -> f64 {
    let l = (delta as f64).ln();
    l * l
}

/// `t(Δ) = max(2, ⌈√(ln Δ)⌉)`.
pub fn default_t(delta: u64) -> u32 {
    let s = (delta.max(1) as f64).ln().sqrt().ceil();
    (s as u32).max(2)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `1 − 1/s`
fn survive(s: usize) -> BigRational {
    rat(s as i64 - 1, s as i64)
}

fn large(inst: &CouponInstance, t: u32) -> impl Iterator<Item = &Vec<u32>> {
    inst.lists.iter().filter(move |l| l.len() as u64 > t as u64)
}

/// `Π_{L_i ∋ j, |L_i| > t} (1 − 1/|L_i|)`
fn survival_product(inst: &CouponInstance, j: u32, t: u32) -> BigRational {
    large(inst, t)
        .filter(|l| l.binary_search(&j).is_ok())
        .fold(BigRational::one(), |acc, l| acc * survive(l.len()))
}

/// `Σ_{j ∉ B} Π_{L_i ∋ j, |L_i| > t} (1 − 1/|L_i|)`, the expected number of
/// uncovered colors outside `B` once the small lists are conditioned away.
pub fn exact_uncovered_expectation(inst: &CouponInstance, params: &BoundParams) -> Result<ExactRatio> {
    params.check(inst)?;
    Ok((1..=inst.k)
        .filter(|j| !params.b.contains(j))
        .map(|j| survival_product(inst, j, params.t))
        .fold(BigRational::zero(), |a, b| a + b)
        .into())
}

/// `P(j ∈ X) = Π_{L_i ∋ j} (1 − 1/|L_i|)`
pub fn uncovered_probability(inst: &CouponInstance, j: u32) -> Result<ExactRatio> {
    inst.check_color(j)?;
    Ok(survival_product(inst, j, 0).into())
}

/// `P(j ∈ X and j′ ∈ X) = Π_i (1 − |{j, j′} ∩ L_i| / |L_i|)`
pub fn pair_uncovered_probability(inst: &CouponInstance, j: u32, j2: u32) -> Result<ExactRatio> {
    inst.check_color(j)?;
    inst.check_color(j2)?;
    if j == j2 {
        return Err(Error::param(format!("pair needs distinct colors, got {j} twice")));
    }
    Ok(pair_raw(inst, j, j2).into())
}

fn pair_raw(inst: &CouponInstance, j: u32, j2: u32) -> BigRational {
    inst.lists.iter().fold(BigRational::one(), |acc, l| {
        let hit = l.binary_search(&j).is_ok() as i64 + l.binary_search(&j2).is_ok() as i64;
        if hit == 0 {
            acc
        } else {
            acc * rat(l.len() as i64 - hit, l.len() as i64)
        }
    })
}

/// `P(j, j′ ∈ X) − P(j ∈ X) P(j′ ∈ X)`
pub fn uncovered_covariance(inst: &CouponInstance, j: u32, j2: u32) -> Result<ExactRatio> {
    let pair = pair_uncovered_probability(inst, j, j2)?.into_rational();
    Ok((pair - survival_product(inst, j, 0) * survival_product(inst, j2, 0)).into())
}

/// `Var |X| = Σ_j p_j (1 − p_j) + Σ_{j ≠ j′} (p_{jj′} − p_j p_{j′})`
pub fn uncovered_variance(inst: &CouponInstance) -> ExactRatio {
    let p: Vec<BigRational> = (1..=inst.k).map(|j| survival_product(inst, j, 0)).collect();
    let mut var = BigRational::zero();
    for (a, pa) in p.iter().enumerate() {
        var += pa * (BigRational::one() - pa);
        for (b, pb) in p.iter().enumerate().skip(a + 1) {
            let cov = pair_raw(inst, a as u32 + 1, b as u32 + 1) - pa * pb;
            var += cov * BigInt::from(2);
        }
    }
    var.into()
}

/// Exact law of `|X|` by enumerating every joint outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncoveredDistribution {
    pub outcomes: u64,
    pub pmf: BTreeMap<u32, ExactRatio>,
}

impl UncoveredDistribution {
    pub fn mean(&self) -> ExactRatio {
        self.moment(1)
    }

    pub fn second_moment(&self) -> ExactRatio {
        self.moment(2)
    }

    pub fn variance(&self) -> ExactRatio {
        let m = self.mean().into_rational();
        (self.second_moment().into_rational() - &m * &m).into()
    }

    fn moment(&self, e: u32) -> ExactRatio {
        self.pmf
            .iter()
            .fold(BigRational::zero(), |acc, (&s, p)| {
                acc + p.as_rational() * BigInt::from(s as u64).pow(e)
            })
            .into()
    }
}

/// Brute-force oracle: visits all `Π|L_i|` equally likely outcomes.
pub fn enumerate_uncovered(inst: &CouponInstance, max_outcomes: u64) -> Result<UncoveredDistribution> {
    let outcomes = inst
        .lists
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64))
        .filter(|&n| n <= max_outcomes)
        .ok_or_else(|| {
            Error::ResourceGuard(format!("coupon outcome space exceeds budget {max_outcomes}"))
        })?;
    let d = inst.d();
    let mut idx = vec![0usize; d];
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut covered = vec![0u32; inst.k as usize + 1];
    loop {
        for (i, l) in inst.lists.iter().enumerate() {
            covered[l[idx[i]] as usize] += 1;
        }
        let uncovered = (1..=inst.k as usize).filter(|&j| covered[j] == 0).count() as u32;
        *counts.entry(uncovered).or_default() += 1;
        covered.iter_mut().for_each(|c| *c = 0);
        let mut i = 0;
        while i < d && idx[i] + 1 == inst.lists[i].len() {
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
        idx[i] += 1;
    }
    Ok(UncoveredDistribution {
        outcomes,
        pmf: counts
            .into_iter()
            .map(|(s, c)| (s, ExactRatio::frac(c as i64, outcomes as i64)))
            .collect(),
    })
}

/// AM-GM lower bound on the conditional expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmGmBound {
    /// `k − |B|`
    pub m: u32,
    /// The conditional expectation (the arithmetic side, summed).
    pub mean: ExactRatio,
    /// `Π_{j ∉ B} Π_{L_i ∋ j, |L_i| > t} (1 − 1/|L_i|)`
    pub inner_product: ExactRatio,
    /// `m · inner_product^{1/m}`, for display.
    pub value: f64,
    /// `(mean / m)^m ≥ inner_product`, decided exactly.
    pub holds: bool,
}

pub fn amgm_lower_bound(inst: &CouponInstance, params: &BoundParams) -> Result<AmGmBound> {
    params.check(inst)?;
    if params.b.len() as u64 >= inst.k as u64 {
        return Err(Error::param(format!(
            "|B| = {} leaves no colors out of k = {}",
            params.b.len(),
            inst.k
        )));
    }
    let m = inst.k - params.b.len() as u32;
    let mean = exact_uncovered_expectation(inst, params)?;
    let inner: BigRational = (1..=inst.k)
        .filter(|j| !params.b.contains(j))
        .map(|j| survival_product(inst, j, params.t))
        .fold(BigRational::one(), |a, b| a * b);
    let am = (mean.as_rational() / BigInt::from(m)).pow(m as i32);
    let holds = am >= inner;
    let inner = ExactRatio::from(inner);
    let value = if inner.as_rational().is_zero() {
        0.0
    } else {
        m as f64 * (inner.ln() / m as f64).exp()
    };
    Ok(AmGmBound { m, mean, inner_product: inner, value, holds })
}

/// Both sides of the reordered product bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReorderingBound {
    /// `Π_{i : |L_i| > t} Π_{j ∈ L_i ∖ B} (1 − 1/|L_i|)`
    pub lhs: ExactRatio,
    /// `(1 − 1/t)^{tΔ}`
    pub rhs: ExactRatio,
    pub holds: bool,
    /// The reordered product equals the AM-GM inner product.
    pub equals_inner_product: bool,
}

pub fn reordering_lower_bound(
    inst: &CouponInstance,
    params: &BoundParams,
    delta: u64,
) -> Result<ReorderingBound> {
    params.check(inst)?;
    if params.t == 0 {
        return Err(Error::param("reordering bound needs t ≥ 1"));
    }
    if inst.d() as u64 > delta {
        return Err(Error::param(format!("d = {} exceeds Δ = {delta}", inst.d())));
    }
    let lhs = large(inst, params.t).fold(BigRational::one(), |acc, l| {
        let outside_b = l.iter().filter(|j| !params.b.contains(j)).count();
        acc * num_traits::pow(survive(l.len()), outside_b)
    });
    let t = params.t as i64;
    let exp = usize::try_from(params.t as u64 * delta)
        .map_err(|_| Error::param("tΔ too large for exact power"))?;
    let rhs = num_traits::pow(rat(t - 1, t), exp);
    let inner: BigRational = (1..=inst.k)
        .filter(|j| !params.b.contains(j))
        .map(|j| survival_product(inst, j, params.t))
        .fold(BigRational::one(), |a, b| a * b);
    Ok(ReorderingBound {
        holds: lhs >= rhs,
        equals_inner_product: lhs == inner,
        lhs: lhs.into(),
        rhs: rhs.into(),
    })
}

/// The end of the bound chain at degree `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalBound {
    pub delta: u64,
    pub eps: f64,
    pub t: u32,
    pub b: u64,
    pub k: u64,
    /// `(k − b) · (1 − 1/t)^{tΔ/(k − b)}`
    pub value: f64,
    /// `ℓ(Δ) = ln²Δ`
    pub ell: f64,
    pub ratio: f64,
}

/// Evaluates `(k − b)(1 − 1/t)^{tΔ/(k−b)}` with `k = ⌈(1+ε)Δ/ln Δ⌉`, in log
/// space. Requires `Δ ≥ 3`, `ε > 0`, `t ≥ 2` and `b < k`.
pub fn final_bound(delta: u64, eps: f64, t: u32, b: u64) -> Result<FinalBound> {
    if delta < 3 {
        return Err(Error::param(format!("Δ = {delta} must be at least 3")));
    }
    if t < 2 {
        return Err(Error::param(format!("t = {t} must be at least 2")));
    }
    let k = Palette::from_degree(delta, eps)?.k;
    if b >= k {
        return Err(Error::param(format!("b = {b} must be below k = {k}")));
    }
    let m = (k - b) as f64;
    let t_f = t as f64;
    let ln_value = m.ln() + (t_f * delta as f64 / m) * (-1.0 / t_f).ln_1p();
    let value = ln_value.exp();
    let ell = default_ell(delta);
    Ok(FinalBound { delta, eps, t, b, k, value, ell, ratio: value / ell })
}

/// Empirical moments of `|X|` from independent joint draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncoveredSampleStats {
    pub samples: u64,
    pub mean: f64,
    /// Unbiased sample variance; zero for a single sample.
    pub variance: f64,
    pub std_error: f64,
    pub histogram: BTreeMap<u32, f64>,
}

pub fn monte_carlo_uncovered(inst: &CouponInstance, samples: u64, seed: u64) -> Result<UncoveredSampleStats> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let mut rng = rng::from_seed(seed);
    let mut covered = vec![false; inst.k as usize + 1];
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let (mut sum, mut sum_sq) = (0f64, 0f64);
    for _ in 0..samples {
        covered.iter_mut().for_each(|c| *c = false);
        for l in &inst.lists {
            covered[l[rng.gen_range(0..l.len())] as usize] = true;
        }
        let x = covered[1..].iter().filter(|&&c| !c).count() as u32;
        *counts.entry(x).or_default() += 1;
        sum += x as f64;
        sum_sq += (x as f64) * (x as f64);
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(UncoveredSampleStats {
        samples,
        mean,
        variance,
        std_error: (variance / n).sqrt(),
        histogram: counts.into_iter().map(|(s, c)| (s, c as f64 / n)).collect(),
    })
}
