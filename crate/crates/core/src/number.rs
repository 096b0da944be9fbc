use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative count of colorings, of arbitrary size.
///
/// Serializes as a decimal string so that no JSON consumer truncates it.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Converts a signed intermediate result; negative values are a logic
    /// error in the caller.
    pub(crate) fn from_nonnegative(value: BigInt) -> Self {
        BigCount(
            value
                .to_biguint()
                .expect("coloring count must be nonnegative"),
        )
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl Mul<u64> for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: u64) -> BigCount {
        BigCount(self.0 * rhs)
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        BigCount(iter.map(|c| c.0).sum())
    }
}

impl Product for BigCount {
    fn product<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        BigCount(iter.map(|c| c.0).product())
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for BigCount {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigUint>()
            .map(BigCount)
            .map_err(|e| Error::Json(format!("bad count {s:?}: {e}")))
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An exact rational in lowest terms with a positive denominator.
///
/// Displays and serializes as `"p/q"`, including integers (`"2/1"`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRatio(BigRational);

impl ExactRatio {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator(format!("{numer}/0")));
        }
        Ok(ExactRatio(BigRational::new(numer, denom)))
    }

    pub fn from_counts(numer: &BigCount, denom: &BigCount) -> Result<Self> {
        Self::new(numer.to_bigint(), denom.to_bigint())
    }

    pub fn from_integer(v: i64) -> Self {
        ExactRatio(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(BigInt::from(numer), BigInt::from(denom)).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        ExactRatio(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRatio(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Fall back to log space when numerator or denominator overflow f64.
            let sign = if self.0.is_negative() { -1.0 } else { 1.0 };
            sign * (ln_bigint(self.numer()) - ln_bigint(self.denom())).exp()
        })
    }

    /// Natural logarithm, accurate even when the value underflows `f64`.
    /// Returns `-inf` for zero and `NaN` for negative values.
    pub fn ln(&self) -> f64 {
        if self.0.is_zero() {
            f64::NEG_INFINITY
        } else if self.0.is_negative() {
            f64::NAN
        } else {
            ln_bigint(self.numer()) - ln_bigint(self.denom())
        }
    }

    pub fn pow(&self, exp: i32) -> Self {
        ExactRatio(self.0.pow(exp))
    }
}

/// `ln |x|` for a nonzero big integer, computed from its leading 64 bits.
pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 64 {
        return (mag.to_u64().expect("fits in u64") as f64).ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_u64().expect("fits in u64") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl From<BigRational> for ExactRatio {
    fn from(r: BigRational) -> Self {
        ExactRatio(r)
    }
}

impl From<&BigCount> for ExactRatio {
    fn from(c: &BigCount) -> Self {
        ExactRatio(BigRational::from_integer(c.to_bigint()))
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRatio {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |e: &dyn fmt::Display| Error::Json(format!("bad rational {s:?}: {e}"));
        match s.trim().split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|e| bad(&e))?;
                let q: BigInt = q.trim().parse().map_err(|e| bad(&e))?;
                Self::new(p, q)
            }
            None => {
                let p: BigInt = s.trim().parse().map_err(|e| bad(&e))?;
                Ok(ExactRatio(BigRational::from_integer(p)))
            }
        }
    }
}

impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRatio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
