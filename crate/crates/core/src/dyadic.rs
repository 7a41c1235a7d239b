//! Exact nonnegative dyadic rationals `a / 2^b`.
//!
//! Values are kept in canonical form (odd numerator, or numerator zero with
//! exponent zero), so equality and hashing are structural. Every comparison
//! against `-log P` elsewhere in the crate goes through
//! [`Dyadic::cmp_pow2`] or [`Dyadic::neg_log_bounds`]; no logarithm is ever
//! evaluated in floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("-log is undefined for zero")]
    Zero,
    #[error("value {0} exceeds 1")]
    AboveOne(Dyadic),
    #[error("subtraction would go negative")]
    Negative,
    #[error("cannot parse dyadic {0:?}: expected \"a/2^b\"")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

/// Integer bracketing of `-log2 d` for `0 < d <= 1`:
/// `2^-ceil <= d <= 2^-floor` and `ceil - floor ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogBounds {
    pub floor_neg_log: u64,
    pub ceil_neg_log: u64,
}

impl LogBounds {
    pub fn is_exact(&self) -> bool {
        self.floor_neg_log == self.ceil_neg_log
    }
}

impl Dyadic {
    pub fn new(num: impl Into<BigUint>, exp: u64) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::one(),
            exp: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic {
            num: BigUint::one(),
            exp: k,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_power_of_two(&self) -> bool {
        self.num.is_one()
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp);
        let b = &other.num << (e - other.exp);
        (a >= b).then(|| Dyadic::new(a - b, e))
    }

    /// `1 - self` for `self <= 1`.
    pub fn complement(&self) -> Result<Dyadic, ArithError> {
        Dyadic::one()
            .checked_sub(self)
            .ok_or_else(|| ArithError::AboveOne(self.clone()))
    }

    pub fn half(&self) -> Dyadic {
        self.mul_pow2_neg(1)
    }

    /// `self · 2^-k`.
    pub fn mul_pow2_neg(&self, k: u64) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + k)
    }

    /// `self · 2^k`.
    pub fn mul_pow2(&self, k: u64) -> Dyadic {
        if k <= self.exp {
            Dyadic::new(self.num.clone(), self.exp - k)
        } else {
            Dyadic::new(&self.num << (k - self.exp), 0)
        }
    }

    /// Exact three-way comparison of `self` against `2^-k`.
    pub fn cmp_pow2(&self, k: u64) -> Ordering {
        if self.is_zero() {
            return Ordering::Less;
        }
        // self = a / 2^b with a odd; a·2^k vs 2^b, where
        // floor(log2(a·2^k)) = bits(a) - 1 + k.
        let top = self.num.bits() - 1 + k;
        match top.cmp(&self.exp) {
            Ordering::Equal if self.num.is_one() => Ordering::Equal,
            Ordering::Equal => Ordering::Greater,
            other => other,
        }
    }

    /// Integer bracketing of `-log2 self`; requires `0 < self <= 1`.
    pub fn neg_log_bounds(&self) -> Result<LogBounds, ArithError> {
        if self.is_zero() {
            return Err(ArithError::Zero);
        }
        if self.cmp_pow2(0) == Ordering::Greater {
            return Err(ArithError::AboveOne(self.clone()));
        }
        // a / 2^b with 2^(bits-1) <= a < 2^bits, so
        // b - bits < -log2 <= b - bits + 1, with equality only when a = 1.
        let bits = self.num.bits();
        if self.num.is_one() {
            Ok(LogBounds {
                floor_neg_log: self.exp,
                ceil_neg_log: self.exp,
            })
        } else {
            Ok(LogBounds {
                floor_neg_log: self.exp - bits,
                ceil_neg_log: self.exp - bits + 1,
            })
        }
    }

    /// `floor(self · 2^k)`.
    pub fn floor_scaled(&self, k: u64) -> BigUint {
        if k >= self.exp {
            &self.num << (k - self.exp)
        } else {
            &self.num >> (self.exp - k)
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp);
        let b = &other.num << (e - other.exp);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new((&self.num << (e - self.exp)) + (&rhs.num << (e - rhs.exp)), e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        // integers may carry even numerators, so renormalize
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'a> std::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, d| &acc + d)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, d| &acc + &d)
    }
}

impl std::iter::Product for Dyadic {
    fn product<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::one(), |acc, d| &acc * &d)
    }
}

/// `a/2^b` with canonical `a` and `b`; zero prints as `0`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `a/2^b` (any `a`, normalised on read) and bare integers.
impl FromStr for Dyadic {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ArithError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let exp = den
                    .trim()
                    .strip_prefix("2^")
                    .ok_or_else(err)?
                    .parse::<u64>()
                    .map_err(|_| err())?;
                let num = num.trim().parse::<BigUint>().map_err(|_| err())?;
                Ok(Dyadic::new(num, exp))
            }
            None => Ok(Dyadic::new(s.parse::<BigUint>().map_err(|_| err())?, 0)),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
