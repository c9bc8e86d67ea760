//! Exact nonnegative rational arithmetic extended with a single point at
//! infinity.
//!
//! Link capacities, schedule weights, and rates are all values of this type.
//! Finite values are kept in lowest terms with big-integer numerator and
//! denominator, so every computation in the crate is exact; infinity models
//! links that never constrain a rate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A nonnegative rational number or positive infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    /// The additive identity.
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    /// The multiplicative identity.
    pub fn one() -> Self {
        ExtRational::Finite(BigRational::one())
    }

    pub fn infinity() -> Self {
        ExtRational::Infinity
    }

    pub fn from_integer(v: u64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    /// Builds `numer/denom` in lowest terms. Rejects a zero denominator and
    /// negative values.
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::Parse("denominator is zero".into()));
        }
        let value = BigRational::new(numer, denom);
        Self::from_ratio(value)
    }

    /// Wraps an exact rational, rejecting negative values.
    pub fn from_ratio(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::NegativeValue(value.to_string()));
        }
        Ok(ExtRational::Finite(value))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(v) if v.is_zero())
    }

    /// The finite value, if any.
    pub fn as_ratio(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(v) => Some(v),
            ExtRational::Infinity => None,
        }
    }

    /// True when the value is a nonnegative integer.
    pub fn is_integer(&self) -> bool {
        matches!(self, ExtRational::Finite(v) if v.is_integer())
    }

    /// Half the harmonic mean, `x*y/(x+y)`, the capacity contribution of two
    /// adjacent links that must share the relay between them.
    ///
    /// Extended cases: a zero operand yields zero (the relay is cut off on
    /// one side), an infinite operand yields the other operand, and two
    /// infinite operands yield infinity.
    pub fn hm(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => ExtRational::Infinity,
            (ExtRational::Infinity, ExtRational::Finite(_)) => other.clone(),
            (ExtRational::Finite(_), ExtRational::Infinity) => self.clone(),
            (ExtRational::Finite(x), ExtRational::Finite(y)) => {
                if x.is_zero() || y.is_zero() {
                    ExtRational::zero()
                } else {
                    ExtRational::Finite(x * y / (x + y))
                }
            }
        }
    }

    /// `self - other` when the difference is nonnegative; `None` otherwise
    /// and for `inf - inf`.
    pub fn try_sub(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => None,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Some(ExtRational::Infinity),
            (ExtRational::Finite(_), ExtRational::Infinity) => None,
            (ExtRational::Finite(x), ExtRational::Finite(y)) => {
                if x < y {
                    None
                } else {
                    Some(ExtRational::Finite(x - y))
                }
            }
        }
    }

    /// Approximate float value; infinity maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Infinity => f64::INFINITY,
            ExtRational::Finite(v) => {
                let n = crate::rational::bigint_to_f64(v.numer());
                let d = crate::rational::bigint_to_f64(v.denom());
                n / d
            }
        }
    }
}

pub(crate) fn bigint_to_f64(v: &BigInt) -> f64 {
    use num::ToPrimitive;
    v.to_f64().unwrap_or(f64::INFINITY)
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(x), ExtRational::Finite(y)) => x.cmp(y),
        }
    }
}

impl Add for &ExtRational {
    type Output = ExtRational;

    fn add(self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(x), ExtRational::Finite(y)) => ExtRational::Finite(x + y),
            _ => ExtRational::Infinity,
        }
    }
}

impl Add for ExtRational {
    type Output = ExtRational;

    fn add(self, other: ExtRational) -> ExtRational {
        &self + &other
    }
}

/// Multiplication with the convention `0 * inf = 0`. Rate evaluation never
/// relies on that case: infinite-capacity links are short-circuited before
/// any weight is multiplied in.
impl Mul for &ExtRational {
    type Output = ExtRational;

    fn mul(self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(x), ExtRational::Finite(y)) => ExtRational::Finite(x * y),
            (x, y) => {
                if x.is_zero() || y.is_zero() {
                    ExtRational::zero()
                } else {
                    ExtRational::Infinity
                }
            }
        }
    }
}

impl Mul for ExtRational {
    type Output = ExtRational;

    fn mul(self, other: ExtRational) -> ExtRational {
        &self * &other
    }
}

impl Sum for ExtRational {
    fn sum<I: Iterator<Item = ExtRational>>(iter: I) -> ExtRational {
        iter.fold(ExtRational::zero(), |acc, v| &acc + &v)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinity => write!(f, "inf"),
            ExtRational::Finite(v) => {
                if v.is_integer() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    /// Accepts `"inf"`, an integer string, or `"p/q"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtRational::Infinity);
        }
        let parse_int = |t: &str| -> Result<BigInt> {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid rational '{s}'")))
        };
        match s.split_once('/') {
            None => {
                let n = parse_int(s)?;
                ExtRational::new(n, BigInt::one())
            }
            Some((num, den)) => {
                let n = parse_int(num)?;
                let d = parse_int(den)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("invalid rational '{s}': zero denominator")));
                }
                ExtRational::new(n, d)
            }
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
