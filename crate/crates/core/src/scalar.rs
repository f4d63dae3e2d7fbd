//! Exact-where-possible scalar values.
//!
//! Most quantities in this crate are dyadic rationals. The one exception is
//! the four-qubit value `(3+sqrt 5)/8`, carried as a float.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub type Rational = Ratio<i128>;

/// Tolerance used when at least one side of a comparison is irrational.
pub const IRRATIONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(f64),
}

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// `2^k` as an exact integer.
pub fn pow2(k: u32) -> i128 {
    1i128 << k
}

impl Scalar {
    pub fn exact(num: i128, den: i128) -> Self {
        Scalar::Exact(Rational::new(num, den))
    }

    pub fn int(v: i128) -> Self {
        Scalar::Exact(Rational::from_integer(v))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(v) => v,
        }
    }

    pub fn as_exact(self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    fn lift(self, other: Scalar, exact: impl Fn(Rational, Rational) -> Rational, approx: impl Fn(f64, f64) -> f64) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (a, b) => Scalar::Approx(approx(a.to_f64(), b.to_f64())),
        }
    }

    pub fn add(self, other: Scalar) -> Scalar {
        self.lift(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(self, other: Scalar) -> Scalar {
        self.lift(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(self, other: Scalar) -> Scalar {
        self.lift(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(self, other: Scalar) -> Scalar {
        self.lift(other, |a, b| a / b, |a, b| a / b)
    }

    pub fn one() -> Scalar {
        Scalar::Exact(Rational::one())
    }

    pub fn zero() -> Scalar {
        Scalar::Exact(Rational::zero())
    }

    /// Three-way comparison. Exact when both sides are rational; otherwise
    /// values within [`IRRATIONAL_TOL`] compare equal.
    pub fn compare(self, other: Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(&b),
            (a, b) => {
                let d = a.to_f64() - b.to_f64();
                if d.abs() <= IRRATIONAL_TOL {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn is_negative(self) -> bool {
        self.compare(Scalar::zero()) == Ordering::Less
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Serialized as `{num, den, float}` for rationals and
/// `{irrational: true, float}` otherwise.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => {
                let mut s = serializer.serialize_struct("Scalar", 3)?;
                // i128 is not portable JSON; numbers here stay within i64 for n <= 60.
                s.serialize_field("num", &(*r.numer() as i64))?;
                s.serialize_field("den", &(*r.denom() as i64))?;
                s.serialize_field("float", &self.to_f64())?;
                s.end()
            }
            Scalar::Approx(v) => {
                let mut s = serializer.serialize_struct("Scalar", 2)?;
                s.serialize_field("irrational", &true)?;
                s.serialize_field("float", v)?;
                s.end()
            }
        }
    }
}
