//! The scalar abstraction behind the numeric modules.
//!
//! Geometry and edge-length code is written against [`Scalar`], an ordered
//! field. The library's own tests and the CLI instantiate it with
//! [`num_rational::BigRational`] so every comparison and normalization is
//! exact; `f64` also satisfies the bounds for quick approximate runs.
//! Integer linear algebra is written against [`IntScalar`], instantiated
//! with [`num_bigint::BigInt`] where entry growth is unbounded.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar: Num + Signed + PartialOrd + Clone + fmt::Debug + fmt::Display {
    fn from_ratio(p: i64, q: i64) -> Self;

    fn from_int(p: i64) -> Self {
        Self::from_ratio(p, 1)
    }

    /// Renders the scalar as a lowest-terms `"p/q"` string where exact, a
    /// decimal otherwise.
    fn to_ratio_string(&self) -> String {
        format!("{self}")
    }

    /// Parses either `"p"` or `"p/q"`.
    fn parse_ratio(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().ok()?;
                let q: i64 = q.trim().parse().ok()?;
                if q == 0 {
                    return None;
                }
                Some(Self::from_ratio(p, q))
            }
            None => Some(Self::from_int(s.parse().ok()?)),
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(p: i64, q: i64) -> f64 {
        p as f64 / q as f64
    }
}

impl Scalar for BigRational {
    fn from_ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_ratio(s: &str) -> Option<BigRational> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().ok()?;
                let q: BigInt = q.trim().parse().ok()?;
                if q == num_traits::Zero::zero() {
                    return None;
                }
                Some(BigRational::new(p, q))
            }
            None => {
                let p: BigInt = s.parse().ok()?;
                Some(BigRational::from_integer(p))
            }
        }
    }
}

pub trait IntScalar:
    num_integer::Integer + Signed + Clone + fmt::Debug + fmt::Display + FromPrimitive
{
}

impl IntScalar for i64 {}
impl IntScalar for i128 {}
impl IntScalar for BigInt {}
