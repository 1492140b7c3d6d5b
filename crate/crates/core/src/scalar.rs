//! The scalar abstraction shared by the exact and certified evaluation paths.
//!
//! Everything above this layer (actions, smoothed metrics, measures) is
//! written once against [`Scalar`]. Rational data runs through
//! [`Rational`] and every comparison is exact; transcendental data runs
//! through [`Interval`] and every comparison is decisive or reported as such.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, Signed, ToPrimitive};
use num_traits::{One, Zero};

use crate::interval::{cmp_f64_ratio, Interval, Widen};
use crate::real::Real;

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_ratio(q: &Rational) -> Self;

    fn abs(&self) -> Self;

    /// `min(self, other)`, enclosed when inexact.
    fn min_with(&self, other: &Self) -> Self;

    /// Decisive comparison with a rational; `None` when the enclosure straddles `q`.
    fn cmp_ratio(&self, q: &Rational) -> Option<Ordering>;

    /// Decisive `self <= other`.
    fn certainly_le(&self, other: &Self) -> Option<bool>;

    /// `floor` when it is the same for every member of the enclosure.
    fn floor_exact(&self) -> Option<i64>;

    /// An integer near the value; subtracting it is always valid.
    fn nearest_integer(&self) -> i64;

    /// Certified f64 enclosure.
    fn enclose(&self) -> Interval<f64>;

    /// Applies a monotone map known pointwise: exact types call `f` directly,
    /// intervals evaluate `f` at both endpoints and take the hull.
    fn map_monotone<E>(&self, f: impl Fn(&Self) -> Result<Self, E>) -> Result<Self, E>;

    /// Image under `f(x, param)` evaluated in floating point (see
    /// [`Interval::monotone_image`]). Exact types return `None`.
    fn transcendental(&self, param: Interval<f64>, f: impl Fn(f64, f64) -> f64, widen: Widen)
        -> Option<Self>;

    /// Intersects with `[0, 1]`. Exact values outside return `None`.
    fn clamp_unit(&self) -> Option<Self>;

    /// Smallest enclosure of both values; exact values must be equal.
    fn hull(&self, other: &Self) -> Self;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(q: &Rational) -> Self {
        q.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn min_with(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn cmp_ratio(&self, q: &Rational) -> Option<Ordering> {
        Some(self.cmp(q))
    }

    fn certainly_le(&self, other: &Self) -> Option<bool> {
        Some(self <= other)
    }

    fn floor_exact(&self) -> Option<i64> {
        self.floor().to_integer().to_i64()
    }

    fn nearest_integer(&self) -> i64 {
        self.round().to_integer().to_i64().unwrap_or(0)
    }

    fn enclose(&self) -> Interval<f64> {
        Interval::from_ratio(self)
    }

    fn map_monotone<E>(&self, f: impl Fn(&Self) -> Result<Self, E>) -> Result<Self, E> {
        f(self)
    }

    fn transcendental(&self, _: Interval<f64>, _: impl Fn(f64, f64) -> f64, _: Widen) -> Option<Self> {
        None
    }

    fn clamp_unit(&self) -> Option<Self> {
        (!self.is_negative() && *self <= Rational::one()).then(|| self.clone())
    }

    fn hull(&self, other: &Self) -> Self {
        debug_assert_eq!(self, other);
        self.clone()
    }
}

impl<F: Real> Scalar for Interval<F> {
    const EXACT: bool = false;

    fn from_ratio(q: &Rational) -> Self {
        Interval::from_ratio(q)
    }

    fn abs(&self) -> Self {
        Interval::abs(self)
    }

    fn min_with(&self, other: &Self) -> Self {
        self.min(other)
    }

    fn cmp_ratio(&self, q: &Rational) -> Option<Ordering> {
        let lo = cmp_f64_ratio(self.lo().to_f64_exact(), q);
        let hi = cmp_f64_ratio(self.hi().to_f64_exact(), q);
        if lo == hi {
            Some(lo)
        } else if lo == Ordering::Greater {
            Some(Ordering::Greater)
        } else if hi == Ordering::Less {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    fn certainly_le(&self, other: &Self) -> Option<bool> {
        Interval::certainly_le(self, other)
    }

    fn floor_exact(&self) -> Option<i64> {
        let lo = self.lo().floor();
        let hi = self.hi().floor();
        (lo == hi).then(|| lo.to_i64()).flatten()
    }

    fn nearest_integer(&self) -> i64 {
        self.mid().round().to_i64().unwrap_or(0)
    }

    fn enclose(&self) -> Interval<f64> {
        self.to_f64()
    }

    fn map_monotone<E>(&self, f: impl Fn(&Self) -> Result<Self, E>) -> Result<Self, E> {
        if self.is_point() {
            return f(self);
        }
        let a = f(&Interval::point(self.lo()))?;
        let b = f(&Interval::point(self.hi()))?;
        Ok(a.hull(&b))
    }

    fn transcendental(
        &self,
        param: Interval<f64>,
        f: impl Fn(f64, f64) -> f64,
        widen: Widen,
    ) -> Option<Self> {
        Some(self.monotone_image(param, f, widen))
    }

    fn clamp_unit(&self) -> Option<Self> {
        self.intersect(&Interval::unit())
    }

    fn hull(&self, other: &Self) -> Self {
        Interval::hull(self, other)
    }
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a plain decimal such as `1.2` or `-0.05` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num::pow(BigInt::from(10), frac_part.len());
    let q = Rational::new(numer, denom);
    Some(if neg { -q } else { q })
}
