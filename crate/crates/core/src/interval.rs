//! Closed intervals with outward-rounded arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigRational, ToPrimitive};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::real::{add_down, add_up, div_down, div_up, mul_down, mul_up, Real};

/// A closed interval `[lo, hi]` certified to contain some real quantity.
///
/// Every arithmetic result is rounded outward, so if the operands enclose
/// `x` and `y` then the result encloses `x op y`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Interval<F: Real> {
    lo: F,
    hi: F,
}

/// Widening applied to values computed by libm, whose results are not
/// correctly rounded. The bound assumes a few ulps of error per call.
#[derive(Clone, Copy, Debug)]
pub struct Widen {
    pub rel_ulps: u32,
    pub abs: f64,
}

impl Widen {
    pub const LIBM: Widen = Widen { rel_ulps: 4, abs: 0.0 };
}

impl<F: Real> Interval<F> {
    pub fn new(lo: F, hi: F) -> Self {
        assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: F) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn entire() -> Self {
        Interval { lo: F::neg_infinity(), hi: F::infinity() }
    }

    pub fn unit() -> Self {
        Interval { lo: F::zero(), hi: F::one() }
    }

    pub fn lo(&self) -> F {
        self.lo
    }

    pub fn hi(&self) -> F {
        self.hi
    }

    pub fn mid(&self) -> F {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return if self.lo.is_infinite() { self.hi } else { self.lo };
        }
        self.lo + (self.hi - self.lo) / (F::one() + F::one())
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> F {
        add_up(self.hi, -self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(F::zero())
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn abs(&self) -> Self {
        if self.lo >= F::zero() {
            *self
        } else if self.hi <= F::zero() {
            -*self
        } else {
            Interval { lo: F::zero(), hi: (-self.lo).max(self.hi) }
        }
    }

    /// Enclosure of `min(x, y)` over the two boxes.
    pub fn min(&self, other: &Self) -> Self {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(&self, other: &Self) -> Self {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Decisive `self <= other`: `Some` only when every pair of members agrees.
    pub fn certainly_le(&self, other: &Self) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Interval { lo: F::from_f64_down(x), hi: F::from_f64_up(x) }
    }

    pub fn from_f64_bounds(lo: f64, hi: f64) -> Self {
        Interval { lo: F::from_f64_down(lo), hi: F::from_f64_up(hi) }
    }

    pub fn to_f64(&self) -> Interval<f64> {
        Interval { lo: self.lo.to_f64_exact(), hi: self.hi.to_f64_exact() }
    }

    /// Tightest f64 enclosure of a rational, then rounded outward into `F`.
    pub fn from_ratio(q: &BigRational) -> Self {
        let (lo, hi) = ratio_bounds(q);
        Self::from_f64_bounds(lo, hi)
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(n.into()))
    }

    /// Image of a function `f(x, param)` that is monotone in `x` (fixed
    /// direction) and monotone in `param` for each fixed `x`. The function is
    /// evaluated in f64 at the four corners and widened by `widen`.
    pub fn monotone_image(
        &self,
        param: Interval<f64>,
        f: impl Fn(f64, f64) -> f64,
        widen: Widen,
    ) -> Self {
        let xs = [self.lo.to_f64_exact(), self.hi.to_f64_exact()];
        let ps = [param.lo, param.hi];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &xs {
            for &p in &ps {
                let v = f(x, p);
                if v.is_nan() {
                    return Self::entire();
                }
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let (lo, hi) = widen_f64(lo, hi, widen);
        Self::from_f64_bounds(lo, hi)
    }

    pub fn exp(&self) -> Self {
        let r = self.monotone_image(Interval::point(0.0), |x, _| x.exp(), Widen::LIBM);
        Interval { lo: r.lo.max(F::zero()), hi: r.hi }
    }

    pub fn ln(&self) -> Self {
        if self.hi <= F::zero() {
            return Self::entire();
        }
        let lo_arg = if self.lo > F::zero() { self.lo } else { F::zero() };
        Interval { lo: lo_arg, hi: self.hi }.monotone_image(
            Interval::point(0.0),
            |x, _| x.ln(),
            Widen::LIBM,
        )
    }

    /// Integer power by repeated outward multiplication.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }
}

fn widen_f64(lo: f64, hi: f64, w: Widen) -> (f64, f64) {
    let k = w.rel_ulps as f64 * f64::EPSILON;
    let lo = add_down(lo, -add_up(mul_up(lo.abs(), k), w.abs)).next_down();
    let hi = add_up(hi, add_up(mul_up(hi.abs(), k), w.abs)).next_up();
    (lo, hi)
}

/// Tightest f64 bounds of a rational: `lo <= q <= hi`, equal when exact.
pub(crate) fn ratio_bounds(q: &BigRational) -> (f64, f64) {
    let x = q.to_f64().unwrap_or(f64::NAN);
    if x.is_nan() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    if x.is_infinite() {
        return if x > 0.0 { (f64::MAX, f64::INFINITY) } else { (f64::NEG_INFINITY, f64::MIN) };
    }
    let mut lo = x;
    let mut hi = x;
    while cmp_f64_ratio(lo, q) == Ordering::Greater {
        lo = lo.next_down();
    }
    while cmp_f64_ratio(hi, q) == Ordering::Less {
        hi = hi.next_up();
    }
    (lo, hi)
}

/// Exact comparison of a finite float with a rational.
pub(crate) fn cmp_f64_ratio(x: f64, q: &BigRational) -> Ordering {
    if x.is_infinite() {
        return if x > 0.0 { Ordering::Greater } else { Ordering::Less };
    }
    let xr = BigRational::from_float(x).expect("finite float");
    xr.cmp(q)
}

impl<F: Real> fmt::Display for Interval<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl<F: Real> Serialize for Interval<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &self.lo.to_f64_exact())?;
        st.serialize_field("hi", &self.hi.to_f64_exact())?;
        st.end()
    }
}

impl<F: Real> Zero for Interval<F> {
    fn zero() -> Self {
        Interval::point(F::zero())
    }

    fn is_zero(&self) -> bool {
        self.lo == F::zero() && self.hi == F::zero()
    }
}

impl<F: Real> One for Interval<F> {
    fn one() -> Self {
        Interval::point(F::one())
    }
}

impl<F: Real> Neg for Interval<F> {
    type Output = Self;

    fn neg(self) -> Self {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl<F: Real> Add for Interval<F> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Interval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl<F: Real> Sub for Interval<F> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Interval { lo: add_down(self.lo, -rhs.hi), hi: add_up(self.hi, -rhs.lo) }
    }
}

impl<F: Real> Mul for Interval<F> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let zero = F::zero();
        // Fast path for the nonnegative case that dominates metric sums.
        if a >= zero && c >= zero {
            return Interval { lo: mul_down(a, c), hi: mul_up(b, d) };
        }
        let lo = mul_down(a, c).min(mul_down(a, d)).min(mul_down(b, c)).min(mul_down(b, d));
        let hi = mul_up(a, c).max(mul_up(a, d)).max(mul_up(b, c)).max(mul_up(b, d));
        Interval { lo, hi }
    }
}

impl<F: Real> Div for Interval<F> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        if rhs.contains_zero() {
            return Self::entire();
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = div_down(a, c).min(div_down(a, d)).min(div_down(b, c)).min(div_down(b, d));
        let hi = div_up(a, c).max(div_up(a, d)).max(div_up(b, c)).max(div_up(b, d));
        Interval { lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    type I = Interval<f64>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_operations_stay_points() {
        let a = I::point(0.5);
        let b = I::point(0.25);
        assert!((a + b).is_point());
        assert!((a * b).is_point());
        assert!((a / b).is_point());
        assert!((a - a).is_zero());
    }

    #[test]
    fn third_is_enclosed() {
        let third = I::from_ratio(&q(1, 3));
        assert!(third.lo() < third.hi());
        assert_eq!(cmp_f64_ratio(third.lo(), &q(1, 3)), Ordering::Less);
        assert_eq!(cmp_f64_ratio(third.hi(), &q(1, 3)), Ordering::Greater);
        let one = third * I::from_i64(3);
        assert!(one.contains(1.0));
    }

    #[test]
    fn exp_ln_enclose() {
        let ln3 = I::from_i64(3).ln();
        assert!(ln3.contains(3f64.ln()));
        assert!(ln3.width() < 1e-14);
        let e = I::one().exp();
        assert!(e.contains(std::f64::consts::E));
    }

    #[test]
    fn division_by_zero_interval_is_entire() {
        let r = I::one() / I::new(-1.0, 1.0);
        assert_eq!(r.lo(), f64::NEG_INFINITY);
        assert_eq!(r.hi(), f64::INFINITY);
    }

    #[test]
    fn abs_straddling_zero() {
        let a = I::new(-0.5, 0.25).abs();
        assert_eq!(a, I::new(0.0, 0.5));
    }

    #[test]
    fn f32_intervals_enclose_f64_results() {
        let x = Interval::<f32>::from_ratio(&q(1, 10));
        let y = x * x;
        assert!(y.to_f64().contains(0.010000000000000002) || y.to_f64().contains(0.01));
        assert!(y.to_f64().lo() <= 0.01 && 0.01 <= y.to_f64().hi());
    }
}
