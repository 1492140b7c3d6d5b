//! Floating-point carriers for interval endpoints.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// An IEEE binary floating-point type usable as an interval endpoint: f32 or f64.
///
/// Directed rounding is emulated with error-free transformations (TwoSum, FMA
/// residuals) plus single-ulp steps, so no rounding-mode control is needed.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest representable value strictly greater than `self`.
    fn step_up(self) -> Self;
    /// Largest representable value strictly less than `self`.
    fn step_down(self) -> Self;
    /// Exact widening conversion.
    fn to_f64_exact(self) -> f64;
    /// Largest value of `Self` that is `<= x`.
    fn from_f64_down(x: f64) -> Self;
    /// Smallest value of `Self` that is `>= x`.
    fn from_f64_up(x: f64) -> Self;
}

impl Real for f64 {
    fn step_up(self) -> Self {
        self.next_up()
    }

    fn step_down(self) -> Self {
        self.next_down()
    }

    fn to_f64_exact(self) -> f64 {
        self
    }

    fn from_f64_down(x: f64) -> Self {
        x
    }

    fn from_f64_up(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn step_up(self) -> Self {
        self.next_up()
    }

    fn step_down(self) -> Self {
        self.next_down()
    }

    fn to_f64_exact(self) -> f64 {
        self as f64
    }

    fn from_f64_down(x: f64) -> Self {
        let y = x as f32;
        if (y as f64) > x {
            y.next_down()
        } else {
            y
        }
    }

    fn from_f64_up(x: f64) -> Self {
        let y = x as f32;
        if (y as f64) < x {
            y.next_up()
        } else {
            y
        }
    }
}

/// Rounding error of `a + b`: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
pub(crate) fn two_sum<F: Real>(a: F, b: F) -> (F, F) {
    let s = a + b;
    if !s.is_finite() {
        return (s, F::zero());
    }
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

pub(crate) fn add_down<F: Real>(a: F, b: F) -> F {
    let (s, e) = two_sum(a, b);
    if e < F::zero() {
        s.step_down()
    } else {
        s
    }
}

pub(crate) fn add_up<F: Real>(a: F, b: F) -> F {
    let (s, e) = two_sum(a, b);
    if e > F::zero() {
        s.step_up()
    } else {
        s
    }
}

// Below this magnitude FMA residuals may underflow and lose their sign.
fn near_underflow<F: Real>(x: F) -> bool {
    x.abs() < F::min_positive_value() / F::epsilon()
}

pub(crate) fn mul_down<F: Real>(a: F, b: F) -> F {
    let p = a * b;
    if !p.is_finite() || a == F::zero() || b == F::zero() {
        return p;
    }
    if near_underflow(p) {
        return p.step_down();
    }
    // residual a*b - p, exact for normal operands
    let e = a.mul_add(b, -p);
    if e < F::zero() {
        p.step_down()
    } else {
        p
    }
}

pub(crate) fn mul_up<F: Real>(a: F, b: F) -> F {
    let p = a * b;
    if !p.is_finite() || a == F::zero() || b == F::zero() {
        return p;
    }
    if near_underflow(p) {
        return p.step_up();
    }
    let e = a.mul_add(b, -p);
    if e > F::zero() {
        p.step_up()
    } else {
        p
    }
}

pub(crate) fn div_down<F: Real>(a: F, b: F) -> F {
    let q = a / b;
    if !q.is_finite() || a == F::zero() {
        return q;
    }
    if near_underflow(q) || near_underflow(a) {
        return q.step_down();
    }
    // a - q*b has the sign of (a/b - q) * b
    let r = (-q).mul_add(b, a);
    let below = if b > F::zero() { r < F::zero() } else { r > F::zero() };
    if below {
        q.step_down()
    } else {
        q
    }
}

pub(crate) fn div_up<F: Real>(a: F, b: F) -> F {
    let q = a / b;
    if !q.is_finite() || a == F::zero() {
        return q;
    }
    if near_underflow(q) || near_underflow(a) {
        return q.step_up();
    }
    let r = (-q).mul_add(b, a);
    let above = if b > F::zero() { r > F::zero() } else { r < F::zero() };
    if above {
        q.step_up()
    } else {
        q
    }
}
