pub mod action;
pub mod conjugacy;
pub mod demo;
pub mod error;
pub mod freegroup;
pub mod interval;
pub mod lcgroup;
mod real;
pub mod scalar;
pub mod smoothing;
pub mod verify;

pub use error::{Error, Result};
pub use interval::{Interval, Widen};
pub use real::Real;
pub use scalar::{parse_decimal, ratio, Rational, Scalar};

/// Exact rational scalars.
pub type Exact = Rational;
/// Certified double-precision enclosures.
pub type Interval64 = Interval<f64>;
/// Certified single-precision enclosures.
pub type Interval32 = Interval<f32>;

/// Library version embedded in every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
