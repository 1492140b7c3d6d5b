use num_traits::One;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::parse_decimal;

pub const DEFAULT_S: &str = "1.2";

type I = Interval<f64>;

/// The weight exponent `s`, held as a certified enclosure together with the
/// text it was given as.
#[derive(Clone, Debug)]
pub struct WeightParams {
    s: I,
    label: String,
}

impl WeightParams {
    /// Parses a plain decimal such as `"1.2"`.
    pub fn from_decimal(text: &str) -> Result<Self> {
        let q = parse_decimal(text)
            .ok_or_else(|| crate::error::invalid("s", format!("{text:?} is not a plain decimal")))?;
        Self::from_enclosure(Interval::from_ratio(&q), text.trim().to_string())
    }

    /// `s = ln n`.
    pub fn ln_of(n: u32) -> Result<Self> {
        Self::from_enclosure(Interval::from_f64(n as f64).ln(), format!("ln {n}"))
    }

    /// Accepts `s` only if its whole enclosure lies strictly above `ln 3`.
    pub fn from_enclosure(s: I, label: String) -> Result<Self> {
        let ln3 = Interval::<f64>::from_f64(3.0).ln();
        if s.lo() > ln3.hi() {
            Ok(WeightParams { s, label })
        } else {
            Err(Error::WeightBelowThreshold(label))
        }
    }

    pub fn s(&self) -> I {
        self.s
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `e^{-s n}`.
    pub fn weight(&self, n: u32) -> I {
        if n == 0 {
            return I::one();
        }
        (-(self.s * Interval::from_f64(n as f64))).exp()
    }

    /// `e^{s n}`.
    pub fn growth(&self, n: u32) -> I {
        if n == 0 {
            return I::one();
        }
        (self.s * Interval::from_f64(n as f64)).exp()
    }

    /// `e^{-s n}` for `n = 0..=radius`.
    pub fn weights_up_to(&self, radius: u32) -> Vec<I> {
        (0..=radius).map(|n| self.weight(n)).collect()
    }

    fn ratio(&self) -> I {
        Interval::from_f64(3.0) * self.weight(1)
    }
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams::from_decimal(DEFAULT_S).expect("default s exceeds ln 3")
    }
}

/// `#{g ∈ F₂ : ‖g‖ = r}`, saturating at `u128::MAX`.
pub fn sphere_count_f2(r: u32) -> u128 {
    if r == 0 {
        return 1;
    }
    3u128.checked_pow(r - 1).and_then(|p| p.checked_mul(4)).unwrap_or(u128::MAX)
}

/// `1 + 4e^{-s}/(1 - 3e^{-s})`, the full F₂ weight sum.
pub fn weight_total(p: &WeightParams) -> I {
    let e = p.weight(1);
    I::one() + Interval::from_f64(4.0) * e / (I::one() - p.ratio())
}

/// `diam · (4/3)(3e^{-s})^{R+1} / (1 - 3e^{-s})`, bounding all terms with `‖g‖ > R`.
pub fn weight_tail(p: &WeightParams, radius: u32, diam: f64) -> I {
    let q = p.ratio();
    Interval::from_f64(diam) * Interval::from_f64(4.0) / Interval::from_f64(3.0) * q.powi(radius + 1)
        / (I::one() - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_is_strict() {
        assert!(WeightParams::from_decimal("1.0986").is_err());
        assert!(WeightParams::from_decimal("1.1").is_ok());
        assert!(WeightParams::ln_of(3).is_err());
        assert!(WeightParams::ln_of(4).is_ok());
        assert!(WeightParams::from_decimal("abc").is_err());
    }

    #[test]
    fn closed_forms_at_ln4() {
        let p = WeightParams::ln_of(4).unwrap();
        assert!(weight_total(&p).contains(5.0));
        assert!(weight_total(&p).width() < 1e-12);
        assert!(weight_tail(&p, 0, 1.0).contains(4.0));
        assert!(weight_tail(&p, 1, 1.0).contains(3.0));
    }

    #[test]
    fn tail_decreases() {
        let p = WeightParams::default();
        let tails: Vec<f64> = (0..20).map(|r| weight_tail(&p, r, 1.0).hi()).collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sphere_counts() {
        assert_eq!(sphere_count_f2(0), 1);
        assert_eq!(sphere_count_f2(1), 4);
        assert_eq!(sphere_count_f2(2), 12);
        assert_eq!(sphere_count_f2(500), u128::MAX);
    }
}
