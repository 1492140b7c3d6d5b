//! Generator homeomorphisms of `[0, 1]` and of the circle `ℝ/ℤ`, and the
//! action of F_∞ they generate.
//!
//! Circle points are carried as lifts to `ℝ`: every circle map is evaluated
//! through its lift `F` with `F(x + 1) = F(x) ± 1`, so compositions never
//! need a reduction mod 1. Distances reduce to `ℤ` at the end.

use std::f64::consts::PI;

use num::{BigInt, Signed, ToPrimitive, Zero};
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::freegroup::InfWord;
use crate::interval::{Interval, Widen};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Interval,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenMap {
    /// Piecewise linear through `(x, y)` breakpoints, from `(0, 0)` to
    /// `(1, 1)` or, reversing orientation, from `(0, 1)` to `(1, 0)`.
    Pl {
        #[serde(with = "breakpoints_serde")]
        breakpoints: Vec<(Rational, Rational)>,
    },
    /// `p ↦ p^α`.
    Power {
        #[serde(with = "rational_serde")]
        alpha: Rational,
    },
    /// `p ↦ λp / (1 + (λ - 1)p)`.
    Mobius {
        #[serde(with = "rational_serde")]
        lambda: Rational,
    },
    /// `p ↦ p + θ mod 1`.
    Rotation {
        #[serde(with = "rational_serde")]
        theta: Rational,
    },
    /// Time-`t` map of the hyperbolic flow on `ℝP¹`, fixing `0` and `1/2`.
    CircleMobius {
        #[serde(with = "rational_serde")]
        t: Rational,
    },
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl GenMap {
    pub fn identity() -> Self {
        GenMap::Pl { breakpoints: vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))] }
    }

    pub fn pl(points: &[(i64, i64, i64, i64)]) -> Result<Self> {
        let breakpoints = points.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect();
        let g = GenMap::Pl { breakpoints };
        g.validate(Space::Interval)?;
        Ok(g)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GenMap::Pl { .. } => "pl",
            GenMap::Power { .. } => "power",
            GenMap::Mobius { .. } => "mobius",
            GenMap::Rotation { .. } => "rotation",
            GenMap::CircleMobius { .. } => "circle_mobius",
        }
    }

    pub fn acts_on(&self, space: Space) -> bool {
        match self {
            GenMap::Pl { .. } => true,
            GenMap::Power { .. } | GenMap::Mobius { .. } => space == Space::Interval,
            GenMap::Rotation { .. } | GenMap::CircleMobius { .. } => space == Space::Circle,
        }
    }

    pub fn reverses_orientation(&self) -> bool {
        match self {
            GenMap::Pl { breakpoints } => breakpoints[0].1 > breakpoints[breakpoints.len() - 1].1,
            _ => false,
        }
    }

    /// Whether both the map and its inverse send rationals to rationals.
    pub fn is_exact(&self) -> bool {
        match self {
            GenMap::Pl { .. } | GenMap::Mobius { .. } | GenMap::Rotation { .. } => true,
            GenMap::Power { alpha } => alpha.is_one(),
            GenMap::CircleMobius { t } => t.is_zero(),
        }
    }

    pub fn validate(&self, space: Space) -> Result<()> {
        if !self.acts_on(space) {
            return Err(Error::Unsupported(format!(
                "{} maps do not act on the {}",
                self.name(),
                if space == Space::Interval { "interval" } else { "circle" }
            )));
        }
        match self {
            GenMap::Pl { breakpoints } => {
                let n = breakpoints.len();
                if n < 2 {
                    return Err(invalid("breakpoints", "need at least two points"));
                }
                let zero = Rational::zero();
                let one = Rational::one();
                let (first, last) = (&breakpoints[0], &breakpoints[n - 1]);
                let increasing = first.1 == zero && last.1 == one;
                let decreasing = first.1 == one && last.1 == zero;
                if first.0 != zero || last.0 != one || !(increasing || decreasing) {
                    return Err(invalid(
                        "breakpoints",
                        "must run from (0,0) to (1,1) or from (0,1) to (1,0)",
                    ));
                }
                for pair in breakpoints.windows(2) {
                    let x_ok = pair[0].0 < pair[1].0;
                    let y_ok = if increasing { pair[0].1 < pair[1].1 } else { pair[0].1 > pair[1].1 };
                    if !x_ok || !y_ok {
                        return Err(invalid("breakpoints", "must be strictly monotone"));
                    }
                }
                Ok(())
            }
            GenMap::Power { alpha } if !alpha.is_positive() => Err(invalid("alpha", "must be positive")),
            GenMap::Mobius { lambda } if !lambda.is_positive() => {
                Err(invalid("lambda", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> GenMap {
        match self {
            GenMap::Pl { breakpoints } => {
                let mut swapped: Vec<_> = breakpoints.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
                swapped.sort_by(|a, b| a.0.cmp(&b.0));
                GenMap::Pl { breakpoints: swapped }
            }
            GenMap::Power { alpha } => GenMap::Power { alpha: alpha.recip() },
            GenMap::Mobius { lambda } => GenMap::Mobius { lambda: lambda.recip() },
            GenMap::Rotation { theta } => GenMap::Rotation { theta: -theta },
            GenMap::CircleMobius { t } => GenMap::CircleMobius { t: -t },
        }
    }

    pub fn eval<S: Scalar>(&self, space: Space, p: &S) -> Result<S> {
        Prepared::new(self).apply(space, p)
    }

    pub fn eval_inverse<S: Scalar>(&self, space: Space, p: &S) -> Result<S> {
        Prepared::new(&self.inverse()).apply(space, p)
    }

    /// Applies `self^sign`.
    pub fn eval_signed<S: Scalar>(&self, space: Space, sign: i32, p: &S) -> Result<S> {
        if sign > 0 {
            self.eval(space, p)
        } else {
            self.eval_inverse(space, p)
        }
    }
}

/// A generator map with its parameters already converted to `S`.
#[derive(Clone, Debug)]
pub struct Prepared<S> {
    kind: Kind<S>,
}

#[derive(Clone, Debug)]
enum Kind<S> {
    Pl { xs: Vec<S>, ys: Vec<S>, slopes: Vec<S>, reversed: bool },
    IntPower(u32),
    Power(Interval<f64>),
    Mobius { lambda: S, lambda_minus_one: S },
    Rotation(S),
    CircleMobius { lambda: Interval<f64>, widen: Widen },
}

impl<S: Scalar> Prepared<S> {
    pub fn new(g: &GenMap) -> Self {
        let kind = match g {
            GenMap::Pl { breakpoints } => {
                let slopes = breakpoints
                    .windows(2)
                    .map(|w| S::from_ratio(&((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))))
                    .collect();
                Kind::Pl {
                    xs: breakpoints.iter().map(|b| S::from_ratio(&b.0)).collect(),
                    ys: breakpoints.iter().map(|b| S::from_ratio(&b.1)).collect(),
                    slopes,
                    reversed: g.reverses_orientation(),
                }
            }
            GenMap::Power { alpha } => match alpha.to_integer().to_u32() {
                Some(n) if alpha.is_integer() => Kind::IntPower(n),
                _ => Kind::Power(Interval::from_ratio(alpha)),
            },
            GenMap::Mobius { lambda } => Kind::Mobius {
                lambda: S::from_ratio(lambda),
                lambda_minus_one: S::from_ratio(&(lambda - Rational::one())),
            },
            GenMap::Rotation { theta } => Kind::Rotation(S::from_ratio(theta)),
            GenMap::CircleMobius { t } if t.is_zero() => Kind::Rotation(S::zero()),
            GenMap::CircleMobius { t } => {
                let lambda = Interval::<f64>::from_ratio(t).exp();
                let stretch = lambda.hi().max(1.0 / lambda.lo());
                Kind::CircleMobius {
                    lambda,
                    widen: Widen { rel_ulps: 4, abs: 16.0 * f64::EPSILON * stretch },
                }
            }
        };
        Prepared { kind }
    }

    pub fn apply(&self, space: Space, p: &S) -> Result<S> {
        match space {
            Space::Interval => {
                let p = p.clamp_unit().ok_or_else(|| Error::OutOfDomain(format!("{p:?}")))?;
                let y = self.apply_unit(&p)?;
                Ok(y.clamp_unit().unwrap_or(y))
            }
            Space::Circle => self.apply_lift(p),
        }
    }

    // `p` already lies in [0, 1].
    fn apply_unit(&self, p: &S) -> Result<S> {
        match &self.kind {
            Kind::Pl { xs, ys, slopes, .. } => p.map_monotone(|x| Ok(pl_at(xs, ys, slopes, x))),
            Kind::IntPower(n) => p.map_monotone(|x| Ok(pow_n(x, *n))),
            Kind::Power(a) => p
                .transcendental(*a, |x, a| x.max(0.0).powf(a), Widen::LIBM)
                .ok_or(Error::Inexact("a non-integer power")),
            Kind::Mobius { lambda, lambda_minus_one } => p.map_monotone(|x| {
                Ok(lambda.clone() * x.clone() / (S::one() + lambda_minus_one.clone() * x.clone()))
            }),
            Kind::Rotation(_) | Kind::CircleMobius { .. } => unreachable!("circle map"),
        }
    }

    fn apply_lift(&self, p: &S) -> Result<S> {
        match &self.kind {
            Kind::Rotation(theta) => Ok(p.clone() + theta.clone()),
            Kind::Pl { xs, ys, slopes, reversed } => p.map_monotone(|x| {
                let n = x.floor_exact().expect("a single value has a floor");
                let k = S::from_ratio(&Rational::from_integer(n.into()));
                let y = pl_at(xs, ys, slopes, &(x.clone() - k.clone()));
                Ok(if *reversed { y - k } else { y + k })
            }),
            Kind::CircleMobius { lambda, widen } => p
                .transcendental(*lambda, circle_mobius_lift, *widen)
                .ok_or(Error::Inexact("a circle Möbius map")),
            Kind::IntPower(_) | Kind::Power(_) | Kind::Mobius { .. } => unreachable!("interval map"),
        }
    }
}

pub(crate) fn circle_mobius_lift(x: f64, lambda: f64) -> f64 {
    let n = x.floor();
    let phi = PI * ((x - n) - 0.5);
    n + 0.5 + (lambda * phi.sin()).atan2(phi.cos()) / PI
}

fn pow_n<S: Scalar>(x: &S, n: u32) -> S {
    let mut acc = S::one();
    for _ in 0..n {
        acc = acc * x.clone();
    }
    acc
}

// Interpolates on every segment that may contain `x`; when `x` sits on a
// breakpoint the candidates agree there and their hull is returned.
fn pl_at<S: Scalar>(xs: &[S], ys: &[S], slopes: &[S], x: &S) -> S {
    let mut out: Option<S> = None;
    for k in 0..slopes.len() {
        let before = xs[k].certainly_le(x) == Some(false);
        let after = x.certainly_le(&xs[k + 1]) == Some(false);
        if before || after {
            continue;
        }
        let y = if x.certainly_le(&xs[k]) == Some(true) {
            ys[k].clone()
        } else if xs[k + 1].certainly_le(x) == Some(true) {
            ys[k + 1].clone()
        } else {
            ys[k].clone() + (x.clone() - xs[k].clone()) * slopes[k].clone()
        };
        out = Some(match out {
            Some(prev) => prev.hull(&y),
            None => y,
        });
    }
    out.expect("x lies in [0, 1]")
}

/// A space together with maps for the generators `x₀ … x_{m-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub space: Space,
    pub generators: Vec<GenMap>,
}

impl ActionSpec {
    pub fn new(space: Space, generators: Vec<GenMap>) -> Result<Self> {
        let a = ActionSpec { space, generators };
        a.validate()?;
        Ok(a)
    }

    /// `m` copies of the identity map.
    pub fn trivial(space: Space, m: usize) -> Self {
        ActionSpec { space, generators: vec![GenMap::identity(); m] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(invalid("generators", "at least one generator is required"));
        }
        self.generators.iter().try_for_each(|g| g.validate(self.space))
    }

    pub fn rank(&self) -> u32 {
        self.generators.len() as u32
    }

    pub fn is_exact(&self) -> bool {
        self.generators.iter().all(GenMap::is_exact)
    }

    /// Per-generator orientation: `true` when the map reverses orientation.
    pub fn orientation_flags(&self) -> Vec<bool> {
        self.generators.iter().map(GenMap::reverses_orientation).collect()
    }

    pub fn preserves_orientation(&self) -> bool {
        !self.generators.iter().any(GenMap::reverses_orientation)
    }

    /// Converts every generator and its inverse to `S` once.
    pub fn prepare<S: Scalar>(&self) -> PreparedAction<S> {
        PreparedAction {
            space: self.space,
            maps: self
                .generators
                .iter()
                .map(|g| (Prepared::new(g), Prepared::new(&g.inverse())))
                .collect(),
        }
    }

    /// `ρ(w)(p)`, applying the rightmost letter first.
    pub fn eval_word<S: Scalar>(&self, w: &InfWord, p: &S) -> Result<S> {
        self.prepare().eval_word(w, p)
    }

    /// `ρ(w)⁻¹(p)`.
    pub fn eval_word_inverse<S: Scalar>(&self, w: &InfWord, p: &S) -> Result<S> {
        self.prepare().eval_word_inverse(w, p)
    }

    /// Checks that a point lies in the space; circle points may be any lift.
    pub fn check_point(&self, p: &Rational) -> Result<()> {
        if self.space == Space::Interval && (p.is_negative() || *p > Rational::one()) {
            return Err(Error::OutOfDomain(p.to_string()));
        }
        Ok(())
    }
}

/// An action with all generator maps converted to `S`.
#[derive(Clone, Debug)]
pub struct PreparedAction<S> {
    space: Space,
    maps: Vec<(Prepared<S>, Prepared<S>)>,
}

impl<S: Scalar> PreparedAction<S> {
    pub fn space(&self) -> Space {
        self.space
    }

    /// `xᵢ^sign` applied to `p`.
    pub fn apply_letter(&self, index: u32, sign: i32, p: &S) -> Result<S> {
        let (fwd, inv) = self.maps.get(index as usize).ok_or(Error::UnassignedGenerator(index))?;
        if sign > 0 {
            fwd.apply(self.space, p)
        } else {
            inv.apply(self.space, p)
        }
    }

    pub fn eval_word(&self, w: &InfWord, p: &S) -> Result<S> {
        let letters: Vec<(u32, i32)> = w.letters().collect();
        let mut x = p.clone();
        for &(i, sign) in letters.iter().rev() {
            x = self.apply_letter(i, sign, &x)?;
        }
        Ok(x)
    }

    pub fn eval_word_inverse(&self, w: &InfWord, p: &S) -> Result<S> {
        let mut x = p.clone();
        for (i, sign) in w.letters() {
            x = self.apply_letter(i, -sign, &x)?;
        }
        Ok(x)
    }
}

/// `|p - q|` on the interval, arc distance `min(|d|, 1 - |d|)` with `d` reduced mod 1 on the circle.
pub fn base_metric<S: Scalar>(space: Space, p: &S, q: &S) -> S {
    let d = p.clone() - q.clone();
    match space {
        Space::Interval => d.abs(),
        Space::Circle => {
            let n = d.nearest_integer();
            let r = (d - S::from_ratio(&Rational::from_integer(n.into()))).abs();
            let other = S::one() - r.clone();
            r.min_with(&other)
        }
    }
}

pub(crate) mod rational_serde {
    use super::*;

    pub fn to_pair(q: &Rational) -> Option<[i64; 2]> {
        Some([q.numer().to_i64()?, q.denom().to_i64()?])
    }

    pub fn from_pair(p: [i64; 2]) -> std::result::Result<Rational, String> {
        if p[1] == 0 {
            return Err(format!("zero denominator in [{}, {}]", p[0], p[1]));
        }
        Ok(rat(p[0], p[1]))
    }

    pub fn serialize<Z: Serializer>(q: &Rational, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        to_pair(q)
            .ok_or_else(|| serde::ser::Error::custom("rational does not fit in i64"))?
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        from_pair(<[i64; 2]>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

mod breakpoints_serde {
    use super::*;

    pub fn serialize<Z: Serializer>(
        points: &[(Rational, Rational)],
        s: Z,
    ) -> std::result::Result<Z::Ok, Z::Error> {
        let pairs: Option<Vec<[[i64; 2]; 2]>> = points
            .iter()
            .map(|(x, y)| Some([rational_serde::to_pair(x)?, rational_serde::to_pair(y)?]))
            .collect();
        pairs.ok_or_else(|| serde::ser::Error::custom("rational does not fit in i64"))?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<(Rational, Rational)>, D::Error> {
        let raw = Vec::<[[i64; 2]; 2]>::deserialize(d)?;
        raw.into_iter()
            .map(|[x, y]| Ok((rational_serde::from_pair(x)?, rational_serde::from_pair(y)?)))
            .collect::<std::result::Result<_, String>>()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type I = Interval<f64>;

    #[test]
    fn mobius_exact_values() {
        let m = GenMap::Mobius { lambda: rat(3, 1) };
        assert_eq!(m.eval(Space::Interval, &rat(1, 2)).unwrap(), rat(3, 4));
        assert_eq!(m.eval_inverse(Space::Interval, &rat(3, 4)).unwrap(), rat(1, 2));
        let a = ActionSpec::new(Space::Interval, vec![m]).unwrap();
        let w = InfWord::power(0, 2);
        assert_eq!(a.eval_word(&w, &rat(1, 2)).unwrap(), rat(9, 10));
    }

    #[test]
    fn power_endpoints_and_inverse() {
        let sq = GenMap::Power { alpha: rat(2, 1) };
        assert_eq!(sq.eval(Space::Interval, &rat(0, 1)).unwrap(), rat(0, 1));
        assert_eq!(sq.eval(Space::Interval, &rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(sq.eval_inverse(Space::Interval, &rat(1, 4)), Err(Error::Inexact("a non-integer power")));
        let r = sq.eval_inverse(Space::Interval, &I::from_ratio(&rat(1, 2))).unwrap();
        assert!(r.contains(std::f64::consts::FRAC_1_SQRT_2));
        let back = sq.eval(Space::Interval, &r).unwrap();
        assert!(back.contains(0.5) && back.width() < 1e-14);
    }

    #[test]
    fn pl_evaluation_and_inverse() {
        let g = GenMap::pl(&[(0, 1, 0, 1), (1, 2, 1, 4), (1, 1, 1, 1)]).unwrap();
        assert_eq!(g.eval(Space::Interval, &rat(1, 4)).unwrap(), rat(1, 8));
        assert_eq!(g.eval(Space::Interval, &rat(3, 4)).unwrap(), rat(5, 8));
        assert_eq!(g.eval_inverse(Space::Interval, &rat(5, 8)).unwrap(), rat(3, 4));
        let id = GenMap::identity();
        assert_eq!(id.eval(Space::Interval, &rat(2, 7)).unwrap(), rat(2, 7));
    }

    #[test]
    fn reversed_pl_lift_on_circle() {
        let flip = GenMap::pl(&[(0, 1, 1, 1), (1, 1, 0, 1)]).unwrap();
        assert!(flip.reverses_orientation());
        assert_eq!(flip.eval(Space::Circle, &rat(1, 4)).unwrap(), rat(3, 4));
        assert_eq!(flip.eval(Space::Circle, &rat(5, 4)).unwrap(), rat(-1, 4));
        assert_eq!(flip.eval_inverse(Space::Circle, &rat(-1, 4)).unwrap(), rat(5, 4));
    }

    #[test]
    fn circle_mobius_fixed_points_and_inverse() {
        let g = GenMap::CircleMobius { t: rat(1, 1) };
        for p in [0.0, 0.5, 1.0] {
            let y = g.eval(Space::Circle, &I::from_f64(p)).unwrap();
            assert!(y.contains(p), "{y}");
        }
        let p = I::from_ratio(&rat(3, 10));
        let y = g.eval(Space::Circle, &p).unwrap();
        let back = g.eval_inverse(Space::Circle, &y).unwrap();
        assert!(back.contains_interval(&p) && back.width() < 1e-12);
        let lifted = g.eval(Space::Circle, &(p + I::one())).unwrap();
        assert!((lifted - y - I::one()).contains_zero());
    }

    #[test]
    fn validation() {
        assert!(GenMap::pl(&[(0, 1, 0, 1), (1, 2, 1, 2), (1, 2, 3, 4), (1, 1, 1, 1)]).is_err());
        assert!(GenMap::pl(&[(0, 1, 0, 1), (1, 1, 1, 2)]).is_err());
        assert!(ActionSpec::new(Space::Circle, vec![GenMap::Power { alpha: rat(2, 1) }]).is_err());
        assert!(ActionSpec::new(Space::Interval, vec![GenMap::Rotation { theta: rat(1, 3) }]).is_err());
        assert!(ActionSpec::new(Space::Interval, vec![GenMap::Mobius { lambda: rat(-1, 1) }]).is_err());
        let a = ActionSpec::trivial(Space::Interval, 2);
        assert_eq!(a.eval_word(&InfWord::generator(5), &rat(1, 2)), Err(Error::UnassignedGenerator(5)));
        assert!(a.check_point(&rat(3, 2)).is_err());
    }

    #[test]
    fn base_metric_examples() {
        assert_eq!(base_metric(Space::Interval, &rat(0, 1), &rat(1, 1)), rat(1, 1));
        assert_eq!(base_metric(Space::Circle, &rat(1, 10), &rat(9, 10)), rat(1, 5));
        assert_eq!(base_metric(Space::Circle, &rat(21, 10), &rat(-1, 10)), rat(1, 5));
        assert_eq!(base_metric(Space::Circle, &rat(1, 3), &rat(1, 3)), rat(0, 1));
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"space":"interval","generators":[
            {"type":"pl","breakpoints":[[[0,1],[0,1]],[[1,2],[1,4]],[[1,1],[1,1]]]},
            {"type":"mobius","lambda":[3,1]}]}"#;
        let a: ActionSpec = serde_json::from_str(json).unwrap();
        a.validate().unwrap();
        assert_eq!(a.rank(), 2);
        let back: ActionSpec = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<GenMap>(r#"{"type":"power","alpha":[1,0]}"#).is_err());
    }
}
