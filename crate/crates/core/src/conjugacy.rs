//! Conjugating homeomorphisms built as normalized cumulative functions of the
//! smoothed metric or the smoothed measure.
//!
//! The map constructed here is the truncated one,
//! `h_R(p) = F_R(p) / F_R(1)` with `F_R(p) = δ_R(0, p)` (metric route) or
//! `F_R(p) = ν_R([0, p])` (measure route). Its values are enclosed tightly;
//! the distance to the untruncated map is bounded separately by `epsilon`.

use num::Zero;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::action::{ActionSpec, GenMap, PreparedAction, Space};
use crate::error::{Error, Result};
use crate::freegroup::{InfWord, WeightParams};
use crate::interval::Interval;
use crate::scalar::{Rational, Scalar};
use crate::smoothing::{Images, SmoothedMetric};
use crate::verify::report::{Record, Status, VerificationReport};

type I = Interval<f64>;

pub const DEFAULT_GRID_POINTS: usize = 257;

/// The pushforward-averaged measure `ν = Σ e^{-s‖g‖} μ∘ρ(g)⁻¹` with `μ`
/// Lebesgue measure or arc length.
#[derive(Clone, Debug)]
pub struct SmoothedMeasure {
    engine: SmoothedMetric,
}

impl SmoothedMeasure {
    pub fn new(action: ActionSpec, params: WeightParams, radius: u32) -> Result<Self> {
        Self::with_headroom(action, params, radius, 0)
    }

    pub fn with_headroom(action: ActionSpec, params: WeightParams, radius: u32, headroom: u32) -> Result<Self> {
        if !action.preserves_orientation() {
            return Err(Error::Unsupported(
                "the measure route needs orientation-preserving generators".into(),
            ));
        }
        Ok(SmoothedMeasure { engine: SmoothedMetric::with_headroom(action, params, radius, headroom)? })
    }

    pub fn engine(&self) -> &SmoothedMetric {
        &self.engine
    }

    pub fn radius(&self) -> u32 {
        self.engine.radius()
    }

    pub fn tail(&self) -> I {
        self.engine.tail()
    }

    /// `ν_r([a, b])` for `a <= b` (lifts on the circle).
    pub fn mass<S: Scalar>(&self, action: &PreparedAction<S>, a: &S, b: &S, r: u32) -> Result<I> {
        let ia = self.engine.images(action, a)?;
        let ib = self.engine.images(action, b)?;
        Ok(self.engine.graded_signed(&ia, &ib).weighted(self.engine.weights(), r))
    }

    /// `ν_R` of the whole space, the truncated weight sum.
    pub fn total_mass(&self) -> I {
        self.engine.weight_sum(self.engine.radius())
    }

    /// `[S_R, S_R + T(R)]`, containing the full total mass.
    pub fn total_mass_enclosure(&self) -> I {
        self.engine.enclosure_of(self.total_mass())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfKind {
    Metric,
    Measure,
}

#[derive(Clone, Debug)]
enum Evaluator {
    Exact { action: PreparedAction<Rational>, zero: Images<Rational> },
    Enclosed { action: PreparedAction<I>, zero: Images<I> },
}

/// A monotone homeomorphism `h` of `[0, 1]` (or a lift of a circle map
/// fixing `0`), tabulated on a grid and evaluable anywhere.
#[derive(Clone, Debug)]
pub struct ConjugacyMap {
    kind: CdfKind,
    engine: SmoothedMetric,
    eval: Evaluator,
    grid: Vec<Rational>,
    values: Vec<I>,
    normalizer: I,
    epsilon: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub points: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { points: DEFAULT_GRID_POINTS }
    }
}

/// `h(p) = δ(0, p) / δ(0, 1)` on the interval.
pub fn conj_metric_interval(m: &SmoothedMetric, opts: &GridOptions) -> Result<ConjugacyMap> {
    if m.action().space != Space::Interval {
        return Err(Error::Unsupported("the metric route is defined on the interval".into()));
    }
    ConjugacyMap::build(CdfKind::Metric, m.clone(), opts)
}

/// `h(p) = ν([0, p]) / ν(X)`, with basepoint `0` on the circle.
pub fn conj_measure(s: &SmoothedMeasure, opts: &GridOptions) -> Result<ConjugacyMap> {
    ConjugacyMap::build(CdfKind::Measure, s.engine.clone(), opts)
}

fn unit_grid(action: &ActionSpec, points: usize) -> Vec<Rational> {
    let n = points.max(2) as i64 - 1;
    let mut grid: Vec<Rational> = (0..=n).map(|k| Rational::new(k.into(), n.into())).collect();
    for g in &action.generators {
        if let GenMap::Pl { breakpoints } = g {
            for (x, y) in breakpoints {
                grid.push(x.clone());
                grid.push(y.clone());
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

impl ConjugacyMap {
    fn build(kind: CdfKind, engine: SmoothedMetric, opts: &GridOptions) -> Result<Self> {
        let action = engine.action();
        let eval = if action.is_exact() {
            let prepared = action.prepare::<Rational>();
            let zero = engine.images(&prepared, &Rational::zero())?;
            Evaluator::Exact { action: prepared, zero }
        } else {
            let prepared = action.prepare::<I>();
            let zero = engine.images(&prepared, &I::zero())?;
            Evaluator::Enclosed { action: prepared, zero }
        };
        let grid = unit_grid(action, opts.points);
        let mut h = ConjugacyMap {
            kind,
            engine,
            eval,
            grid,
            values: Vec::new(),
            normalizer: I::one(),
            epsilon: 0.0,
        };
        h.normalizer = h.cumulative_rational(&Rational::from_integer(1.into()))?;
        if h.normalizer.lo() <= 0.0 {
            return Err(Error::NotCertified("normalizing mass is not positive".into()));
        }
        let tail = h.engine.tail().hi();
        h.epsilon = (I::from_f64(tail) / (h.normalizer + I::from_f64(tail))).hi();
        let values: Vec<I> =
            h.grid.par_iter().map(|p| h.value_rational(p)).collect::<Result<_>>()?;
        for (k, pair) in values.windows(2).enumerate() {
            if !(pair[0].hi() < pair[1].lo()) {
                return Err(Error::NotCertified(format!(
                    "grid values at {} and {} are not separated",
                    h.grid[k],
                    h.grid[k + 1]
                )));
            }
        }
        h.values = values;
        Ok(h)
    }

    pub fn kind(&self) -> CdfKind {
        self.kind
    }

    pub fn space(&self) -> Space {
        self.engine.action().space
    }

    pub fn engine(&self) -> &SmoothedMetric {
        &self.engine
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    pub fn values(&self) -> &[I] {
        &self.values
    }

    /// `F_R(1)`: `δ_R(0, 1)` or the truncated total mass.
    pub fn normalizer(&self) -> I {
        self.normalizer
    }

    /// Bound on `|h_R - h|` over the whole space: with `D = F_R(1)` and
    /// discarded mass `d <= T(R)`, additivity gives `|h_R - h| <= T/(D + T)`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Orientation-reversal flag per generator of the underlying action.
    pub fn orientation_flags(&self) -> Vec<bool> {
        self.engine.action().orientation_flags()
    }

    fn cumulative<S: Scalar>(&self, action: &PreparedAction<S>, zero: &Images<S>, p: &S) -> Result<I> {
        let imgs = self.engine.images(action, p)?;
        let g = match self.kind {
            CdfKind::Metric => self.engine.graded(zero, &imgs),
            CdfKind::Measure => self.engine.graded_signed(zero, &imgs),
        };
        Ok(g.weighted(self.engine.weights(), self.engine.radius()))
    }

    fn cumulative_rational(&self, p: &Rational) -> Result<I> {
        match &self.eval {
            Evaluator::Exact { action, zero } => self.cumulative(action, zero, p),
            Evaluator::Enclosed { action, zero } => self.cumulative(action, zero, &I::from_ratio(p)),
        }
    }

    fn cumulative_f64(&self, x: f64) -> Result<I> {
        match &self.eval {
            Evaluator::Exact { action, zero } => {
                let p = Rational::from_float(x).ok_or_else(|| Error::OutOfDomain(x.to_string()))?;
                self.cumulative(action, zero, &p)
            }
            Evaluator::Enclosed { action, zero } => self.cumulative(action, zero, &I::point(x)),
        }
    }

    fn normalize(&self, c: I) -> I {
        (c / self.normalizer).intersect(&I::unit()).unwrap_or_else(I::unit)
    }

    /// `h_R(p)` evaluated directly for `p` in `[0, 1]`.
    pub fn value_rational(&self, p: &Rational) -> Result<I> {
        if p.is_zero() {
            return Ok(I::zero());
        }
        if *p == Rational::from_integer(1.into()) {
            return Ok(I::one());
        }
        if *p < Rational::zero() || *p > Rational::from_integer(1.into()) {
            return Err(Error::OutOfDomain(p.to_string()));
        }
        Ok(self.normalize(self.cumulative_rational(p)?))
    }

    fn value_f64(&self, x: f64) -> Result<I> {
        if x <= 0.0 {
            return Ok(I::zero());
        }
        if x >= 1.0 {
            return Ok(I::one());
        }
        Ok(self.normalize(self.cumulative_f64(x)?))
    }

    /// `h_R(p)`: the grid bracket `[h(g_k), h(g_{k+1})]` intersected with the
    /// direct evaluation.
    pub fn apply(&self, p: &Rational) -> Result<I> {
        if *p < Rational::zero() || *p > Rational::from_integer(1.into()) {
            return Err(Error::OutOfDomain(p.to_string()));
        }
        let direct = self.value_rational(p)?;
        let k = self.grid.partition_point(|g| g <= p);
        let bracket = if k > 0 && self.grid[k - 1] == *p {
            self.values[k - 1]
        } else {
            I::new(self.values[k - 1].lo(), self.values[k].hi())
        };
        Ok(bracket.intersect(&direct).unwrap_or(direct))
    }

    /// Image of an enclosure. On the circle `x` is a lift and `h` is extended
    /// by `h(x + 1) = h(x) + 1`.
    pub fn apply_enclosure(&self, x: I) -> Result<I> {
        let at = |v: f64, upper: bool| -> Result<f64> {
            let (n, frac) = match self.space() {
                Space::Interval => (0.0, v.clamp(0.0, 1.0)),
                Space::Circle => {
                    let n = v.floor();
                    (n, v - n)
                }
            };
            let h = self.value_f64(frac)?;
            Ok(if upper { (I::from_f64(n) + I::point(h.hi())).hi() } else { (I::from_f64(n) + I::point(h.lo())).lo() })
        };
        Ok(I::new(at(x.lo(), false)?, at(x.hi(), true)?))
    }

    /// Enclosure of `h_R⁻¹(q)` by bisection, failing when the enclosure
    /// cannot be made narrower than `tol`.
    pub fn apply_inverse(&self, q: I, tol: f64) -> Result<I> {
        let q = q.intersect(&I::unit()).ok_or_else(|| Error::OutOfDomain(q.to_string()))?;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= tol / 4.0 {
                break;
            }
            if self.value_f64(mid)?.hi() < q.lo() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let left = lo;
        let (mut lo, mut hi) = (left, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= tol / 4.0 {
                break;
            }
            if self.value_f64(mid)?.lo() > q.hi() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let out = I::new(left, hi);
        if out.width() > tol {
            return Err(Error::ToleranceUnreachable { requested: tol, achieved: out.width() });
        }
        Ok(out)
    }

    /// `[F_R(p)/(F_R(1) + T), (F_R(p) + T)/F_R(1)]` clipped to `[0, 1]`,
    /// containing the untruncated `h(p)`.
    pub fn ideal_enclosure(&self, p: &Rational) -> Result<I> {
        let c = self.cumulative_rational(p)?;
        let t = self.engine.tail();
        let lo = (c / (self.normalizer + t)).lo().max(0.0);
        let hi = ((c + t) / self.normalizer).hi().min(1.0);
        Ok(I::new(lo.min(hi), hi))
    }

    /// `(grid point, lo, hi)` rows.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(g, v)| (I::from_ratio(g).mid(), v.lo(), v.hi()))
            .collect()
    }
}

/// Enclosure of `h ∘ ρ(w) ∘ h⁻¹` at `p`.
pub fn conjugated_map_eval(
    action: &ActionSpec,
    w: &InfWord,
    h: &ConjugacyMap,
    p: &Rational,
    tol: f64,
) -> Result<I> {
    let x = h.apply_inverse(I::from_ratio(p), tol)?;
    let y = action.prepare::<I>().eval_word(w, &x)?;
    h.apply_enclosure(y)
}

/// Checks `e^{-s‖w‖} ν ≤ ρ(w)_*ν ≤ e^{s‖w‖} ν` on each `A = [a, b]`.
///
/// Two certificates are recorded per set. The enclosure check compares the
/// ratio enclosure `[ν_R(wA)/(ν_R(A)+T), (ν_R(wA)+T)/ν_R(A)]` with the band.
/// The sharp check uses the exact re-indexing bound
/// `ν_R(wA) ≤ e^{s‖w‖} ν_{R+‖w‖}(A)` and its mirror, which needs the ball
/// enumerated with headroom `‖w‖`.
pub fn measure_quasi_invariance_check(
    s: &SmoothedMeasure,
    w: &InfWord,
    sets: &[(Rational, Rational)],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("measure_quasi_invariance", 0);
    let action = s.engine.action();
    for (a, b) in sets {
        action.check_point(a)?;
        action.check_point(b)?;
        if a >= b {
            return Err(crate::error::invalid("set", format!("[{a}, {b}] has no length")));
        }
        let rec = if action.is_exact() {
            quasi_invariance_record(s, &action.prepare::<Rational>(), w, a.clone(), b.clone())?
        } else {
            quasi_invariance_record(s, &action.prepare::<I>(), w, I::from_ratio(a), I::from_ratio(b))?
        };
        report.push(rec.inputs(json!({ "word": w, "a": a.to_string(), "b": b.to_string() })));
    }
    Ok(report)
}

fn quasi_invariance_record<S: Scalar>(
    s: &SmoothedMeasure,
    action: &PreparedAction<S>,
    w: &InfWord,
    a: S,
    b: S,
) -> Result<Record> {
    let e = &s.engine;
    let len = w.embedded_length();
    let r = e.radius();
    let cap = e.params().growth(len);
    let floor = e.params().weight(len);
    let t = e.tail();

    let wa = action.eval_word(w, &a)?;
    let wb = action.eval_word(w, &b)?;
    let (ia, ib) = (e.images(action, &a)?, e.images(action, &b)?);
    let (iwa, iwb) = (e.images(action, &wa)?, e.images(action, &wb)?);
    let g_a = e.graded_signed(&ia, &ib);
    let g_wa = e.graded_signed(&iwa, &iwb);
    let nu_a = g_a.weighted(e.weights(), r);
    let nu_wa = g_wa.weighted(e.weights(), r);
    let ratio = I::new((nu_wa / (nu_a + t)).lo(), ((nu_wa + t) / nu_a).hi());

    let mut status = Status::from_decision(I::point(ratio.lo()).certainly_le(&cap))
        .and(Status::from_decision(floor.certainly_le(&I::point(ratio.hi()))));
    let mut sharp = serde_json::Value::Null;
    let mut margin = f64::INFINITY;
    if w.is_identity() {
        // ρ(1)A = A, so both sides are the same number.
        margin = 0.0;
    } else if r + len <= e.ball_radius() {
        let up_bound = cap * g_a.weighted(e.weights(), r + len);
        let down_bound = cap * g_wa.weighted(e.weights(), r + len);
        status = status
            .and(Status::from_decision(nu_wa.certainly_le(&up_bound)))
            .and(Status::from_decision(nu_a.certainly_le(&down_bound)));
        margin = ((up_bound.lo() - nu_wa.hi()) / up_bound.lo()).min((down_bound.lo() - nu_a.hi()) / down_bound.lo());
        sharp = json!({ "upper": [nu_wa, up_bound], "lower": [nu_a, down_bound] });
    }
    let mut rec = Record::new("measure_quasi_invariance", status)
        .computed(json!({ "nu_a": nu_a, "nu_wa": nu_wa, "ratio": ratio, "sharp": sharp }))
        .bound(json!({ "lower": floor, "upper": cap, "tail": t }));
    if margin.is_finite() {
        rec = rec.margin(margin);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn small_grid() -> GridOptions {
        GridOptions { points: 17 }
    }

    #[test]
    fn trivial_action_gives_identity() {
        let m = SmoothedMetric::new(ActionSpec::trivial(Space::Interval, 2), WeightParams::default(), 4).unwrap();
        let h = conj_metric_interval(&m, &small_grid()).unwrap();
        for (g, v) in h.grid().iter().zip(h.values()) {
            assert!(v.contains_interval(&I::from_ratio(g)) || v.contains(I::from_ratio(g).mid()), "{g} {v}");
        }
        let p = rat(2, 7);
        assert!(h.apply(&p).unwrap().contains(2.0 / 7.0));
    }

    #[test]
    fn endpoints_are_exact() {
        let a = ActionSpec::new(Space::Interval, vec![GenMap::Mobius { lambda: rat(3, 1) }]).unwrap();
        let m = SmoothedMetric::new(a, WeightParams::default(), 4).unwrap();
        let h = conj_metric_interval(&m, &small_grid()).unwrap();
        assert_eq!(h.values()[0], I::zero());
        assert_eq!(*h.values().last().unwrap(), I::one());
    }

    #[test]
    fn inverse_round_trip() {
        let a = ActionSpec::new(Space::Interval, vec![GenMap::Power { alpha: rat(1, 2) }]).unwrap();
        let m = SmoothedMetric::new(a, WeightParams::default(), 6).unwrap();
        let h = conj_metric_interval(&m, &small_grid()).unwrap();
        let p = rat(1, 3);
        let y = h.apply(&p).unwrap();
        let x = h.apply_inverse(y, 1e-9).unwrap();
        assert!(x.contains(1.0 / 3.0), "{x}");
        assert!(matches!(h.apply_inverse(y, 0.0), Err(Error::ToleranceUnreachable { .. })));
    }

    #[test]
    fn rotation_measure_is_lebesgue() {
        let a = ActionSpec::new(Space::Circle, vec![GenMap::Rotation { theta: rat(1, 3) }]).unwrap();
        let s = SmoothedMeasure::new(a, WeightParams::default(), 5).unwrap();
        let h = conj_measure(&s, &small_grid()).unwrap();
        assert!(h.apply(&rat(3, 8)).unwrap().contains(0.375));
    }

    #[test]
    fn circle_reversal_rejected_in_measure_route() {
        let flip = GenMap::pl(&[(0, 1, 1, 1), (1, 1, 0, 1)]).unwrap();
        let a = ActionSpec::new(Space::Circle, vec![flip]).unwrap();
        assert!(SmoothedMeasure::new(a, WeightParams::default(), 3).is_err());
    }

    #[test]
    fn quasi_invariance_for_mobius() {
        let a = ActionSpec::new(Space::Interval, vec![GenMap::Mobius { lambda: rat(3, 1) }]).unwrap();
        let s = SmoothedMeasure::with_headroom(a, WeightParams::default(), 6, 2).unwrap();
        let sets = vec![(rat(0, 1), rat(1, 2)), (rat(1, 5), rat(1, 4))];
        for w in [InfWord::identity(), InfWord::generator(0), InfWord::power(0, -2)] {
            let rep = measure_quasi_invariance_check(&s, &w, &sets).unwrap();
            assert!(rep.all_passed(), "{:?}", rep.records);
        }
    }
}
