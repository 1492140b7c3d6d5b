//! The truncated smoothed metric
//! `δ_R(p, q) = Σ_{‖g‖ ≤ R} e^{-s‖g‖} δ̂(ρ(g)⁻¹p, ρ(g)⁻¹q)` with tail `T(R)`.
//!
//! Values are kept per grade: `D_n = Σ_{‖g‖ = n} δ̂(…)` in the scalar type of
//! the action, so that exact data yields exact grades and only the final
//! weighting by `e^{-sn}` is enclosed. One graded vector gives `δ_r` for every
//! `r` up to the enumerated radius.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{base_metric, ActionSpec, PreparedAction};
use crate::error::{invalid, Result};
use crate::freegroup::{enumerate_ball, weight_tail, weight_total, Ball, GenCount, InfWord, WeightParams};
use crate::interval::Interval;
use crate::scalar::{Rational, Scalar};

type I = Interval<f64>;

/// `ρ(g)⁻¹(p)` for every `g` of a ball, in ball order.
#[derive(Clone, Debug)]
pub struct Images<S>(pub Vec<S>);

/// Per-grade sums `D_n`, `n = 0..=radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graded<S> {
    pub grades: Vec<S>,
}

impl<S: Scalar> Graded<S> {
    /// `Σ_{n ≤ r} w_n D_n`.
    pub fn weighted(&self, weights: &[I], r: u32) -> I {
        let r = (r as usize).min(self.grades.len() - 1);
        let mut acc = I::zero();
        for n in 0..=r {
            acc = acc + weights[n] * self.grades[n].enclose();
        }
        acc
    }

    pub fn radius(&self) -> u32 {
        self.grades.len() as u32 - 1
    }
}

#[derive(Clone, Debug)]
pub struct SmoothedMetric {
    action: ActionSpec,
    params: WeightParams,
    radius: u32,
    ball: Ball,
    weights: Vec<I>,
    tail: I,
}

impl SmoothedMetric {
    pub fn new(action: ActionSpec, params: WeightParams, radius: u32) -> Result<Self> {
        Self::with_headroom(action, params, radius, 0)
    }

    /// Enumerates the ball to `radius + headroom` so that `δ_r` for `r` up to
    /// that radius is available from the same images.
    pub fn with_headroom(action: ActionSpec, params: WeightParams, radius: u32, headroom: u32) -> Result<Self> {
        action.validate()?;
        // One generator gives a ball of 2R + 1 words; otherwise growth is exponential.
        let limit = if action.rank() <= 1 { 256 } else { 16 };
        if radius + headroom > limit {
            return Err(invalid("R", format!("truncation radius above {limit} is out of desk scale")));
        }
        let ball = enumerate_ball(GenCount::Finite(action.rank()), radius + headroom);
        let weights = params.weights_up_to(ball.radius());
        let tail = weight_tail(&params, radius, 1.0);
        Ok(SmoothedMetric { action, params, radius, ball, weights, tail })
    }

    pub fn action(&self) -> &ActionSpec {
        &self.action
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Largest `r` for which `δ_r` can be formed.
    pub fn ball_radius(&self) -> u32 {
        self.ball.radius()
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn weights(&self) -> &[I] {
        &self.weights
    }

    /// `T(R)` at the nominal radius.
    pub fn tail(&self) -> I {
        self.tail
    }

    pub fn tail_at(&self, r: u32) -> I {
        weight_tail(&self.params, r, 1.0)
    }

    /// `S_r = Σ_{‖g‖ ≤ r} e^{-s‖g‖}` over the enumerated F_m ball.
    pub fn weight_sum(&self, r: u32) -> I {
        let sizes = self.ball.sphere_sizes();
        let r = (r as usize).min(sizes.len() - 1);
        (0..=r).fold(I::zero(), |acc, n| acc + self.weights[n] * I::from_f64(sizes[n] as f64))
    }

    pub fn weight_total(&self) -> I {
        weight_total(&self.params)
    }

    pub fn images<S: Scalar>(&self, action: &PreparedAction<S>, p: &S) -> Result<Images<S>> {
        let entries = self.ball.entries();
        let mut out: Vec<S> = Vec::with_capacity(entries.len());
        for e in entries {
            let v = match (e.parent, e.last) {
                (Some(parent), Some((i, sign))) => action.apply_letter(i, -sign, &out[parent])?,
                _ => p.clone(),
            };
            out.push(v);
        }
        Ok(Images(out))
    }

    pub fn graded<S: Scalar>(&self, a: &Images<S>, b: &Images<S>) -> Graded<S> {
        let space = self.action.space;
        let mut grades = vec![S::zero(); self.ball.radius() as usize + 1];
        for (k, e) in self.ball.entries().iter().enumerate() {
            let n = e.length as usize;
            grades[n] = grades[n].clone() + base_metric(space, &a.0[k], &b.0[k]);
        }
        Graded { grades }
    }

    /// Per-grade sums of `b - a` over the images, the truncated measure of
    /// `[a, b]` when every generator preserves orientation.
    pub fn graded_signed<S: Scalar>(&self, a: &Images<S>, b: &Images<S>) -> Graded<S> {
        let mut grades = vec![S::zero(); self.ball.radius() as usize + 1];
        for (k, e) in self.ball.entries().iter().enumerate() {
            let n = e.length as usize;
            grades[n] = grades[n].clone() + (b.0[k].clone() - a.0[k].clone());
        }
        Graded { grades }
    }

    pub fn graded_distance<S: Scalar>(&self, p: &S, q: &S) -> Result<Graded<S>> {
        let action = self.action.prepare();
        Ok(self.graded(&self.images(&action, p)?, &self.images(&action, q)?))
    }

    /// `δ_r(p, q)` enclosed, without tail.
    pub fn truncated<S: Scalar>(&self, p: &S, q: &S, r: u32) -> Result<I> {
        Ok(self.graded_distance(p, q)?.weighted(&self.weights, r))
    }

    /// `[δ_R, δ_R + T(R)]`, which contains the full series `δ(p, q)`.
    pub fn enclosure_of(&self, truncated: I) -> I {
        Interval::new(truncated.lo(), (truncated + self.tail).hi())
    }
}

/// `[δ_R(p, q), δ_R(p, q) + T(R)]` for rational points, evaluated exactly
/// when the action allows and with intervals otherwise.
pub fn smoothed_distance(m: &SmoothedMetric, p: &Rational, q: &Rational) -> Result<I> {
    m.action.check_point(p)?;
    m.action.check_point(q)?;
    let t = if m.action.is_exact() {
        m.truncated(p, q, m.radius)?
    } else {
        m.truncated(&I::from_ratio(p), &I::from_ratio(q), m.radius)?
    };
    Ok(m.enclosure_of(t))
}

/// `e^{s‖w‖}` with `‖w‖` the embedded length.
pub fn lipschitz_bound(params: &WeightParams, w: &InfWord) -> I {
    params.growth(w.embedded_length())
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixEntry {
    /// `δ_R` enclosed.
    pub truncated: I,
    /// `[δ_R, δ_R + T(R)]`.
    pub enclosure: I,
}

/// Pairwise smoothed distances between sample points.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub points: Vec<Rational>,
    pub entries: Vec<Vec<MatrixEntry>>,
    pub tail: I,
    /// Exact per-grade sums, present when the action is exact.
    pub exact_grades: Option<Vec<Vec<Graded<Rational>>>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn smoothed_matrix(m: &SmoothedMetric, points: &[Rational]) -> Result<DistanceMatrix> {
    if points.len() < 2 {
        return Err(invalid("points", "need at least two points"));
    }
    for p in points {
        m.action.check_point(p)?;
    }
    if m.action.is_exact() {
        let grades = graded_table(m, points.to_vec())?;
        let entries = entries_from(m, &grades);
        Ok(DistanceMatrix { points: points.to_vec(), entries, tail: m.tail, exact_grades: Some(grades) })
    } else {
        let pts: Vec<I> = points.iter().map(I::from_ratio).collect();
        let grades = graded_table(m, pts)?;
        let entries = entries_from(m, &grades);
        Ok(DistanceMatrix { points: points.to_vec(), entries, tail: m.tail, exact_grades: None })
    }
}

fn graded_table<S: Scalar>(m: &SmoothedMetric, points: Vec<S>) -> Result<Vec<Vec<Graded<S>>>> {
    let action = m.action.prepare();
    let images: Vec<Images<S>> =
        points.par_iter().map(|p| m.images(&action, p)).collect::<Result<_>>()?;
    Ok((0..images.len())
        .into_par_iter()
        .map(|i| (0..images.len()).map(|j| m.graded(&images[i], &images[j])).collect())
        .collect())
}

fn entries_from<S: Scalar>(m: &SmoothedMetric, grades: &[Vec<Graded<S>>]) -> Vec<Vec<MatrixEntry>> {
    grades
        .iter()
        .map(|row| {
            row.iter()
                .map(|g| {
                    let truncated = g.weighted(&m.weights, m.radius);
                    MatrixEntry { truncated, enclosure: m.enclosure_of(truncated) }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{GenMap, Space};
    use num::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn radius_zero_is_the_base_metric() {
        let a = ActionSpec::new(Space::Interval, vec![GenMap::Mobius { lambda: rat(3, 1) }]).unwrap();
        let m = SmoothedMetric::new(a, WeightParams::default(), 0).unwrap();
        let d = smoothed_distance(&m, &rat(1, 5), &rat(7, 10)).unwrap();
        assert_eq!(d.lo(), 0.5);
        assert!(d.hi() >= (I::from_f64(0.5) + m.tail()).lo());
    }

    #[test]
    fn diagonal_is_zero_plus_tail() {
        let a = ActionSpec::trivial(Space::Interval, 2);
        let m = SmoothedMetric::new(a, WeightParams::default(), 4).unwrap();
        let d = smoothed_distance(&m, &rat(1, 3), &rat(1, 3)).unwrap();
        assert_eq!(d.lo(), 0.0);
        assert!(d.hi() >= m.tail().lo());
    }

    #[test]
    fn trivial_action_scales_base_metric() {
        let a = ActionSpec::trivial(Space::Interval, 2);
        let m = SmoothedMetric::new(a, WeightParams::ln_of(4).unwrap(), 5).unwrap();
        let g = m.graded_distance(&rat(0, 1), &rat(1, 1)).unwrap();
        let sizes = m.ball().sphere_sizes();
        for (n, d) in g.grades.iter().enumerate() {
            assert_eq!(*d, Rational::from_integer((sizes[n] as i64).into()));
        }
        let d = smoothed_distance(&m, &rat(0, 1), &rat(1, 1)).unwrap();
        assert!(d.contains_interval(&m.weight_sum(5)));
        assert!(d.lo() <= 5.0);
    }

    #[test]
    fn lipschitz_constants() {
        let p = WeightParams::default();
        assert!(lipschitz_bound(&p, &InfWord::identity()).contains(1.0));
        assert!(lipschitz_bound(&p, &InfWord::generator(0)).contains(1.2f64.exp()));
        assert!(lipschitz_bound(&p, &InfWord::generator(1)).contains(3.6f64.exp()));
    }

    #[test]
    fn matrix_is_symmetric_with_zero_diagonal() {
        let a = ActionSpec::new(
            Space::Interval,
            vec![GenMap::pl(&[(0, 1, 0, 1), (1, 2, 1, 4), (1, 1, 1, 1)]).unwrap()],
        )
        .unwrap();
        let m = SmoothedMetric::new(a, WeightParams::default(), 3).unwrap();
        let pts = vec![rat(0, 1), rat(1, 3), rat(5, 7)];
        let mat = smoothed_matrix(&m, &pts).unwrap();
        let grades = mat.exact_grades.as_ref().unwrap();
        for i in 0..3 {
            assert_eq!(mat.entries[i][i].truncated.lo(), 0.0);
            for j in 0..3 {
                assert_eq!(grades[i][j], grades[j][i]);
            }
        }
    }
}
