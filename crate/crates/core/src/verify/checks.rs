use num::Zero;
use serde::Serialize;
use serde_json::json;

use crate::action::{base_metric, ActionSpec, PreparedAction, Space};
use crate::conjugacy::ConjugacyMap;
use crate::error::{invalid, Result};
use crate::freegroup::{enumerate_ball, weight_total, GenCount, InfWord, WeightParams};
use crate::interval::Interval;
use crate::scalar::{Rational, Scalar};
use crate::smoothing::{DistanceMatrix, Images, SmoothedMetric};
use crate::verify::report::{Record, Status, VerificationReport};

type I = Interval<f64>;

/// Slack allowed in the interval triangle check, where exactness is not
/// available.
pub const TRIANGLE_SLACK: f64 = 1e-12;

fn pass_if(b: bool) -> Status {
    if b {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Symmetry, positivity, triangle inequality and boundedness on a distance
/// matrix. With exact grades the triangle inequality is certified grade by
/// grade in rational arithmetic.
pub fn metric_axioms_check(m: &SmoothedMetric, matrix: &DistanceMatrix) -> VerificationReport {
    let mut report = VerificationReport::new("metric_axioms", 0);
    let n = matrix.len();
    let e = &matrix.entries;
    let space = m.action().space;
    let points = json!({ "points": n, "R": m.radius() });

    let symmetric = (0..n).all(|i| {
        (0..n).all(|j| match &matrix.exact_grades {
            Some(g) => g[i][j] == g[j][i],
            None => e[i][j].truncated == e[j][i].truncated,
        })
    });
    report.push(Record::new("metric_symmetry", pass_if(symmetric)).inputs(points.clone()));

    let mut status = Status::Pass;
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let d = e[i][j].truncated;
            if i == j {
                let zero = match &matrix.exact_grades {
                    Some(g) => g[i][i].grades.iter().all(Zero::is_zero),
                    None => d.contains(0.0),
                };
                status = status.and(pass_if(zero));
                continue;
            }
            // δ_R ≥ δ̂ > 0 off the diagonal.
            let floor = I::from_ratio(&base_metric(space, &matrix.points[i], &matrix.points[j]));
            status = status.and(Status::from_decision(floor.certainly_le(&d))).and(pass_if(floor.lo() > 0.0));
            worst = worst.min(d.lo() - floor.hi());
        }
    }
    report.push(
        Record::new("metric_positivity", status)
            .inputs(points.clone())
            .computed(json!({ "min_excess_over_base": worst }))
            .margin(worst),
    );

    let (status, detail) = match &matrix.exact_grades {
        Some(g) => {
            let mut ok = true;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for (r, dik) in g[i][k].grades.iter().enumerate() {
                            ok &= *dik <= &g[i][j].grades[r] + &g[j][k].grades[r];
                        }
                    }
                }
            }
            (pass_if(ok), json!({ "mode": "exact_per_grade", "triples": n * n * n }))
        }
        None => {
            let mut status = Status::Pass;
            let mut consumed = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = I::point(e[i][k].truncated.hi());
                        let rhs = I::point(e[i][j].truncated.lo())
                            + I::point(e[j][k].truncated.lo())
                            + I::point(TRIANGLE_SLACK);
                        status = status.and(Status::from_decision(lhs.certainly_le(&rhs)));
                        consumed = consumed
                            .max(e[i][k].truncated.hi() - e[i][j].truncated.lo() - e[j][k].truncated.lo());
                    }
                }
            }
            (status, json!({ "mode": "interval", "triples": n * n * n, "slack": TRIANGLE_SLACK, "max_slack_used": consumed.max(0.0) }))
        }
    };
    report.push(Record::new("metric_triangle", status).inputs(points.clone()).computed(detail));

    let total = m.weight_total();
    let max_hi = e.iter().flatten().map(|x| x.enclosure.hi()).fold(0.0, f64::max);
    report.push(
        Record::new("metric_bounded", Status::from_decision(I::point(max_hi).certainly_le(&I::point(total.lo()))))
            .inputs(points)
            .computed(json!({ "max_enclosure_hi": max_hi }))
            .bound(json!(total))
            .margin(total.lo() - max_hi),
    );
    report
}

/// Checks `δ_R(p, q) ≤ δ_{R+2}(p, q) ≤ δ_R(p, q) + T(R)`, with `δ_{R+2}`
/// recomputed word by word along an independently enumerated ball rather
/// than through the parent tree.
pub fn tail_honesty_check(
    action: &ActionSpec,
    params: &WeightParams,
    radius: u32,
    pairs: &[(Rational, Rational)],
) -> Result<VerificationReport> {
    let m = SmoothedMetric::new(action.clone(), params.clone(), radius)?;
    let mut report = VerificationReport::new("tail_honesty", 0);
    for (p, q) in pairs {
        let rec = if action.is_exact() {
            honesty_record(&m, p.clone(), q.clone())?
        } else {
            honesty_record(&m, I::from_ratio(p), I::from_ratio(q))?
        };
        report.push(rec.inputs(json!({ "p": p.to_string(), "q": q.to_string(), "R": radius })));
    }
    Ok(report)
}

fn honesty_record<S: Scalar>(m: &SmoothedMetric, p: S, q: S) -> Result<Record> {
    let action = m.action();
    let r = m.radius();
    let tree = m.graded_distance(&p, &q)?;
    let ball = enumerate_ball(GenCount::Finite(action.rank()), r + 2);
    let mut naive = vec![S::zero(); r as usize + 3];
    for (w, len) in ball.iter() {
        let a = action.eval_word_inverse(w, &p)?;
        let b = action.eval_word_inverse(w, &q)?;
        naive[len as usize] = naive[len as usize].clone() + base_metric(action.space, &a, &b);
    }
    let weights = m.params().weights_up_to(r + 2);
    let mut agree = true;
    for n in 0..=r as usize {
        agree &= if S::EXACT {
            tree.grades[n].certainly_le(&naive[n]) == Some(true) && naive[n].certainly_le(&tree.grades[n]) == Some(true)
        } else {
            tree.grades[n].enclose().intersect(&naive[n].enclose()).is_some()
        };
    }
    let delta_r = tree.weighted(m.weights(), r);
    let extra = (r as usize + 1..=r as usize + 2).fold(I::zero(), |acc, n| acc + weights[n] * naive[n].enclose());
    let t = m.tail();
    let status = pass_if(agree)
        .and(pass_if(extra.lo() >= 0.0))
        .and(Status::from_decision(extra.certainly_le(&t)));
    Ok(Record::new("tail_honesty", status)
        .computed(json!({ "delta_R": delta_r, "delta_R_plus_2": delta_r + extra, "grades_agree": agree }))
        .bound(json!(t))
        .margin(t.lo() - extra.hi()))
}

/// Per-word summary of the Lipschitz checks.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzRow {
    pub word: InfWord,
    pub length: u32,
    pub bound: I,
    pub pairs: usize,
    /// Largest `δ_R(wp, wq) / δ_R(p, q)` upper bound seen.
    pub max_truncated_ratio: f64,
    /// Smallest relative margin of the sharp certificate, if run.
    pub worst_margin: Option<f64>,
    pub status: Status,
}

/// Checks `e^{-s‖w‖} δ ≤ δ∘ρ(w) ≤ e^{s‖w‖} δ` for every `w` with `‖w‖ ≤ max_len`.
///
/// Two certificates per pair. On enclosures: `lo(δ(wp, wq)) ≤ e^{s‖w‖}
/// hi(δ(p, q))` and the mirror. Sharp: re-indexing the sum over `g ↦ w⁻¹g`
/// gives `δ_R(wp, wq) ≤ e^{s‖w‖} δ_{R+‖w‖}(p, q)` and the mirror, which needs
/// the metric built with headroom `max_len`.
pub fn lipschitz_ratio_report(
    m: &SmoothedMetric,
    max_len: u32,
    pairs: &[(Rational, Rational)],
) -> Result<(VerificationReport, Vec<LipschitzRow>)> {
    if m.radius() + max_len > m.ball_radius() {
        return Err(invalid("headroom", format!("the ball must reach R + {max_len}")));
    }
    let action = m.action().prepare::<I>();
    let words = enumerate_ball(GenCount::Finite(m.action().rank()), max_len);
    let base: Vec<(I, I, Images<I>, Images<I>)> = pairs
        .iter()
        .map(|(p, q)| {
            let (p, q) = (I::from_ratio(p), I::from_ratio(q));
            Ok((p, q, m.images(&action, &p)?, m.images(&action, &q)?))
        })
        .collect::<Result<_>>()?;
    let r = m.radius();
    let t = m.tail();
    let mut report = VerificationReport::new("lipschitz", 0);
    let mut rows = Vec::new();
    for (w, len) in words.iter() {
        let cap = m.params().growth(len);
        let mut status = Status::Pass;
        let mut worst: Option<f64> = None;
        let mut max_ratio = 0.0f64;
        for (p, q, ip, iq) in &base {
            let g = m.graded(ip, iq);
            let wp = action.eval_word(w, p)?;
            let wq = action.eval_word(w, q)?;
            let gw = m.graded(&m.images(&action, &wp)?, &m.images(&action, &wq)?);
            let (d, dw) = (g.weighted(m.weights(), r), gw.weighted(m.weights(), r));
            let (enc, encw) = (I::new(d.lo(), (d + t).hi()), I::new(dw.lo(), (dw + t).hi()));
            status = status
                .and(Status::from_decision(I::point(encw.lo()).certainly_le(&(cap * I::point(enc.hi())))))
                .and(Status::from_decision(I::point(enc.lo()).certainly_le(&(cap * I::point(encw.hi())))));
            max_ratio = max_ratio.max((dw / d).hi());
            if !w.is_identity() {
                let up = cap * g.weighted(m.weights(), r + len);
                let down = cap * gw.weighted(m.weights(), r + len);
                status = status
                    .and(Status::from_decision(dw.certainly_le(&up)))
                    .and(Status::from_decision(d.certainly_le(&down)));
                let margin = ((up.lo() - dw.hi()) / up.lo()).min((down.lo() - d.hi()) / down.lo());
                worst = Some(worst.map_or(margin, |x: f64| x.min(margin)));
            }
        }
        let row = LipschitzRow {
            word: w.clone(),
            length: len,
            bound: cap,
            pairs: pairs.len(),
            max_truncated_ratio: max_ratio,
            worst_margin: worst,
            status,
        };
        let mut rec = Record::new("lipschitz", status)
            .inputs(json!({ "word": w, "length": len, "pairs": pairs.len(), "R": r }))
            .computed(json!({ "max_truncated_ratio": max_ratio, "sharp": worst.is_some() }))
            .bound(json!(cap));
        if let Some(x) = worst {
            rec = rec.margin(x);
        }
        report.push(rec);
        rows.push(row);
    }
    Ok((report, rows))
}

#[derive(Clone, Debug, Serialize)]
pub struct Effectiveness {
    pub word: InfWord,
    /// Certified lower bound on `sup |ρ(w)a - ρ(w)b| / |a - b|` over the pairs.
    pub raw_sup_lower: f64,
    /// Certified upper bound on the same supremum for `h ρ(w) h⁻¹` on the
    /// image pairs `(h(a), h(b))`.
    pub conjugated_sup_upper: f64,
    /// Largest `e^{s‖w‖}(1 + slack)` over the pairs, where
    /// `slack = δ_{R+‖w‖}(a, b)/δ_R(a, b) - 1`.
    pub bound_upper: f64,
    pub pairs: usize,
}

/// Compares difference quotients of `ρ(w)` with those of the conjugated map
/// on pairs `a < b`. The conjugated quotient is `δ_R(wa, wb)/δ_R(a, b)`,
/// bounded by `e^{s‖w‖}(1 + slack)`.
pub fn smoothing_effectiveness_report(
    h: &ConjugacyMap,
    w: &InfWord,
    pairs: &[(Rational, Rational)],
) -> Result<(VerificationReport, Effectiveness)> {
    let m = h.engine();
    let len = w.embedded_length();
    if m.radius() + len > m.ball_radius() {
        return Err(invalid("headroom", format!("the ball must reach R + {len}")));
    }
    let action: PreparedAction<I> = m.action().prepare();
    let cap = m.params().growth(len);
    let mut report = VerificationReport::new("smoothing_effectiveness", 0);
    let mut eff = Effectiveness {
        word: w.clone(),
        raw_sup_lower: 0.0,
        conjugated_sup_upper: 0.0,
        bound_upper: 0.0,
        pairs: pairs.len(),
    };
    let mut status = Status::Pass;
    for (a, b) in pairs {
        if a >= b {
            return Err(invalid("pair", format!("{a} is not below {b}")));
        }
        let (ia, ib) = (I::from_ratio(a), I::from_ratio(b));
        let (wa, wb) = (action.eval_word(w, &ia)?, action.eval_word(w, &ib)?);
        let raw = base_metric(m.action().space, &wa, &wb) / (ib - ia);
        eff.raw_sup_lower = eff.raw_sup_lower.max(raw.lo());

        let (ha, hb) = (h.apply(a)?, h.apply(b)?);
        let (hwa, hwb) = (h.apply_enclosure(wa)?, h.apply_enclosure(wb)?);
        let quotient = (hwb - hwa).abs() / (hb - ha);
        eff.conjugated_sup_upper = eff.conjugated_sup_upper.max(quotient.hi());

        let g = m.graded(&m.images(&action, &ia)?, &m.images(&action, &ib)?);
        let bound = cap * g.weighted(m.weights(), m.radius() + len) / g.weighted(m.weights(), m.radius());
        eff.bound_upper = eff.bound_upper.max(bound.hi());
        status = status.and(Status::from_decision(quotient.certainly_le(&bound)));
    }
    report.push(
        Record::new("smoothing_effectiveness", status)
            .inputs(json!({ "word": w, "pairs": pairs.len(), "R": m.radius() }))
            .computed(json!({ "raw_sup_lower": eff.raw_sup_lower, "conjugated_sup_upper": eff.conjugated_sup_upper }))
            .bound(json!(eff.bound_upper))
            .margin(eff.bound_upper - eff.conjugated_sup_upper),
    );
    Ok((report, eff))
}

#[derive(Clone, Debug, Serialize)]
pub struct BallInclusion {
    pub x: String,
    pub r: f64,
    /// Largest `r′ = r·2^{-k}` certified, if any.
    pub r_prime: Option<f64>,
    /// Truncation radius with `T(R) < r/2`.
    pub truncation: Option<u32>,
    pub tail: Option<f64>,
    pub grid_points: usize,
    /// Largest upper bound of `δ(x, y)` over the witness points of `B(x, r′)`.
    pub max_distance: Option<f64>,
}

/// Searches for `r′` with `B_δ̂(x, r′) ⊂ B_δ(x, r)` by halving from `r`.
///
/// Membership is tested on a uniform grid plus, on the interval, the
/// endpoints `x ± r′`: there δ is additive on ordered triples, so its
/// largest value over the δ̂-ball is attained at an endpoint. The result is
/// inconclusive when `r′` falls below the grid spacing or the truncation
/// radius needed for `T(R) < r/2` is out of reach.
pub fn ball_inclusion_search(
    action: &ActionSpec,
    params: &WeightParams,
    x: &Rational,
    r: f64,
    grid_points: usize,
) -> Result<(BallInclusion, Record)> {
    action.check_point(x)?;
    if !(r > 0.0) {
        return Err(invalid("r", "radius must be positive"));
    }
    let diam = match action.space {
        Space::Interval => 1.0,
        Space::Circle => 0.5,
    };
    let mut out = BallInclusion {
        x: x.to_string(),
        r,
        r_prime: None,
        truncation: None,
        tail: None,
        grid_points,
        max_distance: None,
    };
    let inputs = json!({ "x": x.to_string(), "r": r, "grid_points": grid_points });
    let total = weight_total(params);
    if r > total.hi() {
        // δ never exceeds the full weight sum, so every point is inside.
        out.r_prime = Some(1.0);
        return Ok((out, Record::new("ball_inclusion", Status::Pass).inputs(inputs).computed(json!({ "r_prime": 1.0 }))));
    }
    let limit = if action.rank() <= 1 { 256 } else { 16 };
    let Some(radius) = (0..=limit).find(|&n| crate::freegroup::weight_tail(params, n, 1.0).hi() < r / 2.0) else {
        let rec = Record::new("ball_inclusion", Status::Inconclusive)
            .inputs(inputs)
            .computed(json!({ "reason": "no truncation radius within reach has T(R) < r/2" }));
        return Ok((out, rec));
    };
    let m = SmoothedMetric::new(action.clone(), params.clone(), radius)?;
    out.truncation = Some(radius);
    out.tail = Some(m.tail().hi());

    let exact = action.is_exact();
    let distance_hi = |y: &Rational| -> Result<f64> {
        let d = if exact { m.truncated(x, y, radius)? } else { m.truncated(&I::from_ratio(x), &I::from_ratio(y), radius)? };
        Ok((d + m.tail()).hi())
    };
    // (δ̂ lower bound, δ upper bound) on the grid.
    let n = grid_points.max(2) as i64 - 1;
    let grid: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let y = Rational::new(k.into(), n.into());
            Ok((I::from_ratio(&base_metric(action.space, x, &y)).lo(), distance_hi(&y)?))
        })
        .collect::<Result<_>>()?;
    let spacing = 1.0 / n as f64;

    let mut rp = r.min(diam);
    while rp >= spacing {
        let mut worst = 0.0f64;
        for &(base, d) in &grid {
            if base < rp {
                worst = worst.max(d);
            }
        }
        if action.space == Space::Interval {
            let q = Rational::from_float(rp).expect("finite radius");
            for end in [x - &q, x + &q] {
                let end = end.max(Rational::zero()).min(Rational::from_integer(1.into()));
                worst = worst.max(distance_hi(&end)?);
            }
        }
        if worst < r {
            out.r_prime = Some(rp);
            out.max_distance = Some(worst);
            let rec = Record::new("ball_inclusion", Status::Pass)
                .inputs(inputs)
                .computed(json!({ "r_prime": rp, "R": radius, "max_distance": worst }))
                .bound(json!(r))
                .margin(r - worst);
            return Ok((out, rec));
        }
        rp /= 2.0;
    }
    let rec = Record::new("ball_inclusion", Status::Inconclusive)
        .inputs(inputs)
        .computed(json!({ "reason": "r′ fell below the grid spacing", "R": radius }));
    Ok((out, rec))
}
