//! Smoothing along a flow, an action of `ℝ`:
//! `δ(p, q) = ∫_ℝ e^{-2s₀‖t‖} δ̂(f_{-t}p, f_{-t}q) dμ(t)`
//! with `μ` the Haar measure giving `K = [-1, 1]` mass 1, so `dμ = dt/2`.
//!
//! The integral over `[-T, T]` is enclosed cell by cell: on each cell the
//! norm is piecewise constant with breakpoints at `v ± 1` for net vertices
//! `v`, and the flow is monotone in time, so the integrand has certified
//! bounds. Outside `[-T, T]` the bound `‖t‖ >= a(|t| - 1)` gives the tail.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::action::{base_metric, circle_mobius_lift, rational_serde, Space};
use crate::error::{invalid, Result};
use crate::interval::{Interval, Widen};
use crate::lcgroup::net::NetGraph;
use crate::scalar::{parse_decimal, Rational};
use crate::verify::report::{Record, Status, VerificationReport};

type I = Interval<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Flow {
    /// `f_t(p) = e^t p / (1 + (e^t - 1)p)` on `[0, 1]`.
    Mobius,
    /// The hyperbolic flow on the circle with `λ = e^t`.
    CircleMobius,
    /// `f_t(p) = p + ωt` on the circle.
    Rotation {
        #[serde(with = "rational_serde")]
        omega: Rational,
    },
}

fn mobius(x: f64, lambda: f64) -> f64 {
    lambda * x / (1.0 + (lambda - 1.0) * x)
}

impl Flow {
    pub fn space(&self) -> Space {
        match self {
            Flow::Mobius => Space::Interval,
            Flow::CircleMobius | Flow::Rotation { .. } => Space::Circle,
        }
    }

    /// Encloses `f_t(p)` for all `t` in `time` and `p` in `p`.
    pub fn apply(&self, time: I, p: I) -> I {
        match self {
            Flow::Mobius => {
                let lambda = time.exp();
                let y = p.monotone_image(lambda, mobius, Widen { rel_ulps: 8, abs: 0.0 });
                y.intersect(&I::unit()).unwrap_or(y)
            }
            Flow::CircleMobius => {
                let lambda = time.exp();
                let stretch = lambda.hi().max(1.0 / lambda.lo());
                p.monotone_image(lambda, circle_mobius_lift, Widen { rel_ulps: 4, abs: 16.0 * f64::EPSILON * stretch })
            }
            Flow::Rotation { omega } => p + I::from_ratio(omega) * time,
        }
    }
}

/// `s₀`, the integration window `T`, and the quadrature step `2^{-k}`.
#[derive(Clone, Debug)]
pub struct LcParams {
    s0: I,
    s0_label: String,
    window: u32,
    step_exponent: u32,
}

impl LcParams {
    pub fn new(s0: &str, window: u32, step_exponent: u32) -> Result<Self> {
        let q = parse_decimal(s0).ok_or_else(|| invalid("s0", format!("{s0:?} is not a plain decimal")))?;
        let s = I::from_ratio(&q);
        if !(s.lo() > 0.0) {
            return Err(invalid("s0", "must be positive"));
        }
        if window == 0 {
            return Err(invalid("T", "integration window must be positive"));
        }
        if !(1..=12).contains(&step_exponent) {
            return Err(invalid("quad_step", "step must be 2^-k with 1 <= k <= 12"));
        }
        Ok(LcParams { s0: s, s0_label: s0.trim().to_string(), window, step_exponent })
    }

    pub fn s0(&self) -> I {
        self.s0
    }

    pub fn s0_label(&self) -> &str {
        &self.s0_label
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn step(&self) -> f64 {
        1.0 / (1u64 << self.step_exponent) as f64
    }

    pub fn step_exponent(&self) -> u32 {
        self.step_exponent
    }

    /// The same parameters with half the quadrature step.
    pub fn refined(&self) -> Result<Self> {
        LcParams::new(&self.s0_label, self.window, self.step_exponent + 1)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    /// `[-t1, -t0]`, the times at which `f_{-t}` is applied.
    back: I,
    mid: f64,
    /// `∫_cell e^{-2s₀‖t‖} dμ`.
    mass: I,
    mid_weight: f64,
}

/// Precomputed cell masses for one net and one parameter set.
#[derive(Clone, Debug)]
pub struct LcQuadrature {
    params: LcParams,
    cells: Vec<Cell>,
    slope: f64,
    tail: I,
    growth_rate: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LcDistance {
    /// Certified enclosure of the integral over `[-T, T]`.
    pub window: I,
    /// Upper bound on the integral over `|t| > T`.
    pub tail: f64,
    /// `[window.lo, window.hi + tail]`.
    pub enclosure: I,
    /// Midpoint-rule value over `[-T, T]`.
    pub estimate: f64,
    /// Width of the window enclosure.
    pub quadrature_error: f64,
}

impl LcQuadrature {
    pub fn new(net: &NetGraph, params: LcParams) -> Result<Self> {
        if net.dim() != 1 {
            return Err(invalid("d", "flows need a net in dimension 1"));
        }
        if params.window as f64 > net.guard() {
            return Err(invalid("T", format!("window exceeds the guard radius {}", net.guard())));
        }
        let growth_rate = net.measured_growth_rate();
        if !(params.s0.lo() > growth_rate) {
            return Err(invalid("s0", format!("must exceed the measured growth rate {growth_rate}")));
        }
        let slope = net.linear_lower_slope()?;
        let two_s0 = I::from_f64(2.0) * params.s0;
        let half = I::from_f64(0.5);
        let h = params.step();
        let n = (params.window as i64) << params.step_exponent;
        let vertices: Vec<f64> = (0..net.len()).map(|i| net.vertex(i)[0]).collect();

        let mut cells = Vec::with_capacity(2 * n as usize);
        for k in -n..n {
            let (t0, t1) = (k as f64 * h, (k + 1) as f64 * h);
            let mut cuts = vec![t0, t1];
            for &v in &vertices {
                for c in [v - 1.0, v + 1.0] {
                    if c > t0 && c < t1 {
                        cuts.push(c);
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            let mut mass = I::from_f64(0.0);
            for w in cuts.windows(2) {
                let norm = net.lc_norm(&[0.5 * (w[0] + w[1])])?;
                let weight = (-(two_s0 * I::from_f64(norm as f64))).exp();
                mass = mass + half * I::from_f64(w[1] - w[0]) * weight;
            }
            let mid = 0.5 * (t0 + t1);
            let mid_weight = (-2.0 * params.s0.mid() * net.lc_norm(&[mid])? as f64).exp();
            cells.push(Cell { back: I::new(-t1, -t0), mid, mass, mid_weight });
        }

        // (1/2)·2·e^{2s₀a}e^{-2s₀aT}/(2s₀a), using ‖t‖ >= a|t| - a.
        let a = I::from_f64(slope);
        let t = I::from_f64(params.window as f64);
        let tail = (-(two_s0 * a * (t - I::from_f64(1.0)))).exp() / (two_s0 * a);
        Ok(LcQuadrature { params, cells, slope, tail, growth_rate })
    }

    pub fn params(&self) -> &LcParams {
        &self.params
    }

    /// The slope `a` in `‖t‖ >= a(|t| - 1)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn tail(&self) -> I {
        self.tail
    }

    pub fn growth_rate(&self) -> f64 {
        self.growth_rate
    }

    /// `δ(p, q)` for point enclosures `p`, `q`.
    pub fn distance(&self, flow: &Flow, p: I, q: I) -> LcDistance {
        let space = flow.space();
        let mut window = I::from_f64(0.0);
        let mut estimate = 0.0;
        for c in &self.cells {
            let d = base_metric(space, &flow.apply(c.back, p), &flow.apply(c.back, q));
            let d = I::new(d.lo().max(0.0), d.hi());
            window = window + c.mass * d;
            let t = I::from_f64(-c.mid);
            let dm = base_metric(space, &flow.apply(t, p), &flow.apply(t, q));
            estimate += 0.5 * self.params.step() * c.mid_weight * dm.mid();
        }
        let tail = self.tail.hi();
        LcDistance {
            window,
            tail,
            enclosure: I::new(window.lo(), (window + I::from_f64(tail)).hi()),
            estimate,
            quadrature_error: window.width(),
        }
    }
}

/// Lipschitz constant `e^{2s₀ + 6s₀‖t‖}` for `f_t`.
pub fn lc_lipschitz_bound(params: &LcParams, norm: u32) -> I {
    let s0 = params.s0();
    (I::from_f64(2.0) * s0 + I::from_f64(6.0) * s0 * I::from_f64(norm as f64)).exp()
}

/// Checks `δ(f_t p, f_t q) <= C(t) δ(p, q)` and the reverse inequality for
/// every `t` and pair, comparing lower bounds against upper bounds.
pub fn lc_lipschitz_check(
    quad: &LcQuadrature,
    net: &NetGraph,
    flow: &Flow,
    times: &[f64],
    pairs: &[(f64, f64)],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("lc_lipschitz", 0);
    let base: Vec<LcDistance> =
        pairs.iter().map(|&(p, q)| quad.distance(flow, I::from_f64(p), I::from_f64(q))).collect();
    for &t in times {
        let norm = net.lc_norm(&[t])?;
        let cap = lc_lipschitz_bound(quad.params(), norm);
        let mut status = Status::Pass;
        let mut worst = f64::INFINITY;
        let time = I::from_f64(t);
        for (&(p, q), before) in pairs.iter().zip(&base) {
            let after = quad.distance(flow, flow.apply(time, I::from_f64(p)), flow.apply(time, I::from_f64(q)));
            for (small, large) in [(&after, before), (before, &after)] {
                let lhs = I::point(small.enclosure.lo());
                let rhs = cap * I::point(large.enclosure.hi());
                status = status.and(Status::from_decision(lhs.certainly_le(&rhs)));
                worst = worst.min(1.0 - lhs.hi() / rhs.lo());
            }
        }
        report.push(
            Record::new("lc_lipschitz", status)
                .inputs(json!({ "t": t, "norm": norm, "pairs": pairs.len() }))
                .computed(json!({ "worst_relative_margin": worst }))
                .bound(json!(cap))
                .margin(worst),
        );
    }
    Ok(report)
}

/// Halving the quadrature step must move the estimate by less than the
/// coarse quadrature error, and the two enclosures must intersect.
pub fn lc_refinement_check(
    coarse: &LcQuadrature,
    fine: &LcQuadrature,
    flow: &Flow,
    pairs: &[(f64, f64)],
) -> VerificationReport {
    let mut report = VerificationReport::new("lc_refinement", 0);
    for &(p, q) in pairs {
        let a = coarse.distance(flow, I::from_f64(p), I::from_f64(q));
        let b = fine.distance(flow, I::from_f64(p), I::from_f64(q));
        let shift = (a.estimate - b.estimate).abs();
        let overlap = a.window.intersect(&b.window).is_some();
        let status = if overlap && shift < a.quadrature_error { Status::Pass } else { Status::Fail };
        report.push(
            Record::new("lc_refinement", status)
                .inputs(json!({ "p": p, "q": q, "steps": [coarse.params().step(), fine.params().step()] }))
                .computed(json!({ "shift": shift, "coarse": a.window, "fine": b.window }))
                .bound(json!(a.quadrature_error))
                .margin(a.quadrature_error - shift),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(step: u32) -> (NetGraph, LcQuadrature) {
        let net = NetGraph::build(1, 24, 2).unwrap();
        let quad = LcQuadrature::new(&net, LcParams::new("1", 12, step).unwrap()).unwrap();
        (net, quad)
    }

    #[test]
    fn flows_fix_endpoints_and_compose() {
        let f = Flow::Mobius;
        let y = f.apply(I::from_f64(0.7), I::from_f64(0.3));
        let back = f.apply(I::from_f64(-0.7), y);
        assert!(back.contains(0.3));
        assert!(f.apply(I::from_f64(2.0), I::from_f64(0.0)).hi() < 1e-300);
        let c = Flow::CircleMobius;
        assert!(c.apply(I::from_f64(1.0), I::from_f64(0.5)).contains(0.5));
    }

    #[test]
    fn rotation_distance_is_scaled_base_metric() {
        // A rotation preserves δ̂, so δ = δ̂ · ∫ e^{-2s₀‖t‖} dμ.
        let (_, quad) = setup(4);
        let flow = Flow::Rotation { omega: Rational::from_integer(1.into()) };
        let a = quad.distance(&flow, I::from_f64(0.1), I::from_f64(0.3));
        let b = quad.distance(&flow, I::from_f64(0.5), I::from_f64(0.9));
        assert!(a.window.lo() > 0.0);
        let ratio_lo = a.window.lo() / b.window.hi();
        let ratio_hi = a.window.hi() / b.window.lo();
        assert!(ratio_lo <= 0.5 + 1e-9 && ratio_hi >= 0.5 - 1e-9);
    }

    #[test]
    fn enclosure_contains_estimate_and_is_tight() {
        let (_, quad) = setup(6);
        let d = quad.distance(&Flow::Mobius, I::from_f64(0.25), I::from_f64(0.75));
        assert!(d.window.contains(d.estimate));
        assert!(d.quadrature_error < 2e-2 * d.estimate);
        assert!(d.tail < 1e-2);
    }

    #[test]
    fn lipschitz_and_refinement_pass() {
        let (net, quad) = setup(4);
        let fine = LcQuadrature::new(&net, quad.params().refined().unwrap()).unwrap();
        let pairs = [(0.2, 0.4), (0.05, 0.9)];
        let rep = lc_lipschitz_check(&quad, &net, &Flow::Mobius, &[-1.5, 0.0, 0.5, 3.0], &pairs).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.records);
        let rep = lc_refinement_check(&quad, &fine, &Flow::Mobius, &pairs);
        assert!(rep.all_passed(), "{:?}", rep.records);
    }

    #[test]
    fn rejects_window_beyond_guard() {
        let net = NetGraph::build(1, 10, 2).unwrap();
        assert!(LcQuadrature::new(&net, LcParams::new("1", 8, 4).unwrap()).is_err());
    }
}
