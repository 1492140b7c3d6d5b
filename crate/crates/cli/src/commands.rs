use std::path::Path;

use lipsmooth::action::Space;
use lipsmooth::conjugacy::{
    conj_measure, conj_metric_interval, measure_quasi_invariance_check, CdfKind, ConjugacyMap, GridOptions,
    SmoothedMeasure,
};
use lipsmooth::freegroup::{enumerate_ball, GenCount, InfWord};
use lipsmooth::lcgroup::{
    check_net_invariants, lc_lipschitz_check, lc_refinement_check, norm_symmetry_check, quasi_subadditivity_check,
    LcQuadrature, NetGraph,
};
use lipsmooth::smoothing::{smoothed_matrix, SmoothedMetric};
use lipsmooth::verify::{
    ball_inclusion_search, lipschitz_ratio_report, metric_axioms_check, oracle_pack, sample,
    smoothing_effectiveness_report, tail_honesty_check, Record, Status, VerificationReport,
};
use lipsmooth::{ratio, Interval, Rational};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, Suite};
use crate::output::{num, Output};
use crate::CliError;

/// Files written and the overall verdict.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub files: Vec<std::path::PathBuf>,
    pub status: Status,
}

fn lib(e: lipsmooth::Error) -> CliError {
    CliError::Library(e)
}

fn sample_points(n: usize) -> Vec<Rational> {
    let n = n as i64;
    (0..n).map(|k| ratio(2 * k + 1, 2 * n)).collect()
}

pub fn cmd_smooth(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let mut out = Output::new(out_dir, cfg)?;
    let m = SmoothedMetric::new(cfg.action()?, cfg.params()?, cfg.radius).map_err(lib)?;
    let points = sample_points(cfg.points);
    let matrix = smoothed_matrix(&m, &points).map_err(lib)?;
    let mut rows = Vec::new();
    for (i, row) in matrix.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                points[i].to_string(),
                points[j].to_string(),
                num(e.truncated.lo()),
                num(e.truncated.hi()),
                num(e.enclosure.lo()),
                num(e.enclosure.hi()),
            ]);
        }
    }
    out.csv("matrix.csv", &["i", "j", "p", "q", "truncated_lo", "truncated_hi", "lo", "hi"], &rows)?;
    out.json(
        "smooth.json",
        "smooth",
        json!({
            "R": cfg.radius,
            "s": cfg.s,
            "exact": m.action().is_exact(),
            "ball_size": m.ball().len(),
            "tail": m.tail(),
            "weight_sum_R": m.weight_sum(cfg.radius),
            "weight_total": m.weight_total(),
            "points": points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }),
    )?;
    Ok(Outcome { files: out.files().to_vec(), status: Status::Pass })
}

fn build_conjugacy(cfg: &RunConfig, headroom: u32) -> Result<ConjugacyMap, CliError> {
    let opts = GridOptions { points: cfg.conjugacy.grid_points };
    let (action, params) = (cfg.action()?, cfg.params()?);
    match cfg.conjugacy.kind {
        CdfKind::Metric => {
            let m = SmoothedMetric::with_headroom(action, params, cfg.radius, headroom).map_err(lib)?;
            conj_metric_interval(&m, &opts).map_err(lib)
        }
        CdfKind::Measure => {
            let s = SmoothedMeasure::with_headroom(action, params, cfg.radius, headroom).map_err(lib)?;
            conj_measure(&s, &opts).map_err(lib)
        }
    }
}

pub fn cmd_conjugate(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let mut out = Output::new(out_dir, cfg)?;
    let h = build_conjugacy(cfg, 0)?;
    let mut rows = Vec::new();
    for (p, v) in h.grid().iter().zip(h.values()) {
        let ideal = h.ideal_enclosure(p).map_err(lib)?;
        rows.push(vec![
            p.to_string(),
            num(Interval::<f64>::from_ratio(p).mid()),
            num(v.lo()),
            num(v.hi()),
            num(ideal.lo()),
            num(ideal.hi()),
        ]);
    }
    out.csv("conjugacy.csv", &["p", "p_float", "lo", "hi", "ideal_lo", "ideal_hi"], &rows)?;
    out.json(
        "conjugacy.json",
        "conjugate",
        json!({
            "kind": h.kind(),
            "space": h.space(),
            "R": cfg.radius,
            "s": cfg.s,
            "grid_points": h.grid().len(),
            "normalizer": h.normalizer(),
            "epsilon": h.epsilon(),
            "orientation_reversing": h.orientation_flags(),
        }),
    )?;
    Ok(Outcome { files: out.files().to_vec(), status: Status::Pass })
}

#[derive(Serialize)]
struct Skipped {
    suite: &'static str,
    reason: String,
}

#[derive(Serialize)]
struct VerifyData {
    status: Status,
    totals: lipsmooth::verify::Summary,
    suites: Vec<VerificationReport>,
    skipped: Vec<Skipped>,
}

fn suite_rng(cfg: &RunConfig, suite: Suite) -> sample::SampleRng {
    let salt = Suite::ALL.iter().position(|s| *s == suite).unwrap_or(0) as u64;
    sample::rng(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
}

/// Collapses a per-sample report into one record, keeping the worst margin.
fn collapse(check: &str, inputs: serde_json::Value, rep: &VerificationReport) -> Record {
    let margin = rep.records.iter().filter_map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let failures: Vec<_> = rep.failures().take(5).cloned().collect();
    let mut rec = Record::new(check, rep.status())
        .inputs(inputs)
        .computed(json!({ "summary": rep.summary, "first_failures": failures }));
    if margin.is_finite() {
        rec = rec.margin(margin);
    }
    rec
}

/// Runs one suite; the inner `Err` gives the reason it does not apply to the configured action.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<Result<VerificationReport, String>, CliError> {
    let action = cfg.action()?;
    let params = cfg.params()?;
    let v = &cfg.verify;
    let mut rng = suite_rng(cfg, suite);
    let mut report = VerificationReport::new(suite.name(), cfg.seed);
    match suite {
        Suite::Oracles => report.extend(oracle_pack(cfg.seed).map_err(lib)?),
        Suite::MetricAxioms => {
            let m = SmoothedMetric::new(action, params, cfg.radius).map_err(lib)?;
            let matrix = smoothed_matrix(&m, &sample_points(cfg.points)).map_err(lib)?;
            report.extend(metric_axioms_check(&m, &matrix));
        }
        Suite::Lipschitz => {
            let m = SmoothedMetric::with_headroom(action, params, cfg.radius, v.max_word_length).map_err(lib)?;
            let pairs = sample::point_pairs(&mut rng, v.pairs, 1 << 20);
            report.extend(lipschitz_ratio_report(&m, v.max_word_length, &pairs).map_err(lib)?.0);
        }
        Suite::TailHonesty => {
            let pairs = sample::point_pairs(&mut rng, v.tail_pairs, 1 << 20);
            report.extend(tail_honesty_check(&action, &params, cfg.radius, &pairs).map_err(lib)?);
        }
        Suite::QuasiInvariance => {
            if !action.preserves_orientation() {
                return Ok(Err("the measure route needs orientation-preserving generators".into()));
            }
            let len = v.max_measure_word_length;
            let s = SmoothedMeasure::with_headroom(action.clone(), params, cfg.radius, len).map_err(lib)?;
            let sets = sample::point_pairs(&mut rng, v.sets, 1 << 20);
            for (w, _) in enumerate_ball(GenCount::Finite(action.rank()), len).iter() {
                let rep = measure_quasi_invariance_check(&s, w, &sets).map_err(lib)?;
                report.push(collapse(
                    "measure_quasi_invariance",
                    json!({ "word": w, "length": w.embedded_length(), "sets": sets.len() }),
                    &rep,
                ));
            }
        }
        Suite::Effectiveness => {
            if action.space != Space::Interval {
                return Ok(Err("difference quotients are taken on the interval".into()));
            }
            let w = InfWord::generator(0);
            let h = build_conjugacy(cfg, w.embedded_length())?;
            let step = &v.effectiveness_spacing;
            let mut pairs: Vec<(Rational, Rational)> = (0..v.effectiveness_pairs as i64)
                .map(|k| (step * Rational::from_integer(k.into()), step * Rational::from_integer((k + 1).into())))
                .collect();
            pairs.extend((0..16).map(|k| (ratio(k, 16), ratio(k + 1, 16))));
            let (rep, eff) = smoothing_effectiveness_report(&h, &w, &pairs).map_err(lib)?;
            report.extend(rep);
            report.push(
                Record::new("effectiveness_summary", Status::Pass)
                    .computed(serde_json::to_value(&eff).expect("serializable"))
                    .bound(json!(v.effectiveness_spacing.to_string())),
            );
        }
        Suite::BallInclusion => {
            let (found, rec) =
                ball_inclusion_search(&action, &params, &v.ball_center, v.ball_radius, v.ball_grid).map_err(lib)?;
            report.push(rec.bound(serde_json::to_value(&found).expect("serializable")));
        }
        Suite::LcNet => {
            let lc = &cfg.lcgroup;
            let net = NetGraph::build(lc.d, lc.radius, cfg.scan_exponent()?).map_err(lib)?;
            report.extend(check_net_invariants(&net));
            let samples = sample::lattice_pairs(&mut rng, &net, lc.samples);
            report.extend(quasi_subadditivity_check(&net, &samples).map_err(lib)?);
            let singles: Vec<[i64; 2]> = samples.iter().map(|(g, _)| *g).collect();
            report.extend(norm_symmetry_check(&net, &singles).map_err(lib)?);
            let rate = net.measured_growth_rate();
            let s0 = cfg.flow_params()?.s0();
            report.push(
                Record::new("growth_below_s0", Status::from_decision(Some(rate < s0.lo())))
                    .computed(json!({ "growth_profile": net.growth_profile(), "measured_rate": rate }))
                    .bound(json!(s0))
                    .margin(s0.lo() - rate),
            );
        }
        Suite::LcFlow => {
            let f = &cfg.lcgroup.flow;
            let net = NetGraph::build(1, f.radius, cfg.scan_exponent()?).map_err(lib)?;
            let params = cfg.flow_params()?;
            let quad = LcQuadrature::new(&net, params.clone()).map_err(lib)?;
            let pairs: Vec<(f64, f64)> = sample::point_pairs(&mut rng, f.pairs, 1 << 20)
                .iter()
                .map(|(p, q)| (Interval::<f64>::from_ratio(p).mid(), Interval::<f64>::from_ratio(q).mid()))
                .collect();
            report.extend(lc_lipschitz_check(&quad, &net, &f.flow, &f.times, &pairs).map_err(lib)?);
            let fine = LcQuadrature::new(&net, params.refined().map_err(lib)?).map_err(lib)?;
            let rep = lc_refinement_check(&quad, &fine, &f.flow, &pairs[..pairs.len().min(10)]);
            report.push(collapse("lc_refinement", json!({ "pairs": rep.records.len() }), &rep));
        }
    }
    Ok(Ok(report))
}

pub fn cmd_verify(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let mut out = Output::new(out_dir, cfg)?;
    let mut suites = Vec::new();
    let mut skipped = Vec::new();
    for &suite in &cfg.verify.suites {
        match run_suite(cfg, suite)? {
            Ok(rep) => suites.push(rep),
            Err(reason) => skipped.push(Skipped { suite: suite.name(), reason }),
        }
    }
    let status = suites.iter().fold(Status::Pass, |acc, r| acc.and(r.status()));
    let mut totals = lipsmooth::verify::Summary::default();
    let mut rows = Vec::new();
    for rep in &suites {
        totals.total += rep.summary.total;
        totals.passed += rep.summary.passed;
        totals.failed += rep.summary.failed;
        totals.inconclusive += rep.summary.inconclusive;
        for r in &rep.records {
            let status = serde_json::to_value(r.status).expect("serializable");
            rows.push(vec![
                rep.suite.clone(),
                r.check.clone(),
                status.as_str().unwrap_or_default().to_string(),
                r.margin.map(num).unwrap_or_default(),
            ]);
        }
    }
    out.csv("verify.csv", &["suite", "check", "status", "margin"], &rows)?;
    out.json("verify.json", "verify", VerifyData { status, totals, suites, skipped })?;
    Ok(Outcome { files: out.files().to_vec(), status })
}

pub fn cmd_lcnet(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let mut out = Output::new(out_dir, cfg)?;
    let lc = &cfg.lcgroup;
    let net = NetGraph::build(lc.d, lc.radius, cfg.scan_exponent()?).map_err(lib)?;
    let rows: Vec<Vec<String>> = (0..net.len())
        .map(|i| {
            let k = net.lattice_vertex(i);
            let scale = net.scale() as f64;
            vec![i.to_string(), num(k[0] as f64 / scale), num(k[1] as f64 / scale), net.bfs_distance(i).to_string()]
        })
        .collect();
    out.csv("net_vertices.csv", &["id", "x", "y", "bfs"], &rows)?;
    let edges: Vec<Vec<String>> = net.edges().iter().map(|(u, v)| vec![u.to_string(), v.to_string()]).collect();
    out.csv("net_edges.csv", &["u", "v"], &edges)?;
    let invariants = check_net_invariants(&net);
    let status = invariants.status();
    out.json(
        "lcnet.json",
        "lcnet",
        json!({
            "d": lc.d,
            "L": lc.radius,
            "scan_step": num(net.scan_step()),
            "vertices": net.len(),
            "edges": edges.len(),
            "max_degree": net.max_degree(),
            "growth_profile": net.growth_profile(),
            "measured_growth_rate": net.measured_growth_rate(),
            "invariants": invariants,
        }),
    )?;
    Ok(Outcome { files: out.files().to_vec(), status })
}

/// Runs every command into subdirectories and writes an index.
pub fn cmd_report(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let mut out = Output::new(out_dir, cfg)?;
    let mut entries = Vec::new();
    let mut status = Status::Pass;
    let conjugate_applies = match cfg.conjugacy.kind {
        CdfKind::Metric => cfg.action()?.space == Space::Interval,
        CdfKind::Measure => cfg.action()?.preserves_orientation(),
    };
    type Command = fn(&RunConfig, &Path) -> Result<Outcome, CliError>;
    let mut commands: Vec<(&str, Command)> = vec![("smooth", cmd_smooth)];
    if conjugate_applies {
        commands.push(("conjugate", cmd_conjugate));
    }
    commands.push(("lcnet", cmd_lcnet));
    commands.push(("verify", cmd_verify));
    let mut rows = Vec::new();
    for (name, run) in commands {
        let o = run(cfg, &out_dir.join(name))?;
        status = status.and(o.status);
        let files: Vec<String> = o
            .files
            .iter()
            .map(|f| f.strip_prefix(out_dir).unwrap_or(f).to_string_lossy().replace('\\', "/"))
            .collect();
        let tag = serde_json::to_value(o.status).expect("serializable");
        for f in &files {
            rows.push(vec![name.to_string(), f.clone(), tag.as_str().unwrap_or_default().to_string()]);
        }
        entries.push(json!({ "command": name, "status": o.status, "files": files }));
    }
    out.csv("report.csv", &["command", "file", "status"], &rows)?;
    out.json("report.json", "report", json!({ "status": status, "commands": entries, "config": cfg }))?;
    Ok(Outcome { files: out.files().to_vec(), status })
}
