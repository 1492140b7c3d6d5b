//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use lipsmooth::conjugacy::{conj_metric_interval, measure_quasi_invariance_check, GridOptions, SmoothedMeasure};
use lipsmooth::demo;
use lipsmooth::freegroup::{enumerate_ball, weight_total, GenCount, InfWord, WeightParams};
use lipsmooth::lcgroup::{
    check_net_invariants, lc_lipschitz_check, lc_refinement_check, packing_bound, quasi_subadditivity_check, Flow,
    LcParams, LcQuadrature, NetGraph,
};
use lipsmooth::smoothing::{smoothed_distance, smoothed_matrix, SmoothedMetric};
use lipsmooth::verify::oracles::{embedding_oracle, sphere_count_oracle};
use lipsmooth::verify::{
    lipschitz_ratio_report, metric_axioms_check, sample, smoothing_effectiveness_report, tail_honesty_check, Status,
    TRIANGLE_SLACK,
};
use lipsmooth::{ratio, Interval64, Rational};
use lipsmooth_cli::{cmd_verify, RunConfig};
use rand::Rng;

const SEED: u64 = 20251019;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid(n: i64) -> Vec<Rational> {
    (0..n).map(|k| ratio(2 * k + 1, 2 * n)).collect()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit as f64 {
        Ok(())
    } else {
        Err(format!("took {:.1} s, limit {limit} s", elapsed.as_secs_f64()))
    }
}

fn lib<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sphere_counts() -> Outcome {
    let start = Instant::now();
    let rec = sphere_count_oracle(8);
    within(start.elapsed(), 10)?;
    ensure(rec.status == Status::Pass, format!("r = 0..8 counted by brute force in {:.2} s", start.elapsed().as_secs_f64()))
}

fn embedding() -> Outcome {
    let rec = embedding_oracle();
    ensure(rec.status == Status::Pass, format!("{}", rec.computed))
}

fn metric_axioms() -> Outcome {
    let params = WeightParams::default();
    let m = SmoothedMetric::new(demo::pl_demo(), params.clone(), 6).map_err(lib)?;
    let matrix = smoothed_matrix(&m, &grid(20)).map_err(lib)?;
    if matrix.exact_grades.is_none() {
        return Err("pl demo was not evaluated exactly".into());
    }
    let rep = metric_axioms_check(&m, &matrix);
    if !rep.all_passed() {
        return Err(format!("pl: {:?}", rep.failures().map(|r| &r.check).collect::<Vec<_>>()));
    }

    let m = SmoothedMetric::new(demo::power_demo(), params, 6).map_err(lib)?;
    let matrix = smoothed_matrix(&m, &grid(20)).map_err(lib)?;
    let rep = metric_axioms_check(&m, &matrix);
    if !rep.all_passed() {
        return Err(format!("power: {:?}", rep.failures().map(|r| &r.check).collect::<Vec<_>>()));
    }
    // 200 random triples, checked directly on the enclosures.
    let e = &matrix.entries;
    let mut rng = sample::rng(SEED);
    let mut worst = f64::INFINITY;
    let mut drawn = 0;
    while drawn < 200 {
        let (i, j, k) = (rng.gen_range(0..20), rng.gen_range(0..20), rng.gen_range(0..20));
        if i == j || j == k || i == k {
            continue;
        }
        drawn += 1;
        let lhs = e[i][k].truncated.hi();
        let rhs = e[i][j].truncated.lo() + e[j][k].truncated.lo() + TRIANGLE_SLACK;
        worst = worst.min(rhs - lhs);
    }
    ensure(worst >= 0.0, format!("pl exact on 20 points, power 8000 + 200 sampled distinct triples, worst slack {worst:.3e}"))
}

fn lipschitz() -> Outcome {
    let params = WeightParams::default();
    let mut words = 0;
    for action in [demo::pl_demo(), demo::power_demo()] {
        let m = SmoothedMetric::with_headroom(action, params.clone(), 6, 3).map_err(lib)?;
        let pairs = sample::point_pairs(&mut sample::rng(SEED), 1000, 1 << 20);
        let (rep, rows) = lipschitz_ratio_report(&m, 3, &pairs).map_err(lib)?;
        if !rep.all_passed() {
            return Err(format!("{} of {} records not passed", rep.records.len() - rep.summary.passed, rep.records.len()));
        }
        words += rows.len();
    }
    Ok(format!("{words} words with ‖w‖ <= 3 on 1000 pairs each, all decisive"))
}

fn tail_honesty() -> Outcome {
    let params = WeightParams::default();
    let pairs = sample::point_pairs(&mut sample::rng(SEED), 50, 1 << 12);
    for (name, action) in [("pl", demo::pl_demo()), ("power", demo::power_demo())] {
        let rep = tail_honesty_check(&action, &params, 6, &pairs).map_err(lib)?;
        if !rep.all_passed() {
            return Err(format!("{name}: {} failures", rep.failures().count()));
        }
    }
    Ok("50 pairs, δ_(R+2) - δ_R <= T(R) at R = 6 for pl and power".into())
}

fn trivial_closed_form() -> Outcome {
    let params = WeightParams::ln_of(4).map_err(lib)?;
    let total = weight_total(&params);
    if !total.contains(5.0) {
        return Err(format!("weight total {total:?} misses 5"));
    }
    // For one generator, δ_R(0, 1) = 1 + 2 Σ_{n=1}^{R} 4^{-n}.
    let partial = |r: u32| -> f64 {
        let mut s = Rational::from_integer(1.into());
        for n in 1..=r {
            s += ratio(2, 4i64.pow(n));
        }
        Interval64::from_ratio(&s).mid()
    };
    for radius in [1, 2, 4, 6, 10] {
        let m = SmoothedMetric::new(demo::trivial_demo(1), params.clone(), radius).map_err(lib)?;
        let d = smoothed_distance(&m, &ratio(0, 1), &ratio(1, 1)).map_err(lib)?;
        let p = partial(radius);
        let limit = 5.0 / 3.0;
        let brackets = d.lo() <= p && (0..=30).all(|r| partial(r) <= d.hi()) && d.contains(limit);
        if !brackets || d.hi() > total.hi() {
            return Err(format!("R = {radius}: enclosure {d:?}, partial sum {p}"));
        }
    }
    Ok(format!("δ(0, 1) enclosures bracket 1 + 2Σ4^-n and stay below {}", total.hi()))
}

fn effectiveness() -> Outcome {
    let start = Instant::now();
    let m = SmoothedMetric::with_headroom(demo::power_demo(), WeightParams::default(), 6, 1).map_err(lib)?;
    let h = conj_metric_interval(&m, &GridOptions { points: 257 }).map_err(lib)?;
    let pairs: Vec<_> = (0..20).map(|k| (ratio(k, 10_000), ratio(k + 1, 10_000))).collect();
    let (rep, eff) = smoothing_effectiveness_report(&h, &InfWord::generator(0), &pairs).map_err(lib)?;
    within(start.elapsed(), 60)?;
    // |√a - √b| / |a - b| = 1 / (√a + √b).
    let closed = pairs
        .iter()
        .map(|(a, b)| 1.0 / (Interval64::from_ratio(a).mid().sqrt() + Interval64::from_ratio(b).mid().sqrt()))
        .fold(0.0, f64::max);
    if (eff.raw_sup_lower - closed).abs() > 1e-9 * closed {
        return Err(format!("raw quotient {} disagrees with closed form {closed}", eff.raw_sup_lower));
    }
    let detail = format!(
        "raw >= {:.2}, conjugated <= {:.3}, bound {:.3}, {:.1} s",
        eff.raw_sup_lower,
        eff.conjugated_sup_upper,
        eff.bound_upper,
        start.elapsed().as_secs_f64()
    );
    ensure(rep.all_passed() && eff.raw_sup_lower >= 40.0 && eff.conjugated_sup_upper <= 3.4, detail)
}

fn quasi_invariance() -> Outcome {
    let params = WeightParams::default();
    let sets = sample::point_pairs(&mut sample::rng(SEED), 20, 1 << 20);
    let mut checked = 0;
    for action in [demo::pl_demo(), demo::power_demo()] {
        let rank = action.rank();
        let s = SmoothedMeasure::with_headroom(action, params.clone(), 6, 2).map_err(lib)?;
        for (w, _) in enumerate_ball(GenCount::Finite(rank), 2).iter() {
            let rep = measure_quasi_invariance_check(&s, w, &sets).map_err(lib)?;
            if !rep.all_passed() {
                return Err(format!("word {w:?}: {} violations", rep.failures().count()));
            }
            checked += rep.records.len();
        }
    }
    Ok(format!("{checked} (word, set) checks for pl and power, zero violations"))
}

fn net() -> Outcome {
    let start = Instant::now();
    let net = NetGraph::build(2, 30, 2).map_err(lib)?;
    let inv = check_net_invariants(&net);
    let pairs = sample::lattice_pairs(&mut sample::rng(SEED), &net, 1000);
    let sub = quasi_subadditivity_check(&net, &pairs).map_err(lib)?;
    within(start.elapsed(), 30)?;
    let detail = format!(
        "{} vertices, max degree {} <= {}, 1000 pairs, {:.1} s",
        net.len(),
        net.max_degree(),
        packing_bound(2),
        start.elapsed().as_secs_f64()
    );
    ensure(inv.all_passed() && sub.all_passed() && net.max_degree() <= packing_bound(2), detail)
}

fn flow() -> Outcome {
    let net = NetGraph::build(1, 24, 2).map_err(lib)?;
    let params = LcParams::new("1", 12, 6).map_err(lib)?;
    let quad = LcQuadrature::new(&net, params.clone()).map_err(lib)?;
    let fine = LcQuadrature::new(&net, params.refined().map_err(lib)?).map_err(lib)?;
    let pairs: Vec<(f64, f64)> = sample::point_pairs(&mut sample::rng(SEED), 100, 1 << 20)
        .iter()
        .map(|(p, q)| (Interval64::from_ratio(p).mid(), Interval64::from_ratio(q).mid()))
        .collect();
    let times = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let lip = lc_lipschitz_check(&quad, &net, &Flow::Mobius, &times, &pairs).map_err(lib)?;
    let refine = lc_refinement_check(&quad, &fine, &Flow::Mobius, &pairs);
    let detail = format!(
        "lipschitz {}/{} times, refinement {}/{} pairs",
        lip.summary.passed,
        lip.records.len(),
        refine.summary.passed,
        refine.records.len()
    );
    ensure(lip.all_passed() && refine.all_passed(), detail)
}

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("dir entry").path())
        .map(|p| (PathBuf::from(p.file_name().expect("file name")), std::fs::read(&p).expect("readable")))
        .collect();
    files.sort();
    files
}

fn reproducible() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/pl.json");
    let cfg = RunConfig::from_path(&path).map_err(lib)?;
    let a = tempfile::tempdir().map_err(lib)?;
    let b = tempfile::tempdir().map_err(lib)?;
    cmd_verify(&cfg, a.path()).map_err(lib)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(lib)?;
    pool.install(|| cmd_verify(&cfg, b.path())).map_err(lib)?;
    let (fa, fb) = (read_tree(a.path()), read_tree(b.path()));
    ensure(fa == fb && !fa.is_empty(), format!("{} files byte-identical across thread counts", fa.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("sphere counts", sphere_counts),
        ("embedding", embedding),
        ("metric axioms", metric_axioms),
        ("lipschitz", lipschitz),
        ("tail honesty", tail_honesty),
        ("trivial action", trivial_closed_form),
        ("smoothing effectiveness", effectiveness),
        ("measure quasi-invariance", quasi_invariance),
        ("locally compact net", net),
        ("flow smoothing", flow),
        ("reproducibility", reproducible),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
