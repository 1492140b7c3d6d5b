use lipsmooth::conjugacy::{conj_metric_interval, GridOptions};
use lipsmooth::demo;
use lipsmooth::freegroup::{weight_total, InfWord, WeightParams};
use lipsmooth::smoothing::{smoothed_matrix, SmoothedMetric};
use lipsmooth::verify::{
    ball_inclusion_search, lipschitz_ratio_report, metric_axioms_check, sample, smoothing_effectiveness_report,
    Status,
};
use lipsmooth::{ratio, Rational};

fn grid_points(n: i64) -> Vec<Rational> {
    (0..n).map(|k| ratio(2 * k + 1, 2 * n)).collect()
}

#[test]
fn pl_metric_axioms_exact() {
    let m = SmoothedMetric::new(demo::pl_demo(), WeightParams::default(), 6).unwrap();
    let matrix = smoothed_matrix(&m, &grid_points(20)).unwrap();
    assert!(matrix.exact_grades.is_some());
    let rep = metric_axioms_check(&m, &matrix);
    assert!(rep.all_passed(), "{:#?}", rep.records);
}

#[test]
fn power_metric_axioms_enclosed() {
    let m = SmoothedMetric::new(demo::power_demo(), WeightParams::default(), 12).unwrap();
    let matrix = smoothed_matrix(&m, &grid_points(12)).unwrap();
    let rep = metric_axioms_check(&m, &matrix);
    assert!(rep.all_passed(), "{:#?}", rep.records);
}

#[test]
fn pl_lipschitz_words_up_to_three() {
    let m = SmoothedMetric::with_headroom(demo::pl_demo(), WeightParams::default(), 6, 3).unwrap();
    let pairs = sample::point_pairs(&mut sample::rng(1), 40, 1 << 16);
    let (rep, rows) = lipschitz_ratio_report(&m, 3, &pairs).unwrap();
    assert!(rep.all_passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
    assert!(rows.iter().any(|r| r.word.is_identity()));
    assert!(rows.iter().all(|r| r.length <= 3));
}

#[test]
fn square_root_is_tamed() {
    let m = SmoothedMetric::with_headroom(demo::power_demo(), WeightParams::default(), 12, 1).unwrap();
    let h = conj_metric_interval(&m, &GridOptions { points: 65 }).unwrap();
    let pairs: Vec<_> = (0..20).map(|k| (ratio(k, 10_000), ratio(k + 1, 10_000))).collect();
    let (rep, eff) = smoothing_effectiveness_report(&h, &InfWord::generator(0), &pairs).unwrap();
    assert!(rep.all_passed(), "{:#?}", rep.records);
    assert!(eff.raw_sup_lower >= 40.0, "{eff:?}");
    assert!(eff.conjugated_sup_upper <= 3.4, "{eff:?}");
}

#[test]
fn ball_inclusion_power_and_trivial() {
    let params = WeightParams::default();
    let (b, rec) = ball_inclusion_search(&demo::power_demo(), &params, &ratio(0, 1), 0.25, 257).unwrap();
    assert_eq!(rec.status, Status::Pass, "{rec:?}");
    assert!(b.r_prime.unwrap() > 0.0);

    let total = weight_total(&params).hi();
    let (b, rec) = ball_inclusion_search(&demo::trivial_demo(1), &params, &ratio(1, 2), 0.25, 257).unwrap();
    assert_eq!(rec.status, Status::Pass, "{rec:?}");
    // For the trivial action δ = S·δ̂ with S below the full weight sum.
    assert!(b.r_prime.unwrap() >= 0.25 / total / 2.0);
}
