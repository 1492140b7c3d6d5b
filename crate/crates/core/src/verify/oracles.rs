//! Independent reimplementations used to cross-check the library.

use std::collections::HashSet;

use serde_json::json;

use crate::action::ActionSpec;
use crate::conjugacy::{conj_measure, conj_metric_interval, GridOptions, SmoothedMeasure};
use crate::demo;
use crate::error::Result;
use crate::freegroup::{sphere_count_f2, InfWord, Letter, ReducedWord, WeightParams};
use crate::lcgroup::{check_net_invariants, NetGraph};
use crate::smoothing::SmoothedMetric;
use crate::verify::checks::tail_honesty_check;
use crate::verify::report::{Record, Status, VerificationReport};
use crate::verify::sample;

const ALPHABET: [Letter; 4] = [Letter::X, Letter::X_INV, Letter::T, Letter::T_INV];

/// Cancels the leftmost adjacent inverse pair until none remain.
pub fn naive_reduce(mut v: Vec<Letter>) -> Vec<Letter> {
    while let Some(i) = v.windows(2).position(|w| w[0].cancels(w[1])) {
        v.drain(i..i + 2);
    }
    v
}

/// `t^i x^{±1} t^{-i}` for each letter, concatenated and reduced.
pub fn naive_embed(w: &InfWord) -> Vec<Letter> {
    let mut raw = Vec::new();
    for (i, sign) in w.letters() {
        raw.extend(std::iter::repeat_n(Letter::T, i as usize));
        raw.push(if sign > 0 { Letter::X } else { Letter::X_INV });
        raw.extend(std::iter::repeat_n(Letter::T_INV, i as usize));
    }
    naive_reduce(raw)
}

/// Counts reduced words of length `r` among all `4^r` raw words and checks
/// `4·3^{r-1}`, plus agreement of the library reducer on every raw word.
pub fn sphere_count_oracle(max_r: u32) -> Record {
    let mut status = Status::Pass;
    let mut counts = Vec::new();
    for r in 0..=max_r {
        let mut seen = HashSet::new();
        let mut reducer_agrees = true;
        for code in 0..4usize.pow(r) {
            let raw: Vec<Letter> = (0..r).map(|k| ALPHABET[(code >> (2 * k)) & 3]).collect();
            let reduced = naive_reduce(raw.clone());
            reducer_agrees &= ReducedWord::reduce(raw).letters() == reduced.as_slice();
            if reduced.len() == r as usize {
                seen.insert(reduced);
            }
        }
        let expected = sphere_count_f2(r);
        if seen.len() as u128 != expected || !reducer_agrees {
            status = Status::Fail;
        }
        counts.push(json!({ "r": r, "counted": seen.len(), "expected": expected as u64, "reducer_agrees": reducer_agrees }));
    }
    Record::new("oracle_sphere_counts", status).inputs(json!({ "max_r": max_r })).computed(json!(counts))
}

/// Every word with at most `syllables` syllables, indices `< indices` and
/// exponents `0 < |e| <= max_exp`.
pub fn small_words(syllables: usize, indices: u32, max_exp: i32) -> Vec<InfWord> {
    let exps: Vec<i32> = (1..=max_exp).flat_map(|e| [e, -e]).collect();
    let mut out = vec![Vec::<(u32, i32)>::new()];
    let mut frontier = out.clone();
    for _ in 0..syllables {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..indices {
                if w.last().is_some_and(|&(j, _)| j == i) {
                    continue;
                }
                for &e in &exps {
                    let mut v = w.clone();
                    v.push((i, e));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.into_iter().map(InfWord::from_syllables).collect()
}

/// The embedding and its length formula against substitution and naive
/// reduction, exhaustively on small words, plus injectivity.
pub fn embedding_oracle() -> Record {
    let words = small_words(4, 4, 2);
    let mut mismatches = 0usize;
    let mut images = HashSet::new();
    for w in &words {
        let naive = naive_embed(w);
        if naive.len() as u32 != w.embedded_length() || w.higman_embed().letters() != naive.as_slice() {
            mismatches += 1;
        }
        images.insert(naive);
    }
    let injective = images.len() == words.len();
    let status = if mismatches == 0 && injective { Status::Pass } else { Status::Fail };
    Record::new("oracle_embedding", status)
        .inputs(json!({ "words": words.len(), "syllables": 4, "indices": 4, "max_exponent": 2 }))
        .computed(json!({ "mismatches": mismatches, "distinct_images": images.len() }))
}

/// The metric and measure cumulative functions agree for an
/// orientation-preserving interval action, where `δ(0, p) = ν([0, p])`.
pub fn cdf_coincidence(action: &ActionSpec, params: &WeightParams, radius: u32, points: usize) -> Result<Record> {
    let opts = GridOptions { points };
    let metric = conj_metric_interval(&SmoothedMetric::new(action.clone(), params.clone(), radius)?, &opts)?;
    let measure = conj_measure(&SmoothedMeasure::new(action.clone(), params.clone(), radius)?, &opts)?;
    let mut worst = 0.0f64;
    let mut overlap = true;
    for (a, b) in metric.values().iter().zip(measure.values()) {
        overlap &= a.intersect(b).is_some();
        worst = worst.max((a.mid() - b.mid()).abs());
    }
    let status = if overlap { Status::Pass } else { Status::Fail };
    Ok(Record::new("oracle_cdf_coincidence", status)
        .inputs(json!({ "R": radius, "points": points, "exact": action.is_exact() }))
        .computed(json!({ "max_midpoint_gap": worst })))
}

/// Sphere counts, embedding, tail honesty on 50 random pairs for two
/// demos, metric/measure coincidence, and net invariants.
pub fn oracle_pack(seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("oracles", seed);
    report.push(sphere_count_oracle(8));
    report.push(embedding_oracle());

    let params = WeightParams::default();
    let mut rng = sample::rng(seed);
    for (name, action) in [("pl", demo::pl_demo()), ("power", demo::power_demo())] {
        let pairs = sample::point_pairs(&mut rng, 50, 1 << 12);
        let honesty = tail_honesty_check(&action, &params, 4, &pairs)?;
        let status = honesty.status();
        let margin = honesty.records.iter().filter_map(|r| r.margin).fold(f64::INFINITY, f64::min);
        report.push(
            Record::new("oracle_tail_honesty", status)
                .inputs(json!({ "demo": name, "pairs": pairs.len(), "R": 4 }))
                .computed(json!({ "passed": honesty.summary.passed }))
                .margin(margin),
        );
    }

    report.push(cdf_coincidence(&demo::pl_demo(), &params, 4, 33)?);
    report.push(cdf_coincidence(&demo::mobius_demo(), &params, 8, 33)?);

    for (dim, radius) in [(1, 24), (2, 12)] {
        let net = NetGraph::build(dim, radius, 2)?;
        let inv = check_net_invariants(&net);
        report.push(
            Record::new("oracle_net_invariants", inv.status())
                .inputs(json!({ "d": dim, "L": radius, "vertices": net.len() }))
                .computed(json!({ "checks": inv.summary })),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_word_count() {
        // 1 + 16 + 16·12 + 16·12² + 16·12³
        assert_eq!(small_words(4, 4, 2).len(), 30161);
    }

    #[test]
    fn naive_reduce_examples() {
        let w = naive_reduce(vec![Letter::X, Letter::T, Letter::T_INV, Letter::X_INV, Letter::T]);
        assert_eq!(w, vec![Letter::T]);
    }

    #[test]
    fn pack_passes() {
        let rep = oracle_pack(7).unwrap();
        assert!(rep.all_passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
    }
}
