use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The seeded generator behind every sampled check.
pub type SampleRng = ChaCha8Rng;

use crate::lcgroup::NetGraph;
use crate::scalar::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` pairs `p < q` of points `k / denom` in `[0, 1]`.
pub fn point_pairs(rng: &mut ChaCha8Rng, n: usize, denom: i64) -> Vec<(Rational, Rational)> {
    (0..n)
        .map(|_| {
            let a = rng.gen_range(0..=denom);
            let mut b = rng.gen_range(0..=denom);
            while b == a {
                b = rng.gen_range(0..=denom);
            }
            let (a, b) = (a.min(b), a.max(b));
            (Rational::new(a.into(), denom.into()), Rational::new(b.into(), denom.into()))
        })
        .collect()
}

/// Pairs of lattice points `g`, `h` with `g`, `h`, `g + h` inside the guard.
pub fn lattice_pairs(rng: &mut ChaCha8Rng, net: &NetGraph, n: usize) -> Vec<([i64; 2], [i64; 2])> {
    let reach = (net.guard() * net.scale() as f64).floor() as i64;
    let inside = |k: [i64; 2]| k[0] * k[0] + k[1] * k[1] <= reach * reach;
    let draw = |rng: &mut ChaCha8Rng| loop {
        let x = rng.gen_range(-reach..=reach);
        let y = if net.dim() == 2 { rng.gen_range(-reach..=reach) } else { 0 };
        if inside([x, y]) {
            return [x, y];
        }
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let g = draw(rng);
        let h = draw(rng);
        if inside([g[0] + h[0], g[1] + h[1]]) {
            out.push((g, h));
        }
    }
    out
}
