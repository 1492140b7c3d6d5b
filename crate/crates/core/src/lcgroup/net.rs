use std::collections::{HashMap, VecDeque};

use num::{BigInt, Signed};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::scalar::Rational;
use crate::verify::report::{Record, Status, VerificationReport};

/// Largest possible vertex degree: disjoint radius-1/2 balls around the
/// neighbours fit in a ball of radius 3.5.
pub fn packing_bound(dim: usize) -> usize {
    match dim {
        1 => 6,
        _ => 48,
    }
}

/// A maximal 1-separated set in the ball of radius `L` in ℝᵈ, found by a
/// greedy scan over the lattice `(2^{-j} ℤ)ᵈ`, with edges between vertices at
/// distance at most 3 and graph distances from the origin.
///
/// Coordinates are stored as integer lattice indices so all distance
/// comparisons are exact.
#[derive(Clone, Debug)]
pub struct NetGraph {
    dim: usize,
    radius: u32,
    scale: i64,
    vertices: Vec<[i64; 2]>,
    adjacency: Vec<Vec<usize>>,
    bfs: Vec<u32>,
    buckets: HashMap<[i64; 2], Vec<usize>>,
}

fn norm2(k: [i64; 2]) -> i64 {
    k[0] * k[0] + k[1] * k[1]
}

fn dist2(a: [i64; 2], b: [i64; 2]) -> i64 {
    norm2([a[0] - b[0], a[1] - b[1]])
}

impl NetGraph {
    /// `scan_exponent = j` gives lattice step `2^{-j}`; `j >= 2`.
    pub fn build(dim: usize, radius: u32, scan_exponent: u32) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid("d", "dimension must be 1 or 2"));
        }
        if radius < 5 {
            return Err(invalid("L", "domain radius must be at least 5"));
        }
        if !(2..=8).contains(&scan_exponent) {
            return Err(invalid("scan_step", "lattice step must be 2^-j with 2 <= j <= 8"));
        }
        let scale = 1i64 << scan_exponent;
        let reach = radius as i64 * scale;
        let mut candidates: Vec<[i64; 2]> = Vec::new();
        let y_range = if dim == 2 { -reach..=reach } else { 0..=0 };
        for y in y_range {
            for x in -reach..=reach {
                if norm2([x, y]) <= reach * reach {
                    candidates.push([x, y]);
                }
            }
        }
        candidates.sort_by_key(|k| (norm2(*k), *k));

        let mut net = NetGraph {
            dim,
            radius,
            scale,
            vertices: Vec::new(),
            adjacency: Vec::new(),
            bfs: Vec::new(),
            buckets: HashMap::new(),
        };
        for c in candidates {
            if net.within(c, 1).next().is_none() {
                let id = net.vertices.len();
                net.vertices.push(c);
                net.buckets.entry(net.bucket(c)).or_default().push(id);
            }
        }
        net.adjacency = (0..net.vertices.len())
            .map(|i| net.within(net.vertices[i], 3).filter(|&j| j != i).collect())
            .collect();
        for list in &mut net.adjacency {
            list.sort_unstable();
        }
        net.bfs = net.breadth_first();
        Ok(net)
    }

    fn bucket(&self, k: [i64; 2]) -> [i64; 2] {
        [k[0].div_euclid(self.scale), k[1].div_euclid(self.scale)]
    }

    /// Vertices within distance `units` (an integer) of lattice point `k`.
    fn within(&self, k: [i64; 2], units: i64) -> impl Iterator<Item = usize> + '_ {
        let b = self.bucket(k);
        let limit = (units * self.scale) * (units * self.scale);
        let span = units;
        let ys = if self.dim == 2 { -span..=span } else { 0..=0 };
        ys.flat_map(move |dy| (-span..=span).map(move |dx| [b[0] + dx, b[1] + dy]))
            .filter_map(move |cell| self.buckets.get(&cell))
            .flatten()
            .copied()
            .filter(move |&v| dist2(self.vertices[v], k) <= limit)
    }

    fn breadth_first(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        let mut queue = VecDeque::new();
        dist[0] = 0;
        queue.push_back(0);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Lattice step `2^{-j}`.
    pub fn scan_step(&self) -> f64 {
        1.0 / self.scale as f64
    }

    /// Lattice points per unit length.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec<f64> {
        self.vertices[i][..self.dim].iter().map(|&k| k as f64 / self.scale as f64).collect()
    }

    pub fn lattice_vertex(&self, i: usize) -> [i64; 2] {
        self.vertices[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn bfs_distance(&self, i: usize) -> u32 {
        self.bfs[i]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest `|g|` at which the norm is trusted: `L - 4`.
    pub fn guard(&self) -> f64 {
        self.radius as f64 - 4.0
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices `v` with `|g - v| <= 1`, decided exactly.
    pub fn covering_vertices(&self, g: &[f64]) -> Result<Vec<usize>> {
        if g.len() != self.dim {
            return Err(invalid("g", format!("expected {} coordinates", self.dim)));
        }
        let gk = [g[0] * self.scale as f64, if self.dim == 2 { g[1] * self.scale as f64 } else { 0.0 }];
        let center = [gk[0].floor() as i64, gk[1].floor() as i64];
        let exact: Vec<Rational> = g
            .iter()
            .map(|&x| Rational::from_float(x).ok_or_else(|| invalid("g", "coordinates must be finite")))
            .collect::<Result<_>>()?;
        let scale = BigInt::from(self.scale);
        let mut out: Vec<usize> = self
            .within(center, 2)
            .filter(|&v| {
                let mut d2 = Rational::from_integer(0.into());
                for (axis, x) in exact.iter().enumerate() {
                    let vc = Rational::new(BigInt::from(self.vertices[v][axis]), scale.clone());
                    let diff = (x - vc).abs();
                    d2 += &diff * &diff;
                }
                d2 <= Rational::from_integer(1.into())
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// `inf{ d_Γ(0, v) : |g - v| <= 1 }` for `|g| <= L - 4`.
    pub fn lc_norm(&self, g: &[f64]) -> Result<u32> {
        let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > self.guard() {
            return Err(Error::OutsideGuard { norm: len, limit: self.guard() });
        }
        self.covering_vertices(g)?
            .into_iter()
            .map(|v| self.bfs[v])
            .min()
            .ok_or_else(|| Error::NotCertified(format!("{g:?} is not within 1 of a vertex")))
    }

    /// Norm of a lattice point given by integer indices.
    pub fn lc_norm_lattice(&self, k: [i64; 2]) -> Result<u32> {
        let g: Vec<f64> = k[..self.dim].iter().map(|&c| c as f64 / self.scale as f64).collect();
        self.lc_norm(&g)
    }

    /// `#{v : d_Γ(0, v) <= r}` for `r = 0, 1, …` up to the largest distance.
    pub fn growth_profile(&self) -> Vec<usize> {
        let max = self.bfs.iter().copied().filter(|&d| d != u32::MAX).max().unwrap_or(0) as usize;
        let mut shells = vec![0usize; max + 1];
        for &d in &self.bfs {
            if d != u32::MAX {
                shells[d as usize] += 1;
            }
        }
        let mut acc = 0;
        shells
            .into_iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    /// Slope `a` of the linear bound `‖g‖ >= a(|g| - 1)`: the least
    /// `d_Γ(0, v)/|v|` over vertices `v ≠ 0`. Every `g` is covered by some `v`
    /// with `|v| >= |g| - 1`.
    pub fn linear_lower_slope(&self) -> Result<f64> {
        let mut a = f64::INFINITY;
        for (i, k) in self.vertices.iter().enumerate().skip(1) {
            let len = (norm2(*k) as f64).sqrt() / self.scale as f64;
            let d = self.bfs[i];
            if d == u32::MAX {
                return Err(Error::DegenerateNet(0.0));
            }
            // Round the ratio down so the bound stays valid.
            a = a.min((d as f64 / len).next_down());
        }
        if !(a > 0.0) {
            return Err(Error::DegenerateNet(a));
        }
        Ok(a)
    }

    /// Exponential growth rate measured from the last shells that the
    /// boundary does not distort: `ln(c(r) / c(r/2)) / (r/2)`.
    pub fn measured_growth_rate(&self) -> f64 {
        let profile = self.growth_profile();
        let interior = profile.len().saturating_sub(1) / 2;
        let r = interior.max(2);
        let half = r / 2;
        let (Some(&top), Some(&mid)) = (profile.get(r), profile.get(half)) else {
            return 0.0;
        };
        (top as f64 / mid as f64).ln() / (r - half) as f64
    }
}

/// Exhaustive checks of separation, lattice covering, edge rule,
/// connectivity, degree bound, and BFS consistency.
pub fn check_net_invariants(net: &NetGraph) -> VerificationReport {
    let mut report = VerificationReport::new("net_invariants", 0);
    let n = net.len();
    let s2 = net.scale * net.scale;

    let mut separation_ok = true;
    let mut edge_ok = true;
    for u in 0..n {
        for v in u + 1..n {
            let d2 = dist2(net.vertices[u], net.vertices[v]);
            separation_ok &= d2 > s2;
            let adjacent = net.adjacency[u].binary_search(&v).is_ok();
            edge_ok &= adjacent == (d2 <= 9 * s2);
        }
    }
    report.push(Record::new("net_separation", ok(separation_ok)).inputs(json!({ "vertices": n })));
    report.push(Record::new("net_edge_rule", ok(edge_ok)).inputs(json!({ "edges": net.edges().len() })));

    let reach = net.radius as i64 * net.scale;
    let mut uncovered = 0usize;
    let mut lattice_points = 0usize;
    let ys = if net.dim == 2 { -reach..=reach } else { 0..=0 };
    for y in ys {
        for x in -reach..=reach {
            if norm2([x, y]) <= reach * reach {
                lattice_points += 1;
                if net.within([x, y], 1).next().is_none() {
                    uncovered += 1;
                }
            }
        }
    }
    report.push(
        Record::new("net_covering", ok(uncovered == 0))
            .inputs(json!({ "lattice_points": lattice_points, "scan_step": net.scan_step() }))
            .computed(json!({ "uncovered": uncovered })),
    );

    let unreached = net.bfs.iter().filter(|&&d| d == u32::MAX).count();
    report.push(Record::new("net_connectivity", ok(unreached == 0)).computed(json!({ "unreached": unreached })));

    let max_degree = net.max_degree();
    let bound = packing_bound(net.dim);
    report.push(
        Record::new("net_degree_bound", ok(max_degree <= bound))
            .computed(json!({ "max_degree": max_degree }))
            .bound(json!(bound))
            .margin(bound as f64 - max_degree as f64),
    );

    let mut bfs_ok = net.bfs[0] == 0 && net.vertices[0] == [0, 0];
    for (u, list) in net.adjacency.iter().enumerate() {
        for &v in list {
            bfs_ok &= net.bfs[u].abs_diff(net.bfs[v]) <= 1;
        }
        if u != 0 {
            bfs_ok &= list.iter().any(|&v| net.bfs[v] + 1 == net.bfs[u]);
        }
    }
    report.push(Record::new("net_bfs_consistency", ok(bfs_ok)));
    report
}

fn ok(b: bool) -> Status {
    if b {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Checks `|‖g + h‖ - ‖g‖| <= 3‖h‖ + 1` on lattice samples.
pub fn quasi_subadditivity_check(net: &NetGraph, samples: &[([i64; 2], [i64; 2])]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("quasi_subadditivity", 0);
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (g, h) in samples {
        let gh = [g[0] + h[0], g[1] + h[1]];
        let ng = net.lc_norm_lattice(*g)? as i64;
        let nh = net.lc_norm_lattice(*h)? as i64;
        let ngh = net.lc_norm_lattice(gh)? as i64;
        let lhs = (ngh - ng).abs();
        let ratio = (lhs - 1) as f64 / (3 * nh).max(1) as f64;
        worst = worst.max(ratio);
        if lhs > 3 * nh + 1 {
            violations.push(json!({ "g": g, "h": h, "norms": [ng, nh, ngh] }));
        }
    }
    let status = ok(violations.is_empty());
    report.push(
        Record::new("quasi_subadditivity", status)
            .inputs(json!({ "samples": samples.len(), "scale": net.scale }))
            .computed(json!({ "max_ratio": worst, "violations": violations }))
            .bound(json!(1.0))
            .margin(1.0 - worst),
    );
    Ok(report)
}

/// Checks `|‖g‖ - ‖-g‖| <= 1` on lattice samples.
pub fn norm_symmetry_check(net: &NetGraph, samples: &[[i64; 2]]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("norm_symmetry", 0);
    let mut worst = 0i64;
    for g in samples {
        let a = net.lc_norm_lattice(*g)? as i64;
        let b = net.lc_norm_lattice([-g[0], -g[1]])? as i64;
        worst = worst.max((a - b).abs());
    }
    report.push(
        Record::new("norm_symmetry", ok(worst <= 1))
            .inputs(json!({ "samples": samples.len() }))
            .computed(json!({ "max_difference": worst }))
            .bound(json!(1))
            .margin(1.0 - worst as f64),
    );
    Ok(report)
}
