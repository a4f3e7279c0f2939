//! The strip-detour distance `d*` over `(H x P) - X` and generic finite
//! metric checks (axioms, local density).

use std::collections::HashMap;

use crate::error::{input, Result};
use crate::graph::{Density, Dist, Graph};
use crate::product::{product_vertex_distance, DistanceMatrix, ProductVertex};
use crate::sparsifier::StructuredSparsifier;

/// Length of the shortest walk in the path that starts at `u`, leaves the
/// rows `lo..=hi` and comes back to `v`.
pub fn interval_detour(u: i64, v: i64, lo: i64, hi: i64) -> Result<u64> {
    if !(lo <= u && u <= hi && lo <= v && v <= hi) {
        return input(format!("rows {u}, {v} not inside interval [{lo}, {hi}]"));
    }
    let below = (u - lo + 1) + (v - lo + 1);
    let above = (hi + 1 - u) + (hi + 1 - v);
    Ok(below.min(above) as u64)
}

/// As [`interval_detour`] inside the padded path `plo..=phi`; exits that
/// fall off the path are unavailable.
fn bounded_detour(u: i64, v: i64, lo: i64, hi: i64, plo: i64, phi: i64) -> Dist {
    let mut best = Dist::INF;
    if lo > plo {
        best = best.min(Dist::new(((u - lo + 1) + (v - lo + 1)) as u32));
    }
    if hi < phi {
        best = best.min(Dist::new(((hi + 1 - u) + (hi + 1 - v)) as u32));
    }
    best
}

/// `d*` oracle. Vertices are in the sparsifier's internal rows.
#[derive(Clone, Debug)]
pub struct StarMetric {
    sp: StructuredSparsifier,
    dh: DistanceMatrix,
    /// Component labels of `H - Y_{i,j}` per nonempty cut.
    labels: HashMap<(u32, i64), Vec<u32>>,
    /// Component labels of `H` itself, for strips without a cut.
    base: Vec<u32>,
}

fn labels_without(h: &Graph, removed: &[usize]) -> Vec<u32> {
    let view = h.without(removed).expect("cut inside H");
    let (lab, _) = view.components();
    lab.into_iter()
        .map(|l| if l == usize::MAX { u32::MAX } else { l as u32 })
        .collect()
}

impl StarMetric {
    pub fn new(h: &Graph, sp: StructuredSparsifier) -> Self {
        let dh = DistanceMatrix::new(h);
        let base = labels_without(h, &[]);
        let mut labels = HashMap::new();
        for c in sp.cells() {
            if !c.y.is_empty() {
                labels.insert((c.i, c.j), labels_without(h, &c.y));
            }
        }
        StarMetric {
            sp,
            dh,
            labels,
            base,
        }
    }

    pub fn sparsifier(&self) -> &StructuredSparsifier {
        &self.sp
    }

    pub fn h_distances(&self) -> &DistanceMatrix {
        &self.dh
    }

    /// Component label of `x` in `H - Y_{i,j}`; `u32::MAX` for `x` in the cut.
    pub fn strip_label(&self, i: u32, j: i64, x: usize) -> u32 {
        match self.labels.get(&(i, j)) {
            Some(l) => l[x],
            None => self.base[x],
        }
    }

    pub fn product_distance(&self, u: ProductVertex, v: ProductVertex) -> Dist {
        product_vertex_distance(&self.dh, u, v)
    }

    /// `d_{i,j}(u, v)`: the detour when both lie in `Q+_{i,j}` on different
    /// sides of the cut, else 0.
    pub fn d_ij(&self, i: u32, j: i64, u: ProductVertex, v: ProductVertex) -> Dist {
        if j < 0 || j >= self.sp.strip_count(i) {
            return Dist::ZERO;
        }
        let (lo, hi) = self.sp.widened_rows(i, j);
        let inside = |p: ProductVertex| lo <= p.row && p.row <= hi;
        if !inside(u) || !inside(v) {
            return Dist::ZERO;
        }
        if self.strip_label(i, j, u.h) == self.strip_label(i, j, v.h) {
            return Dist::ZERO;
        }
        let (plo, phi) = self.sp.padded_rows();
        bounded_detour(u.row, v.row, lo, hi, plo, phi)
    }

    /// `d*(u, v)`; errors if either endpoint is in `X`.
    pub fn d_star(&self, u: ProductVertex, v: ProductVertex) -> Result<Dist> {
        for p in [u, v] {
            if self.sp.contains(p) {
                return input(format!("({}, {}) is in X", p.h, p.row));
            }
            if p.h >= self.dh.len() {
                return input(format!("({}, {}) is not a vertex of H x P", p.h, p.row));
            }
        }
        Ok(self.d_star_unchecked(u, v))
    }

    pub(crate) fn d_star_unchecked(&self, u: ProductVertex, v: ProductVertex) -> Dist {
        let mut d = self.product_distance(u, v);
        if u == v || !d.is_finite() {
            return d;
        }
        for i in 0..=self.sp.log_big_n {
            // only strips whose widened rows contain u's row can contribute
            let mid = (u.row - 1).div_euclid(1i64 << i);
            for j in mid - 1..=mid + 1 {
                d = d.max(self.d_ij(i, j, u, v));
            }
        }
        d
    }

    /// Naive form of [`StarMetric::d_star`] scanning every strip.
    pub fn d_star_all_strips(&self, u: ProductVertex, v: ProductVertex) -> Dist {
        let mut d = self.product_distance(u, v);
        if u == v {
            return d;
        }
        for i in 0..=self.sp.log_big_n {
            for j in 0..self.sp.strip_count(i) {
                d = d.max(self.d_ij(i, j, u, v));
            }
        }
        d
    }

    /// Pairwise `d*` over a point list.
    pub fn matrix(&self, points: &[ProductVertex]) -> Result<FiniteMetric> {
        let k = points.len();
        let mut m = vec![0.0; k * k];
        for a in 0..k {
            for b in a + 1..k {
                let d = self.d_star(points[a], points[b])?.as_f64();
                m[a * k + b] = d;
                m[b * k + a] = d;
            }
        }
        Ok(FiniteMetric::from_raw(k, m))
    }
}

/// Symmetric distance table over `0..k`. Entries may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    k: usize,
    d: Vec<f64>,
}

impl FiniteMetric {
    /// Checks shape, symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality.
    pub fn new(k: usize, d: Vec<f64>) -> Result<Self> {
        let m = FiniteMetric::from_raw(k, d);
        if m.d.len() != k * k {
            return input(format!("{} entries for a {k}x{k} table", m.d.len()));
        }
        let report = verify_metric_axioms(&m, AxiomMode::Exhaustive);
        if let Some(v) = report.violations.first() {
            return input(format!("not a metric: {v}"));
        }
        Ok(m)
    }

    pub(crate) fn from_raw(k: usize, d: Vec<f64>) -> Self {
        FiniteMetric { k, d }
    }

    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut d = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    d[a * k + b] = f(a, b);
                }
            }
        }
        FiniteMetric::new(k, d)
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.k + b]
    }

    /// Metric induced on a subset, in the given order.
    pub fn restrict(&self, idx: &[usize]) -> FiniteMetric {
        let k = idx.len();
        let mut d = vec![0.0; k * k];
        for (a, &x) in idx.iter().enumerate() {
            for (b, &y) in idx.iter().enumerate() {
                d[a * k + b] = self.get(x, y);
            }
        }
        FiniteMetric { k, d }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomMode {
    Exhaustive,
    /// Uniformly sampled triples from the given seed.
    Sampled {
        triples: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub triples_checked: u64,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_REPORTED: usize = 20;

pub fn verify_metric_axioms(m: &FiniteMetric, mode: AxiomMode) -> AxiomReport {
    let k = m.len();
    let mut rep = AxiomReport::default();
    let push = |rep: &mut AxiomReport, s: String| {
        if rep.violations.len() < MAX_REPORTED {
            rep.violations.push(s);
        }
    };
    for a in 0..k {
        if m.get(a, a) != 0.0 {
            push(&mut rep, format!("d({a},{a}) = {}", m.get(a, a)));
        }
        for b in 0..k {
            let d = m.get(a, b);
            if d.is_nan() || d < 0.0 {
                push(&mut rep, format!("d({a},{b}) = {d}"));
            }
            if a != b && d == 0.0 {
                push(&mut rep, format!("d({a},{b}) = 0 for distinct points"));
            }
            if d != m.get(b, a) {
                push(&mut rep, format!("d({a},{b}) != d({b},{a})"));
            }
        }
    }
    let check = |rep: &mut AxiomReport, a: usize, b: usize, c: usize| {
        rep.triples_checked += 1;
        let lhs = m.get(a, c);
        let rhs = m.get(a, b) + m.get(b, c);
        if lhs > rhs {
            push(
                rep,
                format!("d({a},{c}) = {lhs} > d({a},{b}) + d({b},{c}) = {rhs}"),
            );
        }
    };
    match mode {
        AxiomMode::Exhaustive => {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        check(&mut rep, a, b, c);
                    }
                }
            }
        }
        AxiomMode::Sampled { triples, seed } => {
            if k > 0 {
                use rand::Rng;
                let mut rng = crate::seeds::stream(seed, "axioms/sample");
                for _ in 0..triples {
                    let (a, b, c) = (
                        rng.random_range(0..k),
                        rng.random_range(0..k),
                        rng.random_range(0..k),
                    );
                    check(&mut rep, a, b, c);
                }
            }
        }
    }
    rep
}

/// Exact `max (|B(x,r)| - 1) / r` over points and realized positive radii,
/// for integer-valued distances. Infinite distances never enter a ball.
pub fn metric_local_density(m: &FiniteMetric) -> Result<Density> {
    let k = m.len();
    if k == 0 {
        return input("local density of an empty point set is undefined");
    }
    let mut best = Density::from_integer(0);
    let mut row: Vec<u64> = Vec::with_capacity(k);
    for a in 0..k {
        row.clear();
        for b in 0..k {
            let d = m.get(a, b);
            if b != a && d.is_finite() {
                if d.fract() != 0.0 || d <= 0.0 {
                    return input(format!(
                        "distance d({a},{b}) = {d} is not a positive integer"
                    ));
                }
                row.push(d as u64);
            }
        }
        row.sort_unstable();
        let mut idx = 0;
        while idx < row.len() {
            let r = row[idx];
            while idx < row.len() && row[idx] == r {
                idx += 1;
            }
            let cand = Density::new(idx as u64, r);
            if cand > best {
                best = cand;
            }
        }
    }
    Ok(best)
}

/// Same as [`metric_local_density`] for arbitrary positive real distances,
/// returned as a float.
pub fn metric_local_density_f64(m: &FiniteMetric) -> Result<f64> {
    let k = m.len();
    if k == 0 {
        return input("local density of an empty point set is undefined");
    }
    let mut best: f64 = 0.0;
    let mut row = Vec::with_capacity(k);
    for a in 0..k {
        row.clear();
        row.extend(
            (0..k)
                .filter(|&b| b != a)
                .map(|b| m.get(a, b))
                .filter(|d| d.is_finite()),
        );
        row.sort_by(f64::total_cmp);
        let mut idx = 0;
        while idx < row.len() {
            let r = row[idx];
            while idx < row.len() && row[idx] == r {
                idx += 1;
            }
            best = best.max(idx as f64 / r);
        }
    }
    Ok(best)
}
