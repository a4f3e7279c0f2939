//! Random layered decompositions of `H x P`, the trimmed instances, the
//! coordinate functions built from them and projection orderings.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{input, Error, Result};
use crate::graph::{bfs_layering, floor_log2, Dist, Graph, Layering, VertexOrdering};
use crate::product::ProductVertex;
use crate::seeds;
use crate::star_metric::StarMetric;
use crate::volumes::{factorial, simplex_volume, tree_volume};

/// `ceil(a k ln n)`, coordinates per scale.
pub fn per_scale(n: usize, k: usize, a: f64) -> usize {
    if n < 2 {
        return 0;
    }
    (a * k as f64 * (n as f64).ln()).ceil() as usize
}

/// `floor(1 + log n) * ceil(a k ln n)`.
pub fn full_dimension(n: usize, k: usize, a: f64) -> usize {
    if n < 2 {
        return 0;
    }
    (floor_log2(n) as usize + 1) * per_scale(n, k, a)
}

/// `sqrt(ceil(a k ln n)) / (640 sqrt 2)`.
pub fn zeta(n: usize, k: usize, a: f64) -> f64 {
    (per_scale(n, k, a) as f64).sqrt() / (640.0 * 2f64.sqrt())
}

/// `1920 sqrt(2 floor(1 + log n))`.
pub fn distortion_bound(n: usize) -> f64 {
    1920.0 * (2.0 * (floor_log2(n.max(1)) as f64 + 1.0)).sqrt()
}

/// Band decomposition of `H` for one `(delta, r_H)`: component labels of the
/// subgraphs induced by `delta` consecutive BFS layers, and each vertex's
/// distance in `H` to the outside of its component.
#[derive(Clone, Debug)]
pub struct HBands {
    pub band: Vec<i64>,
    pub comp: Vec<u32>,
    pub dist_out: Vec<Dist>,
}

fn h_bands(h: &Graph, layering: &Layering, delta: i64, r_h: i64) -> HBands {
    let n = h.vertex_count();
    let band: Vec<i64> = (0..n)
        .map(|v| (layering.layer(v) as i64 - r_h).div_euclid(delta))
        .collect();
    let mut comp = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &w in h.neighbors(u) {
                if comp[w] == u32::MAX && band[w] == band[u] {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    let mut dist_out = vec![Dist::INF; n];
    let mut queue = std::collections::VecDeque::new();
    for v in 0..n {
        if h.neighbors(v).iter().any(|&w| comp[w] != comp[v]) {
            dist_out[v] = Dist::new(1);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        let nd = dist_out[u] + Dist::new(1);
        for &w in h.neighbors(u) {
            if comp[w] == comp[u] && !dist_out[w].is_finite() {
                dist_out[w] = nd;
                queue.push_back(w);
            }
        }
    }
    HBands {
        band,
        comp,
        dist_out,
    }
}

/// Partition of `H x P` into cells `H_a x P_b` for one `(delta, r_H, r_P)`.
#[derive(Clone, Debug)]
pub struct DecompInstance {
    pub delta: i64,
    pub r_h: i64,
    pub r_p: i64,
    pub bands: HBands,
}

impl DecompInstance {
    /// `(a, b)` block of a product vertex.
    pub fn cell(&self, v: ProductVertex) -> (i64, i64) {
        (
            self.bands.band[v.h],
            (v.row - self.r_p).div_euclid(self.delta),
        )
    }

    /// Component of the cell containing `v`, as `(H-band component, b)`.
    pub fn component(&self, v: ProductVertex) -> (u32, i64) {
        (
            self.bands.comp[v.h],
            (v.row - self.r_p).div_euclid(self.delta),
        )
    }

    /// `d_{H x P}(v, complement of v's component)`.
    pub fn distance_out(&self, v: ProductVertex) -> Dist {
        let b = (v.row - self.r_p).div_euclid(self.delta);
        let lo = self.r_p + b * self.delta;
        let hi = lo + self.delta - 1;
        let row_exit = Dist::new((v.row - lo + 1).min(hi + 1 - v.row) as u32);
        self.bands.dist_out[v.h].min(row_exit)
    }
}

/// Cells of `H x P` for layering `layering` of `H`. `delta` must be a power
/// of two; the offsets lie in `0..delta`.
pub fn delta_decompose(
    h: &Graph,
    layering: &Layering,
    delta: i64,
    r_h: i64,
    r_p: i64,
) -> Result<DecompInstance> {
    if delta < 1 || delta.count_ones() != 1 {
        return input(format!("delta = {delta} is not a power of two"));
    }
    if !(0..delta).contains(&r_h) || !(0..delta).contains(&r_p) {
        return input(format!("offsets ({r_h}, {r_p}) outside 0..{delta}"));
    }
    if layering.len() != h.vertex_count() {
        return input("layering does not match H");
    }
    Ok(DecompInstance {
        delta,
        r_h,
        r_p,
        bands: h_bands(h, layering, delta, r_h),
    })
}

/// One sampled instance: offsets, and for every point its components in the
/// decomposition `I` and the trimmed `J`, its distance to the complement of
/// its `I`-component, and its `alpha`.
#[derive(Clone, Debug)]
pub struct InstanceData {
    pub scale: u32,
    pub index: usize,
    pub delta: i64,
    pub r_h: i64,
    pub r_p: i64,
    /// `(H-band component, row band)` per point.
    pub i_key: Vec<(u32, i64)>,
    /// `(H-band component, row band, J label)` per point.
    pub j_key: Vec<(u32, i64, u32)>,
    pub dist: Vec<Dist>,
    pub alpha: Vec<f64>,
}

impl InstanceData {
    pub fn coordinate(&self, p: usize) -> f64 {
        (1.0 + self.alpha[p]) * self.dist[p].as_f64()
    }
}

/// Builds instances for a fixed `H`, sparsifier and point set.
pub struct InstanceSampler<'a> {
    h: &'a Graph,
    sm: &'a StarMetric,
    layering: Layering,
    points: &'a [ProductVertex],
    seed: u64,
    band_cache: HashMap<(i64, i64), HBands>,
    j_cache: HashMap<(i64, i64, Vec<(u32, i64)>), Vec<u32>>,
}

impl<'a> InstanceSampler<'a> {
    /// `points` use the sparsifier's internal rows and must avoid `X`.
    pub fn new(
        h: &'a Graph,
        sm: &'a StarMetric,
        points: &'a [ProductVertex],
        seed: u64,
    ) -> Result<Self> {
        if h.vertex_count() == 0 {
            return input("H has no vertices");
        }
        let sp = sm.sparsifier();
        for p in points {
            if p.h >= h.vertex_count() {
                return input(format!("point ({}, {}) outside H", p.h, p.row));
            }
            if sp.contains(*p) {
                return input(format!("point ({}, {}) lies in X", p.h, p.row));
            }
        }
        Ok(InstanceSampler {
            h,
            sm,
            layering: bfs_layering(h, 0)?,
            points,
            seed,
            band_cache: HashMap::new(),
            j_cache: HashMap::new(),
        })
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    /// Bands of `H` for `(delta, r_H)`.
    pub fn bands(&mut self, delta: i64, r_h: i64) -> &HBands {
        let (h, layering) = (self.h, &self.layering);
        self.band_cache
            .entry((delta, r_h))
            .or_insert_with(|| h_bands(h, layering, delta, r_h))
    }

    /// Cells whose widened strip contains all rows `lo..=hi` and whose cut is
    /// nonempty.
    pub fn covering_cells(&self, lo: i64, hi: i64) -> Vec<(u32, i64)> {
        let sp = self.sm.sparsifier();
        let mut out = Vec::new();
        for i in 0..=sp.log_big_n {
            let s = 1i64 << i;
            let first = (hi + s - 1).div_euclid(s) - 2;
            let last = (lo - 1).div_euclid(s) + 1;
            for j in first.max(0)..=last.min(sp.strip_count(i) - 1) {
                let (plo, phi) = sp.widened_rows(i, j);
                if plo <= lo && hi <= phi && !sp.y(i, j).is_empty() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Labels of `H[A] - Y_b` for every band component `A`, where `Y_b`
    /// collects the cuts of `cells`; `u32::MAX` inside `Y_b`.
    fn j_labels(&mut self, delta: i64, r_h: i64, cells: Vec<(u32, i64)>) -> &Vec<u32> {
        let key = (delta, r_h, cells);
        if !self.j_cache.contains_key(&key) {
            let n = self.h.vertex_count();
            let mut cut = vec![false; n];
            for &(i, j) in &key.2 {
                for &y in self.sm.sparsifier().y(i, j) {
                    cut[y] = true;
                }
            }
            let comp = self.bands(delta, r_h).comp.clone();
            let mut lab = vec![u32::MAX; n];
            let mut next = 0;
            let mut stack = Vec::new();
            for s in 0..n {
                if cut[s] || lab[s] != u32::MAX {
                    continue;
                }
                lab[s] = next;
                stack.push(s);
                while let Some(u) = stack.pop() {
                    for &w in self.h.neighbors(u) {
                        if !cut[w] && lab[w] == u32::MAX && comp[w] == comp[u] {
                            lab[w] = next;
                            stack.push(w);
                        }
                    }
                }
                next += 1;
            }
            self.j_cache.insert(key.clone(), lab);
        }
        &self.j_cache[&key]
    }

    /// Drops cached per-scale tables.
    pub fn clear_cache(&mut self) {
        self.band_cache.clear();
        self.j_cache.clear();
    }

    /// Instance `(scale, index)`; everything random comes from the stream
    /// `inst/i={scale}/j={index}`.
    pub fn instance(&mut self, scale: u32, index: usize) -> Result<InstanceData> {
        let delta = 1i64 << scale;
        let mut rng = seeds::stream(self.seed, &format!("inst/i={scale}/j={index}"));
        let r_h = rng.random_range(0..delta);
        let r_p = rng.random_range(0..delta);
        self.instance_with_offsets(scale, index, r_h, r_p, &mut rng)
    }

    /// Instance with explicit offsets; `alpha`s are drawn from `rng` in
    /// sorted `J`-component order.
    pub fn instance_with_offsets(
        &mut self,
        scale: u32,
        index: usize,
        r_h: i64,
        r_p: i64,
        rng: &mut impl Rng,
    ) -> Result<InstanceData> {
        let delta = 1i64 << scale;
        if !(0..delta).contains(&r_h) || !(0..delta).contains(&r_p) {
            return input(format!("offsets ({r_h}, {r_p}) outside 0..{delta}"));
        }
        let points = self.points;
        let m = points.len();
        let mut i_key = Vec::with_capacity(m);
        let mut dist = Vec::with_capacity(m);
        let mut row_band = Vec::with_capacity(m);
        {
            let bands = self.bands(delta, r_h);
            for p in points {
                let b = (p.row - r_p).div_euclid(delta);
                let lo = r_p + b * delta;
                let hi = lo + delta - 1;
                let row_exit = Dist::new((p.row - lo + 1).min(hi + 1 - p.row) as u32);
                i_key.push((bands.comp[p.h], b));
                dist.push(bands.dist_out[p.h].min(row_exit));
                row_band.push((b, lo, hi));
            }
        }
        let mut by_band: BTreeMap<i64, Vec<(u32, i64)>> = BTreeMap::new();
        for &(b, lo, hi) in &row_band {
            by_band
                .entry(b)
                .or_insert_with(|| self.covering_cells(lo, hi));
        }
        let mut j_key = Vec::with_capacity(m);
        for (idx, p) in points.iter().enumerate() {
            let b = row_band[idx].0;
            let cells = by_band[&b].clone();
            let lab = if cells.is_empty() {
                self.bands(delta, r_h).comp[p.h]
            } else {
                self.j_labels(delta, r_h, cells)[p.h]
            };
            if lab == u32::MAX {
                return Err(Error::Invariant(format!(
                    "point ({}, {}) was trimmed from J at scale {scale}",
                    p.h, p.row
                )));
            }
            j_key.push((i_key[idx].0, b, lab));
        }
        let mut keys: Vec<(u32, i64, u32)> = j_key.clone();
        keys.sort_unstable();
        keys.dedup();
        let alphas: HashMap<(u32, i64, u32), f64> =
            keys.into_iter().map(|k| (k, rng.random::<f64>())).collect();
        let alpha = j_key.iter().map(|k| alphas[k]).collect();
        Ok(InstanceData {
            scale,
            index,
            delta,
            r_h,
            r_p,
            i_key,
            j_key,
            dist,
            alpha,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingParams {
    pub k: usize,
    pub a: f64,
    pub seed: u64,
    /// Keep only this many uniformly chosen coordinates.
    pub dims_cap: Option<usize>,
}

/// Point-major coordinate matrix of the raw embedding.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub n: usize,
    pub points: usize,
    pub k: usize,
    pub a: f64,
    pub seed: u64,
    /// Dimension prescribed by the theory.
    pub full_dim: usize,
    /// `(scale, index)` of every stored coordinate.
    pub columns: Vec<(u32, usize)>,
    /// `1 / (2 sqrt(stored dimension))`.
    pub scale: f64,
    /// False when coordinates were subsampled.
    pub certified: bool,
    coords: Vec<f64>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Raw coordinates of point `p`.
    pub fn raw(&self, p: usize) -> &[f64] {
        &self.coords[p * self.dim()..(p + 1) * self.dim()]
    }

    /// Scaled distance between two points.
    pub fn scaled_distance(&self, p: usize, q: usize) -> f64 {
        crate::volumes::euclidean(self.raw(p), self.raw(q)) * self.scale
    }

    /// Builds an embedding directly from raw rows; used for tests and
    /// external coordinates.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return input("rows of unequal length");
        }
        Ok(Embedding {
            n: rows.len(),
            points: rows.len(),
            k: 0,
            a: 0.0,
            seed: 0,
            full_dim: dim,
            columns: (0..dim).map(|j| (0, j)).collect(),
            scale: if dim == 0 {
                1.0
            } else {
                0.5 / (dim as f64).sqrt()
            },
            certified: false,
            coords: rows.concat(),
        })
    }

    /// `n L k a seed` header followed by one row per point.
    pub fn dump(&self) -> String {
        let mut s = format!(
            "{} {} {} {} {}\n",
            self.points,
            self.dim(),
            self.k,
            self.a,
            self.seed
        );
        for p in 0..self.points {
            let row: Vec<String> = self.raw(p).iter().map(|x| format!("{x}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Embeds `points` (internal rows, none in `X`). `n` is `|V(G)|`, which
/// fixes the number of scales and coordinates.
pub fn build_embedding(
    h: &Graph,
    sm: &StarMetric,
    points: &[ProductVertex],
    n: usize,
    params: &EmbeddingParams,
) -> Result<Embedding> {
    if params.k < 2 {
        return input("k must be at least 2");
    }
    if !(params.a > 0.0) {
        return input("a must be positive");
    }
    if points.is_empty() {
        return input("nothing to embed");
    }
    if n < points.len() {
        return input("n is smaller than the point count");
    }
    let per = per_scale(n, params.k, params.a);
    let full_dim = full_dimension(n, params.k, params.a);
    let top = if n < 2 { 0 } else { floor_log2(n) };
    let mut columns: Vec<(u32, usize)> = Vec::with_capacity(full_dim);
    for i in 0..=top {
        for j in 1..=per {
            columns.push((i, j));
        }
    }
    let certified = match params.dims_cap {
        Some(cap) if cap < columns.len() => {
            let mut rng = seeds::stream(params.seed, "dims");
            let picked = rand::seq::index::sample(&mut rng, columns.len(), cap).into_vec();
            let mut picked: Vec<usize> = picked;
            picked.sort_unstable();
            columns = picked.into_iter().map(|c| columns[c]).collect();
            false
        }
        _ => true,
    };
    let dim = columns.len();
    let m = points.len();
    let mut coords = vec![0.0; m * dim];
    let mut sampler = InstanceSampler::new(h, sm, points, params.seed)?;
    let mut current_scale = u32::MAX;
    for (col, &(i, j)) in columns.iter().enumerate() {
        if i != current_scale {
            sampler.clear_cache();
            current_scale = i;
        }
        let inst = sampler.instance(i, j)?;
        for p in 0..m {
            coords[p * dim + col] = inst.coordinate(p);
        }
    }
    Ok(Embedding {
        n,
        points: m,
        k: params.k,
        a: params.a,
        seed: params.seed,
        full_dim,
        columns,
        scale: if dim == 0 {
            1.0
        } else {
            0.5 / (dim as f64).sqrt()
        },
        certified,
        coords,
    })
}

/// Orders points by their projection onto a random unit vector drawn from
/// stream `project/{label}`; ties go to the lower point index.
pub fn project_order(emb: &Embedding, seed: u64, label: &str) -> VertexOrdering {
    let dim = emb.dim();
    let mut rng = seeds::stream(seed, &format!("project/{label}"));
    let mut r: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut r {
            *x /= norm;
        }
    }
    project_along(emb, &r)
}

/// Ordering by `<r, phi(v)>` for a given direction.
pub fn project_along(emb: &Embedding, r: &[f64]) -> VertexOrdering {
    let mut keyed: Vec<(f64, usize)> = (0..emb.points)
        .map(|p| (emb.raw(p).iter().zip(r).map(|(a, b)| a * b).sum(), p))
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    VertexOrdering::new(keyed.into_iter().map(|(_, p)| p).collect())
}

#[derive(Clone, Debug)]
pub struct DistortionReport {
    /// `max d*(u,v) / d_2(phi'(u), phi'(v))` over pairs.
    pub max_distortion: f64,
    /// `max d_2(phi'(u), phi'(v)) / d*(u,v)`; at most 1 for a contraction.
    pub max_expansion: f64,
    pub distortion_bound: f64,
    pub triples: usize,
    pub triples_passing: usize,
    pub min_volume_ratio: f64,
}

impl DistortionReport {
    pub fn volume_pass_fraction(&self) -> f64 {
        if self.triples == 0 {
            1.0
        } else {
            self.triples_passing as f64 / self.triples as f64
        }
    }
}

/// All-pairs distortion of the scaled embedding against `d*`, and the
/// volume ratio on `triples` sampled `kv`-subsets:
/// `evol(phi'(K)) (kv-1)! (2 sqrt L)^(kv-1) / (tvol(K) (2 zeta / 3)^(kv-1))`.
pub fn distortion_volume_report(
    emb: &Embedding,
    sm: &StarMetric,
    points: &[ProductVertex],
    kv: usize,
    triples: usize,
    seed: u64,
) -> Result<DistortionReport> {
    let m = emb.points;
    if points.len() != m {
        return input("point list does not match the embedding");
    }
    let dstar = sm.matrix(points)?;
    let mut max_distortion: f64 = 0.0;
    let mut max_expansion: f64 = 0.0;
    for p in 0..m {
        for q in p + 1..m {
            let d = dstar.get(p, q);
            let e = emb.scaled_distance(p, q);
            if d.is_finite() {
                max_expansion = max_expansion.max(e / d);
                max_distortion = max_distortion.max(if e > 0.0 { d / e } else { f64::INFINITY });
            }
        }
    }
    let z = zeta(emb.n, emb.k, emb.a);
    let mut passing = 0;
    let mut min_ratio = f64::INFINITY;
    let mut done = 0;
    if kv >= 2 && m >= kv {
        let mut rng = seeds::stream(seed, "volume/triples");
        let stretch = 2.0 * (emb.dim() as f64).sqrt();
        for _ in 0..triples {
            let idx = rand::seq::index::sample(&mut rng, m, kv).into_vec();
            let sub = dstar.restrict(&idx);
            let tv = tree_volume(&sub)?;
            if !tv.is_finite() {
                continue;
            }
            let pts: Vec<&[f64]> = idx.iter().map(|&p| emb.raw(p)).collect();
            // simplex_volume works on raw rows; scale by (1/(2 sqrt L))^(kv-1)
            let evol_scaled = simplex_volume(&pts) * emb.scale.powi(kv as i32 - 1);
            let ratio = evol_scaled * factorial(kv - 1) * stretch.powi(kv as i32 - 1)
                / (tv * (2.0 * z / 3.0).powi(kv as i32 - 1));
            done += 1;
            if ratio >= 1.0 {
                passing += 1;
            }
            min_ratio = min_ratio.min(ratio);
        }
    }
    Ok(DistortionReport {
        max_distortion,
        max_expansion,
        distortion_bound: distortion_bound(emb.n),
        triples: done,
        triples_passing: passing,
        min_volume_ratio: min_ratio,
    })
}

/// `max d_H` inside any band component for `(delta, r_H)`; an upper bound
/// for the `d_{H x P}` diameter of every decomposition component is this
/// value maxed with `delta - 1`.
pub fn band_component_h_diameter(
    sampler: &mut InstanceSampler<'_>,
    sm: &StarMetric,
    delta: i64,
    r_h: i64,
) -> u32 {
    let comp = sampler.bands(delta, r_h).comp.clone();
    let dh = sm.h_distances();
    let n = comp.len();
    let mut by: HashMap<u32, Vec<usize>> = HashMap::new();
    for v in 0..n {
        by.entry(comp[v]).or_default().push(v);
    }
    let mut worst = 0;
    for vs in by.values() {
        for (a, &x) in vs.iter().enumerate() {
            for &y in &vs[a + 1..] {
                worst = worst.max(dh.get(x, y).get().unwrap_or(u32::MAX));
            }
        }
    }
    worst
}
