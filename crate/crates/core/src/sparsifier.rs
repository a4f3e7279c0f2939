//! Local-density sparsifiers: the layered (Baker) construction and the
//! structured one over `H x P` built from vertical cylinders.

use std::collections::HashMap;

use crate::decomposition::{minfill_decomposition, weighted_separator, TreeDecomposition};
use crate::error::{input, Error, Result};
use crate::graph::{ceil_log2, Graph, Layering};
use crate::product::ProductVertex;

/// Smallest integer `c >= 1` with `c * d * 2^(i-1) >= size`.
pub(crate) fn separator_parameter(size: u64, d: f64, i: u32) -> u64 {
    let unit = d * 2f64.powi(i as i32 - 1);
    let mut c = ((size as f64) / unit).ceil().max(1.0) as u64;
    while c > 1 && ((c - 1) as f64) * unit >= size as f64 {
        c -= 1;
    }
    while (c as f64) * unit < size as f64 {
        c += 1;
    }
    c
}

#[derive(Clone, Debug)]
pub struct BakerConfig {
    /// Baker parameter the layering is assumed to satisfy.
    pub t: usize,
    pub d: f64,
    pub layering: Layering,
}

/// One widened slab processed by [`baker_sparsify`].
#[derive(Clone, Debug, PartialEq)]
pub struct SlabRecord {
    pub i: u32,
    pub j: usize,
    pub size: usize,
    pub width: usize,
    pub c: u64,
    pub removed: usize,
}

#[derive(Clone, Debug)]
pub struct BakerResult {
    /// Sorted vertex ids.
    pub x: Vec<usize>,
    pub slabs: Vec<SlabRecord>,
    /// `max (w + 1) / (3 * 2^i)` over slabs that needed a separator.
    pub t_eff: f64,
    /// `18 t n log n / D` with the configured `t`.
    pub bound_configured: f64,
    /// Same with `t_eff`.
    pub bound_achieved: f64,
}

/// Layered sparsifier. For every scale `i` with `D * 2^(i-1) < n` and every
/// dyadic slab `j`, the widened slab (three consecutive slabs of `2^i`
/// layers) is cut by a unit-weight separator with
/// `c = ceil(|slab| / (D * 2^(i-1)))`.
pub fn baker_sparsify(g: &Graph, cfg: &BakerConfig) -> Result<BakerResult> {
    let n = g.vertex_count();
    if n == 0 {
        return input("cannot sparsify an empty graph");
    }
    let d = cfg.d;
    if !(d >= 1.0 && d <= n as f64) {
        return input(format!("D = {d} outside [1, {n}]"));
    }
    if cfg.layering.len() != n {
        return input("layering does not match the graph");
    }
    let layers = cfg.layering.layers();
    let layer_count = layers.len();
    let mut in_x = vec![false; n];
    let mut slabs = Vec::new();
    let mut cache: HashMap<(usize, usize), (Graph, Vec<usize>, TreeDecomposition)> = HashMap::new();
    let mut t_eff: f64 = 0.0;

    let mut i = 0u32;
    while d * 2f64.powi(i as i32 - 1) < n as f64 {
        let span = 1usize << i;
        let strips = layer_count.div_ceil(span);
        for j in 0..strips {
            let lo = (j * span).saturating_sub(span);
            let hi = ((j + 2) * span).min(layer_count) - 1;
            let size: usize = layers[lo..=hi].iter().map(Vec::len).sum();
            let c = separator_parameter(size as u64, d, i);
            if c <= 1 {
                continue;
            }
            let (slab, back, td) = cache.entry((lo, hi)).or_insert_with(|| {
                let keep: Vec<usize> = layers[lo..=hi].iter().flatten().copied().collect();
                let (slab, back) = g.induced(&keep);
                let td = minfill_decomposition(&slab).expect("nonempty slab");
                (slab, back, td)
            });
            let sep = weighted_separator(slab, td, &vec![1; slab.vertex_count()], c)?;
            for &v in &sep.removed {
                in_x[back[v]] = true;
            }
            let width = td.width();
            t_eff = t_eff.max((width + 1) as f64 / (3.0 * span as f64));
            slabs.push(SlabRecord {
                i,
                j,
                size,
                width,
                c,
                removed: sep.removed.len(),
            });
        }
        i += 1;
    }
    let x: Vec<usize> = (0..n).filter(|&v| in_x[v]).collect();
    let logn = (n as f64).log2();
    Ok(BakerResult {
        x,
        slabs,
        t_eff,
        bound_configured: 18.0 * cfg.t as f64 * n as f64 * logn / d,
        bound_achieved: 18.0 * t_eff * n as f64 * logn / d,
    })
}

/// A nonempty cylinder `Y_{i,j} x P+_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub i: u32,
    pub j: i64,
    /// Sorted vertices of `H`.
    pub y: Vec<usize>,
    pub xi_total: u64,
    pub c: u64,
}

/// The family of vertical cylinders cutting each strip, and their union.
///
/// All rows here are internal: `G` occupies rows `1..=big_n` and the padded
/// path spans `1 - big_n ..= 2 * big_n`. `row_offset` converts from the
/// caller's rows (`internal = original + row_offset`).
#[derive(Clone, Debug)]
pub struct StructuredSparsifier {
    pub n: usize,
    pub big_n: i64,
    pub log_big_n: u32,
    pub d: f64,
    pub width: usize,
    pub row_offset: i64,
    h_count: usize,
    cells: Vec<Cell>,
    /// `cell_at[i][j]` indexes `cells`.
    cell_at: Vec<Vec<Option<usize>>>,
    /// Removed rows per `H` vertex as disjoint sorted closed intervals.
    x_rows: Vec<Vec<(i64, i64)>>,
}

impl StructuredSparsifier {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn h_count(&self) -> usize {
        self.h_count
    }

    pub fn cell(&self, i: u32, j: i64) -> Option<&Cell> {
        let row = self.cell_at.get(i as usize)?;
        if j < 0 || j as usize >= row.len() {
            return None;
        }
        row[j as usize].map(|k| &self.cells[k])
    }

    /// `Y_{i,j}`, empty when the strip needed no cut.
    pub fn y(&self, i: u32, j: i64) -> &[usize] {
        self.cell(i, j).map_or(&[], |c| &c.y)
    }

    pub fn strip_count(&self, i: u32) -> i64 {
        self.big_n >> i
    }

    /// Rows `lo..=hi` of `P_{i,j}`.
    pub fn strip_rows(&self, i: u32, j: i64) -> (i64, i64) {
        let s = 1i64 << i;
        (j * s + 1, (j + 1) * s)
    }

    /// Rows of `P+_{i,j}`.
    pub fn widened_rows(&self, i: u32, j: i64) -> (i64, i64) {
        let s = 1i64 << i;
        ((j - 1) * s + 1, (j + 2) * s)
    }

    /// Lowest and highest row of the padded path.
    pub fn padded_rows(&self) -> (i64, i64) {
        (1 - self.big_n, 2 * self.big_n)
    }

    pub fn to_internal(&self, p: ProductVertex) -> ProductVertex {
        ProductVertex::new(p.h, p.row + self.row_offset)
    }

    pub fn contains(&self, p: ProductVertex) -> bool {
        let Some(iv) = self.x_rows.get(p.h) else {
            return false;
        };
        let k = iv.partition_point(|&(_, hi)| hi < p.row);
        k < iv.len() && iv[k].0 <= p.row
    }

    /// `|X|`, counted over the padded path.
    pub fn x_size(&self) -> u64 {
        self.x_rows
            .iter()
            .flatten()
            .map(|&(lo, hi)| (hi - lo + 1) as u64)
            .sum()
    }

    /// Removed row intervals of one `H` vertex.
    pub fn x_rows(&self, h: usize) -> &[(i64, i64)] {
        &self.x_rows[h]
    }

    /// `18 (w + 1) n (1 + log N) / D`.
    pub fn size_bound(&self) -> f64 {
        18.0 * (self.width + 1) as f64 * self.n as f64 * (1 + self.log_big_n) as f64 / self.d
    }
}

/// `xi_{i,j}` for every strip of scale `i`, as (j, per-H-vertex weights).
pub(crate) fn strip_weights(
    h_count: usize,
    internal: &[ProductVertex],
    big_n: i64,
    i: u32,
) -> Vec<(i64, Vec<u64>)> {
    let strips = (big_n >> i) as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); strips];
    for p in internal {
        buckets[((p.row - 1) >> i) as usize].push(p.h);
    }
    let mut out = Vec::new();
    for j in 0..strips {
        let lo = j.saturating_sub(1);
        let hi = (j + 1).min(strips - 1);
        if buckets[lo..=hi].iter().all(Vec::is_empty) {
            continue;
        }
        let mut xi = vec![0u64; h_count];
        for b in &buckets[lo..=hi] {
            for &x in b {
                xi[x] += 1;
            }
        }
        out.push((j as i64, xi));
    }
    out
}

/// Structured sparsifier for `G` placed at `place` in `H x P`.
///
/// `td` must be a valid decomposition of `h`; its width stands in for `t`.
pub fn product_sparsify(
    h: &Graph,
    td: &TreeDecomposition,
    place: &[ProductVertex],
    d: f64,
) -> Result<StructuredSparsifier> {
    if !(d >= 2.0) {
        return input(format!("D = {d} must be at least 2"));
    }
    let n = place.len();
    let h_count = h.vertex_count();
    if n > 0 && d > n as f64 {
        return input(format!("D = {d} exceeds n = {n}"));
    }
    for (v, p) in place.iter().enumerate() {
        if p.h >= h_count {
            return input(format!("vertex {v} placed outside H"));
        }
    }
    let log_big_n = ceil_log2(n.max(1));
    let big_n = 1i64 << log_big_n;
    let min_row = place.iter().map(|p| p.row).min().unwrap_or(1);
    let max_row = place.iter().map(|p| p.row).max().unwrap_or(1);
    let row_offset = 1 - min_row;
    if max_row + row_offset > big_n {
        return input(format!(
            "G spans rows {min_row}..={max_row}, more than N = {big_n} rows"
        ));
    }
    let internal: Vec<ProductVertex> = place
        .iter()
        .map(|p| ProductVertex::new(p.h, p.row + row_offset))
        .collect();

    let mut cells = Vec::new();
    let mut cell_at: Vec<Vec<Option<usize>>> = Vec::new();
    let mut raw: Vec<Vec<(i64, i64)>> = vec![Vec::new(); h_count];
    for i in 0..=log_big_n {
        let mut at = vec![None; (big_n >> i) as usize];
        if n > 0 {
            for (j, xi) in strip_weights(h_count, &internal, big_n, i) {
                let total: u64 = xi.iter().sum();
                let c = separator_parameter(total, d, i);
                let y = if c <= 1 {
                    Vec::new()
                } else {
                    weighted_separator(h, td, &xi, c)?.removed
                };
                if !y.is_empty() {
                    let s = 1i64 << i;
                    for &x in &y {
                        raw[x].push(((j - 1) * s + 1, (j + 2) * s));
                    }
                }
                at[j as usize] = Some(cells.len());
                cells.push(Cell {
                    i,
                    j,
                    y,
                    xi_total: total,
                    c,
                });
            }
        }
        cell_at.push(at);
    }
    let x_rows = raw.into_iter().map(merge_intervals).collect();
    let sp = StructuredSparsifier {
        n,
        big_n,
        log_big_n,
        d,
        width: td.width(),
        row_offset,
        h_count,
        cells,
        cell_at,
        x_rows,
    };
    if (sp.x_size() as f64) > sp.size_bound() + 1e-9 {
        return Err(Error::Invariant(format!(
            "|X| = {} above 18(w+1)n(1+log N)/D = {}",
            sp.x_size(),
            sp.size_bound()
        )));
    }
    Ok(sp)
}

/// Sparsifier with no cuts, so `d*` equals the product distance. `D` is
/// recorded as `n`.
pub fn empty_sparsifier(h_count: usize, place: &[ProductVertex]) -> Result<StructuredSparsifier> {
    let n = place.len();
    for (v, p) in place.iter().enumerate() {
        if p.h >= h_count {
            return input(format!("vertex {v} placed outside H"));
        }
    }
    let log_big_n = ceil_log2(n.max(1));
    let big_n = 1i64 << log_big_n;
    let min_row = place.iter().map(|p| p.row).min().unwrap_or(1);
    let max_row = place.iter().map(|p| p.row).max().unwrap_or(1);
    let row_offset = 1 - min_row;
    if max_row + row_offset > big_n {
        return input(format!(
            "G spans rows {min_row}..={max_row}, more than N = {big_n} rows"
        ));
    }
    Ok(StructuredSparsifier {
        n,
        big_n,
        log_big_n,
        d: n.max(1) as f64,
        width: 0,
        row_offset,
        h_count,
        cells: Vec::new(),
        cell_at: (0..=log_big_n)
            .map(|i| vec![None; (big_n >> i) as usize])
            .collect(),
        x_rows: vec![Vec::new(); h_count],
    })
}

fn merge_intervals(mut iv: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    iv.sort_unstable();
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(iv.len());
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Line-oriented dump: one record `i j | y...` per cell with a nonempty cut.
pub fn format_sparsifier(sp: &StructuredSparsifier) -> String {
    let mut s = String::new();
    for c in sp.cells() {
        if c.y.is_empty() {
            continue;
        }
        let ys: Vec<String> = c.y.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{} {} | {}\n", c.i, c.j, ys.join(" ")));
    }
    s
}
