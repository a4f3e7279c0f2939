//! End-to-end pipelines: sparsify, embed, order, certify; plus the crossing
//! and genus reductions onto the planar pipeline.

use crate::certificate::{fan_certificate, FanCertificate};
use crate::crossing::{kplanar_edge_budget, DrawnGraph, Planarization};
use crate::decomposition::{minfill_decomposition, ttree_complete};
use crate::embedding::{build_embedding, project_order, EmbeddingParams};
use crate::error::{input, Error, Result};
use crate::graph::{bandwidth_of_ordering, bfs_layering, ceil_log2, Graph, VertexOrdering};
use crate::product::{ProductInstance, ProductVertex};
use crate::sparsifier::{
    baker_sparsify, empty_sparsifier, product_sparsify, BakerConfig, BakerResult,
    StructuredSparsifier,
};
use crate::star_metric::StarMetric;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    /// `None` picks `max(2, ceil(log n))`.
    pub k: Option<usize>,
    pub a: f64,
    pub seed: u64,
    pub restarts: usize,
    pub dims_cap: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            k: None,
            a: 193.0,
            seed: 0,
            restarts: 5,
            dims_cap: None,
        }
    }
}

impl PipelineOptions {
    pub fn k_for(&self, n: usize) -> usize {
        self.k.unwrap_or_else(|| (ceil_log2(n) as usize).max(2))
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    /// Sorted removed vertices of `G`.
    pub x: Vec<usize>,
    /// Ordering of `G - X` with the smallest bandwidth among the restarts.
    pub ordering: VertexOrdering,
    pub bandwidth: usize,
    /// Bandwidth per projection restart.
    pub restart_bandwidths: Vec<usize>,
    /// Bandwidth of the row (layer) order candidate.
    pub row_order_bandwidth: usize,
    /// Projection restart that won, `None` if the row order did.
    pub chosen_restart: Option<usize>,
    /// False when the embedding was subsampled.
    pub certified: bool,
    pub dimension: usize,
}

impl PipelineResult {
    pub fn median_bandwidth(&self) -> usize {
        let mut v = self.restart_bandwidths.clone();
        v.sort_unstable();
        v.get(v.len().saturating_sub(1) / 2)
            .copied()
            .unwrap_or(self.bandwidth)
    }

    /// Certificate with `b = max(1, |X|, bw)` unless `b` is given.
    pub fn certificate(&self, g: &Graph, b: Option<usize>) -> Result<FanCertificate> {
        let b = b.unwrap_or(1.max(self.x.len()).max(self.bandwidth));
        fan_certificate(g, &self.x, &self.ordering, b)
    }

    fn trivial(g: &Graph, x: Vec<usize>) -> Result<Self> {
        let keep: Vec<usize> = {
            let gone: std::collections::HashSet<usize> = x.iter().copied().collect();
            (0..g.vertex_count())
                .filter(|v| !gone.contains(v))
                .collect()
        };
        let ordering = VertexOrdering::new(keep);
        let bandwidth = bandwidth_of_ordering(&g.without(&x)?, &ordering)?;
        Ok(PipelineResult {
            x,
            ordering,
            bandwidth,
            restart_bandwidths: vec![bandwidth],
            row_order_bandwidth: bandwidth,
            chosen_restart: None,
            certified: true,
            dimension: 0,
        })
    }
}

struct Ordered {
    ordering: VertexOrdering,
    bandwidth: usize,
    restart_bandwidths: Vec<usize>,
    row_order_bandwidth: usize,
    chosen_restart: Option<usize>,
    certified: bool,
    dimension: usize,
}

impl Ordered {
    fn into_result(self, x: Vec<usize>, relabel: impl Fn(usize) -> usize) -> PipelineResult {
        PipelineResult {
            x,
            ordering: VertexOrdering::new(
                self.ordering
                    .as_slice()
                    .iter()
                    .map(|&p| relabel(p))
                    .collect(),
            ),
            bandwidth: self.bandwidth,
            restart_bandwidths: self.restart_bandwidths,
            row_order_bandwidth: self.row_order_bandwidth,
            chosen_restart: self.chosen_restart,
            certified: self.certified,
            dimension: self.dimension,
        }
    }
}

/// Candidates: the row order (by row, then point index) and `restarts`
/// projection orderings of the embedded points; the first one with the
/// smallest bandwidth on `graph` (vertex `p` is point `p`) wins, row order
/// first.
fn order_points(
    h: &Graph,
    sm: &StarMetric,
    points: &[ProductVertex],
    n: usize,
    graph: &Graph,
    opts: &PipelineOptions,
) -> Result<Ordered> {
    let params = EmbeddingParams {
        k: opts.k_for(n),
        a: opts.a,
        seed: opts.seed,
        dims_cap: opts.dims_cap,
    };
    let emb = build_embedding(h, sm, points, n, &params)?;
    let mut by_row: Vec<usize> = (0..points.len()).collect();
    by_row.sort_by_key(|&p| (points[p].row, p));
    let by_row = VertexOrdering::new(by_row);
    let row_bw = bandwidth_of_ordering(graph, &by_row)?;
    let mut best = (row_bw, None, by_row);
    let mut bws = Vec::new();
    for r in 0..opts.restarts.max(1) {
        let ord = project_order(&emb, opts.seed, &format!("restart={r}"));
        let bw = bandwidth_of_ordering(graph, &ord)?;
        bws.push(bw);
        if bw < best.0 {
            best = (bw, Some(r), ord);
        }
    }
    Ok(Ordered {
        ordering: best.2,
        bandwidth: best.0,
        restart_bandwidths: bws,
        row_order_bandwidth: row_bw,
        chosen_restart: best.1,
        certified: emb.certified,
        dimension: emb.dim(),
    })
}

/// Orders an arbitrary graph through the embedding of `g` into
/// `completion(g) x P`, with `P` its BFS layer index and no cuts.
pub fn order_by_layers(g: &Graph, opts: &PipelineOptions) -> Result<PipelineResult> {
    let n = g.vertex_count();
    if n <= 1 {
        return PipelineResult::trivial(g, Vec::new());
    }
    let td = minfill_decomposition(g)?;
    let h = ttree_complete(g, &td)?;
    let layering = bfs_layering(g, 0)?;
    let points: Vec<ProductVertex> = (0..n)
        .map(|v| ProductVertex::new(v, layering.layer(v) as i64 + 1))
        .collect();
    let sp = empty_sparsifier(n, &points)?;
    let points: Vec<ProductVertex> = points.into_iter().map(|p| sp.to_internal(p)).collect();
    let sm = StarMetric::new(&h, sp);
    Ok(order_points(&h, &sm, &points, n, g, opts)?.into_result(Vec::new(), |p| p))
}

#[derive(Clone, Debug)]
pub struct PlanarOutcome {
    pub result: PipelineResult,
    pub baker: BakerResult,
}

/// Layered sparsifier on a BFS layering (`t = 3`), then the layer-product
/// ordering of `G - X`.
pub fn planar_pipeline(g: &Graph, d: f64, opts: &PipelineOptions) -> Result<PlanarOutcome> {
    let n = g.vertex_count();
    if n == 0 {
        return input("empty graph");
    }
    if !(d >= 1.0 && d <= n as f64) {
        return input(format!("D = {d} outside [1, {n}]"));
    }
    if n == 1 {
        return Ok(PlanarOutcome {
            result: PipelineResult::trivial(g, Vec::new())?,
            baker: BakerResult {
                x: Vec::new(),
                slabs: Vec::new(),
                t_eff: 0.0,
                bound_configured: 0.0,
                bound_achieved: 0.0,
            },
        });
    }
    let cfg = BakerConfig {
        t: 3,
        d,
        layering: bfs_layering(g, 0)?,
    };
    let baker = baker_sparsify(g, &cfg)?;
    let keep: Vec<usize> = {
        let mut gone = vec![false; n];
        baker.x.iter().for_each(|&v| gone[v] = true);
        (0..n).filter(|&v| !gone[v]).collect()
    };
    let (rest, back) = g.induced(&keep);
    let inner = order_by_layers(&rest, opts)?;
    let ordering =
        VertexOrdering::new(inner.ordering.as_slice().iter().map(|&v| back[v]).collect());
    Ok(PlanarOutcome {
        result: PipelineResult {
            x: baker.x.clone(),
            ordering,
            ..inner
        },
        baker,
    })
}

#[derive(Clone, Debug)]
pub struct ProductOutcome {
    pub result: PipelineResult,
    pub sparsifier: StructuredSparsifier,
    /// `H` completed along its decomposition.
    pub h: Graph,
}

/// Product pipeline: complete `H`, sparsify, embed `G - X` under `d*`,
/// best of `restarts` projection orderings.
pub fn product_pipeline(
    inst: &ProductInstance,
    d: f64,
    opts: &PipelineOptions,
) -> Result<ProductOutcome> {
    let n = inst.n();
    if n == 0 {
        return input("empty graph");
    }
    let td = match &inst.td {
        Some(td) => td.clone(),
        None => minfill_decomposition(&inst.h)?,
    };
    let h = ttree_complete(&inst.h, &td)?;
    if n == 1 {
        return Ok(ProductOutcome {
            result: PipelineResult::trivial(&inst.g, Vec::new())?,
            sparsifier: empty_sparsifier(h.vertex_count(), &inst.place)?,
            h,
        });
    }
    let sp = product_sparsify(&h, &td, &inst.place, d)?;
    let mut x = Vec::new();
    let mut keep = Vec::new();
    let mut points = Vec::new();
    for (v, &p) in inst.place.iter().enumerate() {
        let q = sp.to_internal(p);
        if sp.contains(q) {
            x.push(v);
        } else {
            keep.push(v);
            points.push(q);
        }
    }
    let sm = StarMetric::new(&h, sp);
    if points.len() <= 1 {
        let result = PipelineResult::trivial(&inst.g, x)?;
        return Ok(ProductOutcome {
            result,
            sparsifier: sm.sparsifier().clone(),
            h,
        });
    }
    let (rest, _) = inst.g.induced(&keep);
    let ordered = order_points(&h, &sm, &points, n, &rest, opts)?;
    Ok(ProductOutcome {
        result: ordered.into_result(x, |p| keep[p]),
        sparsifier: sm.sparsifier().clone(),
        h,
    })
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    /// Lifted `X` in `V(G)`, the ordering of `G - X` and its bandwidth.
    pub result: PipelineResult,
    /// `X'` in the ids of the augmented graph.
    pub x_prime: Vec<usize>,
    pub planarization: Option<Planarization>,
    /// Longest `G'` path standing for one edge, in edges.
    pub max_edge_path: usize,
    /// Set when an edge-count gate returned `X = V(G)` directly.
    pub short_circuit: Option<String>,
}

fn restrict_ordering(
    ord: &VertexOrdering,
    back: &[usize],
    n: usize,
    x: &[usize],
) -> VertexOrdering {
    let mut gone = vec![false; n];
    x.iter().for_each(|&v| gone[v] = true);
    VertexOrdering::new(
        ord.as_slice()
            .iter()
            .map(|&v| back[v])
            .filter(|&v| v < n && !gone[v])
            .collect(),
    )
}

fn lift_and_order(
    dg: &DrawnGraph,
    pl: Planarization,
    removed: &[usize],
    d: f64,
    opts: &PipelineOptions,
) -> Result<ReductionOutcome> {
    let n = dg.graph.vertex_count();
    let total = pl.graph.vertex_count();
    let mut gone = vec![false; total];
    for &z in removed {
        if z >= total {
            return input(format!(
                "planarizing vertex {z} outside G' ({total} vertices)"
            ));
        }
        gone[z] = true;
    }
    let keep: Vec<usize> = (0..total).filter(|&v| !gone[v]).collect();
    let (rest, back) = pl.graph.induced(&keep);
    let (inner_x, inner_ord) = if rest.vertex_count() == 0 {
        (Vec::new(), VertexOrdering::new(Vec::new()))
    } else {
        let dd = d.min(rest.vertex_count() as f64).max(1.0);
        let out = planar_pipeline(&rest, dd, opts)?;
        (out.result.x, out.result.ordering)
    };
    let mut x_prime: Vec<usize> = removed.to_vec();
    x_prime.extend(inner_x.iter().map(|&v| back[v]));
    x_prime.sort_unstable();
    x_prime.dedup();
    let x = pl.lift(&x_prime);
    let ordering = restrict_ordering(&inner_ord, &back, n, &x);
    let bandwidth = bandwidth_of_ordering(&dg.graph.without(&x)?, &ordering)?;
    let max_edge_path = pl.paths.iter().map(|p| p.len() - 1).max().unwrap_or(0);
    Ok(ReductionOutcome {
        result: PipelineResult {
            x,
            ordering,
            bandwidth,
            restart_bandwidths: vec![bandwidth],
            row_order_bandwidth: bandwidth,
            chosen_restart: None,
            certified: opts.dims_cap.is_none(),
            dimension: 0,
        },
        x_prime,
        planarization: Some(pl),
        max_edge_path,
        short_circuit: None,
    })
}

/// Planarize at crossings, run the planar pipeline on `G'`, replace each
/// removed dummy by the four endpoints of its crossing edges.
pub fn kplanar_reduce(
    dg: &DrawnGraph,
    k: usize,
    d: f64,
    opts: &PipelineOptions,
) -> Result<ReductionOutcome> {
    let n = dg.graph.vertex_count();
    let m = dg.graph.edge_count();
    let worst = dg.max_crossings_per_edge();
    if worst > k {
        return input(format!("an edge has {worst} crossings, more than k = {k}"));
    }
    if m as f64 > kplanar_edge_budget(n, k) {
        return input(format!(
            "{m} edges exceed the {k}-planar budget max(3n, 4.108 sqrt(k) n) = {:.1}",
            kplanar_edge_budget(n, k)
        ));
    }
    let pl = dg.planarize();
    for (e, path) in pl.paths.iter().enumerate() {
        if path.len() - 1 > k + 1 {
            return Err(Error::Invariant(format!(
                "edge {e} became a path of {} edges",
                path.len() - 1
            )));
        }
    }
    for v in n..pl.graph.vertex_count() {
        if pl.graph.degree(v) != 4 {
            return Err(Error::Invariant(format!(
                "dummy {v} has degree {}",
                pl.graph.degree(v)
            )));
        }
    }
    lift_and_order(dg, pl, &[], d, opts)
}

/// `(g, k)`-planar reduction. `planarizer` lists vertices of the augmented
/// graph (dummy for crossing `c` is `n + c`) whose removal leaves it planar.
pub fn gk_reduce(
    dg: &DrawnGraph,
    genus: usize,
    k: usize,
    d: f64,
    planarizer: Option<&[usize]>,
    opts: &PipelineOptions,
) -> Result<ReductionOutcome> {
    let n = dg.graph.vertex_count();
    let m = dg.graph.edge_count();
    let nf = n as f64;
    let gate = if (k as f64) > nf.powf(2.0 / 3.0) {
        Some(format!("k = {k} > n^(2/3)"))
    } else if genus > n {
        Some(format!("g = {genus} > n"))
    } else if m >= 64 * n && (k as f64).powf(0.75) * (genus as f64).sqrt() * nf.sqrt() >= nf {
        Some("m >= 64n and k^(3/4) g^(1/2) n^(1/2) >= n".to_string())
    } else {
        None
    };
    if let Some(reason) = gate {
        let x: Vec<usize> = (0..n).collect();
        return Ok(ReductionOutcome {
            result: PipelineResult::trivial(&dg.graph, x.clone())?,
            x_prime: x,
            planarization: None,
            max_edge_path: 0,
            short_circuit: Some(reason),
        });
    }
    if genus == 0 {
        return kplanar_reduce(dg, k, d, opts);
    }
    let Some(z) = planarizer else {
        return input(format!(
            "genus {genus} needs a planarizing vertex set; supply one computed externally"
        ));
    };
    let worst = dg.max_crossings_per_edge();
    if worst > k {
        return input(format!("an edge has {worst} crossings, more than k = {k}"));
    }
    lift_and_order(dg, dg.planarize(), z, d, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;
    use crate::crossing::Crossing;
    use crate::graph::tests::{grid, path};
    use crate::graph::Density;
    use crate::oracles::exhaustive_local_density;

    fn quick() -> PipelineOptions {
        PipelineOptions {
            k: Some(2),
            a: 1.0,
            seed: 3,
            restarts: 5,
            dims_cap: None,
        }
    }

    #[test]
    fn planar_on_path() {
        let out = planar_pipeline(&path(12), 12.0, &quick()).unwrap();
        assert!(out.result.x.is_empty());
        assert_eq!(out.result.bandwidth, 1);
        let one = planar_pipeline(&Graph::empty(1), 1.0, &quick()).unwrap();
        assert_eq!((one.result.x.len(), one.result.bandwidth), (0, 0));
    }

    #[test]
    fn planar_grid_density_and_certificate() {
        let g = grid(16, 16);
        let out = planar_pipeline(&g, 32.0, &quick()).unwrap();
        let ld = exhaustive_local_density(&g, &out.result.x).unwrap();
        assert!(ld <= Density::from_integer(32));
        let cert = out.result.certificate(&g, None).unwrap();
        assert!(verify_certificate(&g, &cert).is_empty());
    }

    #[test]
    fn product_single_column() {
        let inst = ProductInstance::grid(12, 1);
        let out = product_pipeline(&inst, 12.0, &quick()).unwrap();
        assert!(out.result.x.is_empty());
        assert_eq!(out.result.bandwidth, 1);
    }

    #[test]
    fn product_grid_certificate() {
        let inst = ProductInstance::grid(8, 8);
        let out = product_pipeline(&inst, 24.0, &quick()).unwrap();
        let cert = out.result.certificate(&inst.g, None).unwrap();
        assert!(verify_certificate(&inst.g, &cert).is_empty());
    }

    #[test]
    fn kplanar_k5() {
        let g = Graph::new(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v)))).unwrap();
        let c = Crossing {
            e1: (0, 2),
            e2: (1, 3),
            pos1: 0.5,
            pos2: 0.5,
        };
        let dg = DrawnGraph::new(g, vec![c]).unwrap();
        let out = kplanar_reduce(&dg, 1, 2.0, &quick()).unwrap();
        assert!(out.max_edge_path <= 2);
        assert!(out.result.x.len() <= 4 * out.x_prime.len().max(1));
        assert!(gk_reduce(&dg, 1, 1, 2.0, None, &quick()).is_err());
        assert!(gk_reduce(&dg, 0, 1, 2.0, None, &quick()).is_ok());
        let big = gk_reduce(&dg, 6, 1, 2.0, None, &quick()).unwrap();
        assert!(big.short_circuit.is_some());
        assert_eq!(big.result.x.len(), 5);
    }
}
