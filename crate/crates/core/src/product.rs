//! Graphs embedded in a strong product `H x P` with `P` a path.

use std::collections::HashMap;

use crate::decomposition::TreeDecomposition;
use crate::error::{input, Result};
use crate::graph::{Dist, Graph};

/// Vertex of `H x P`: a vertex of `H` and a row of the path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductVertex {
    pub h: usize,
    pub row: i64,
}

impl ProductVertex {
    pub fn new(h: usize, row: i64) -> Self {
        ProductVertex { h, row }
    }
}

/// A graph `G` together with an injective placement of its vertices into
/// `H x P`. Rows are arbitrary integers inside `row_lo..=row_hi`.
#[derive(Clone, Debug)]
pub struct ProductInstance {
    pub h: Graph,
    pub td: Option<TreeDecomposition>,
    pub row_lo: i64,
    pub row_hi: i64,
    pub place: Vec<ProductVertex>,
    pub g: Graph,
}

impl ProductInstance {
    /// Validates the placement and that every `G` edge is an edge of the
    /// strong product.
    pub fn new(
        h: Graph,
        td: Option<TreeDecomposition>,
        row_lo: i64,
        row_hi: i64,
        place: Vec<ProductVertex>,
        g: Graph,
    ) -> Result<Self> {
        if row_lo > row_hi {
            return input(format!("empty row range {row_lo}..={row_hi}"));
        }
        if place.len() != g.vertex_count() {
            return input(format!(
                "{} placements for {} vertices",
                place.len(),
                g.vertex_count()
            ));
        }
        let mut seen = HashMap::new();
        for (v, p) in place.iter().enumerate() {
            if p.h >= h.vertex_count() {
                return input(format!("vertex {v} placed on H vertex {} outside H", p.h));
            }
            if p.row < row_lo || p.row > row_hi {
                return input(format!(
                    "vertex {v} placed on row {} outside {row_lo}..={row_hi}",
                    p.row
                ));
            }
            if let Some(w) = seen.insert(*p, v) {
                return input(format!(
                    "vertices {w} and {v} share product vertex ({}, {})",
                    p.h, p.row
                ));
            }
        }
        for &(u, v) in g.edges() {
            let (a, b) = (place[u], place[v]);
            if !is_product_edge(&h, a, b) {
                return input(format!(
                    "edge ({u}, {v}) joins ({}, {}) and ({}, {}), which are not adjacent in H x P",
                    a.h, a.row, b.h, b.row
                ));
            }
        }
        if let Some(td) = &td {
            let bad = crate::decomposition::validate_decomposition(&h, td);
            if !bad.is_empty() {
                return input(format!("tree decomposition of H is invalid: {}", bad[0]));
            }
        }
        Ok(ProductInstance {
            h,
            td,
            row_lo,
            row_hi,
            place,
            g,
        })
    }

    pub fn n(&self) -> usize {
        self.g.vertex_count()
    }

    /// `G` is the `rows x cols` grid placed in `path(cols) x P`, rows
    /// `1..=rows`. Vertex `r * cols + c` sits at `(c, r + 1)`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let h = Graph::new(cols, (1..cols).map(|c| (c - 1, c))).expect("path");
        let id = |r: usize, c: usize| r * cols + c;
        let mut e = Vec::new();
        let mut place = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                place.push(ProductVertex::new(c, r as i64 + 1));
                if c + 1 < cols {
                    e.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    e.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let g = Graph::new(rows * cols, e).expect("grid");
        ProductInstance::new(h, None, 1, rows.max(1) as i64, place, g).expect("grid instance")
    }
}

/// Adjacency in `H x P`.
pub fn is_product_edge(h: &Graph, a: ProductVertex, b: ProductVertex) -> bool {
    if a == b || (a.row - b.row).abs() > 1 {
        return false;
    }
    a.h == b.h || h.has_edge(a.h, b.h)
}

/// All-pairs hop distances of a graph, row-major.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Dist>,
}

impl DistanceMatrix {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut d = Vec::with_capacity(n * n);
        for s in 0..n {
            d.extend(g.view().bfs(s).expect("valid source"));
        }
        DistanceMatrix { n, d }
    }

    pub fn get(&self, u: usize, v: usize) -> Dist {
        self.d[u * self.n + v]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// `d_{H x P}` computed from factor distances.
pub fn product_vertex_distance(dh: &DistanceMatrix, a: ProductVertex, b: ProductVertex) -> Dist {
    let dp = Dist::new((a.row - b.row).unsigned_abs() as u32);
    crate::graph::product_distance(dh.get(a.h, b.h), dp)
}

/// Explicit `H x P` restricted to rows `lo..=hi`, minus `removed`. Vertex
/// `(h, row)` gets id `(row - lo) * |H| + h`. Only meant for small
/// verification instances.
pub fn materialize_product(
    h: &Graph,
    lo: i64,
    hi: i64,
    removed: &dyn Fn(ProductVertex) -> bool,
) -> (Graph, Vec<bool>) {
    let nh = h.vertex_count();
    let rows = (hi - lo + 1).max(0) as usize;
    let id = |p: ProductVertex| (p.row - lo) as usize * nh + p.h;
    let mut alive = vec![true; nh * rows];
    for r in 0..rows {
        for x in 0..nh {
            let p = ProductVertex::new(x, lo + r as i64);
            if removed(p) {
                alive[id(p)] = false;
            }
        }
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        let row = lo + r as i64;
        for x in 0..nh {
            let a = ProductVertex::new(x, row);
            if !alive[id(a)] {
                continue;
            }
            let mut push = |b: ProductVertex| {
                if b.row <= hi && alive[id(b)] {
                    edges.push((id(a), id(b)));
                }
            };
            for &y in h.neighbors(x) {
                if y > x {
                    push(ProductVertex::new(y, row));
                }
                push(ProductVertex::new(y, row + 1));
            }
            push(ProductVertex::new(x, row + 1));
        }
    }
    let g = Graph::from_edges_dedup(nh * rows, edges).expect("product edges");
    (g, alive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{cycle, path};

    #[test]
    fn product_distance_matches_materialized_bfs() {
        for h in [path(4), cycle(5), Graph::new(4, [(0, 1), (2, 3)]).unwrap()] {
            let dh = DistanceMatrix::new(&h);
            let (prod, _) = materialize_product(&h, 0, 5, &|_| false);
            let nh = h.vertex_count();
            for s in 0..prod.vertex_count() {
                let d = prod.view().bfs(s).unwrap();
                let a = ProductVertex::new(s % nh, (s / nh) as i64);
                for (t, &dt) in d.iter().enumerate() {
                    let b = ProductVertex::new(t % nh, (t / nh) as i64);
                    assert_eq!(product_vertex_distance(&dh, a, b), dt);
                }
            }
        }
    }

    #[test]
    fn rejects_row_gap() {
        let h = Graph::empty(1);
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let place = vec![ProductVertex::new(0, 0), ProductVertex::new(0, 2)];
        let err = ProductInstance::new(h, None, 0, 3, place, g).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"));
    }

    #[test]
    fn grid_instance_is_legal() {
        let inst = ProductInstance::grid(4, 5);
        assert_eq!(inst.n(), 20);
        assert_eq!(inst.g.edge_count(), 31);
    }

    #[test]
    fn diagonal_edges_are_product_edges() {
        let h = path(2);
        assert!(is_product_edge(
            &h,
            ProductVertex::new(0, 0),
            ProductVertex::new(1, 1)
        ));
        assert!(!is_product_edge(
            &Graph::empty(2),
            ProductVertex::new(0, 0),
            ProductVertex::new(1, 1)
        ));
    }
}
