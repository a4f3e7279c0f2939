//! Drawn graphs with an explicit crossing list, and their planarization
//! with one degree-4 dummy vertex per crossing.

use std::collections::{HashMap, HashSet};

use crate::error::{input, Result};
use crate::graph::Graph;

/// One crossing between two edges. Edges are normalized to `u < v`;
/// positions lie in `(0, 1)` measured from the lower endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub e1: (usize, usize),
    pub e2: (usize, usize),
    pub pos1: f64,
    pub pos2: f64,
}

#[derive(Clone, Debug)]
pub struct DrawnGraph {
    pub graph: Graph,
    pub crossings: Vec<Crossing>,
}

fn norm(e: (usize, usize)) -> (usize, usize) {
    (e.0.min(e.1), e.0.max(e.1))
}

impl DrawnGraph {
    /// Rejects crossings on missing edges, between edges sharing an
    /// endpoint, repeated edge pairs, and two crossings at the same point of
    /// one edge.
    pub fn new(graph: Graph, crossings: Vec<Crossing>) -> Result<Self> {
        let mut pairs = HashSet::new();
        let mut points: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        let mut out = Vec::with_capacity(crossings.len());
        for (i, c) in crossings.into_iter().enumerate() {
            let (e1, e2) = (norm(c.e1), norm(c.e2));
            for e in [e1, e2] {
                if e.1 >= graph.vertex_count() || !graph.has_edge(e.0, e.1) {
                    return input(format!("crossing {i}: {}-{} is not an edge", e.0, e.1));
                }
            }
            if e1 == e2 {
                return input(format!(
                    "crossing {i}: edge {}-{} crosses itself",
                    e1.0, e1.1
                ));
            }
            if e1.0 == e2.0 || e1.0 == e2.1 || e1.1 == e2.0 || e1.1 == e2.1 {
                return input(format!(
                    "crossing {i}: edges {}-{} and {}-{} share an endpoint",
                    e1.0, e1.1, e2.0, e2.1
                ));
            }
            if !pairs.insert((e1.min(e2), e1.max(e2))) {
                return input(format!(
                    "crossing {i}: edges {}-{} and {}-{} cross twice",
                    e1.0, e1.1, e2.0, e2.1
                ));
            }
            for (e, p) in [(e1, c.pos1), (e2, c.pos2)] {
                if !(p > 0.0 && p < 1.0) {
                    return input(format!("crossing {i}: position {p} outside (0, 1)"));
                }
                let at = points.entry(e).or_default();
                if at.contains(&p) {
                    return input(format!(
                        "crossing {i}: two crossings at position {p} of edge {}-{}",
                        e.0, e.1
                    ));
                }
                at.push(p);
            }
            out.push(Crossing {
                e1,
                e2,
                pos1: c.pos1,
                pos2: c.pos2,
            });
        }
        Ok(DrawnGraph {
            graph,
            crossings: out,
        })
    }

    /// Largest number of crossings on one edge.
    pub fn max_crossings_per_edge(&self) -> usize {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for c in &self.crossings {
            *count.entry(c.e1).or_default() += 1;
            *count.entry(c.e2).or_default() += 1;
        }
        count.into_values().max().unwrap_or(0)
    }

    /// Replaces crossing `c` by vertex `n + c` and splits edges at their
    /// crossings in position order.
    pub fn planarize(&self) -> Planarization {
        let n = self.graph.vertex_count();
        let mut along: HashMap<(usize, usize), Vec<(f64, usize)>> = HashMap::new();
        for (c, x) in self.crossings.iter().enumerate() {
            along.entry(x.e1).or_default().push((x.pos1, n + c));
            along.entry(x.e2).or_default().push((x.pos2, n + c));
        }
        let mut edges = Vec::new();
        let mut paths = Vec::with_capacity(self.graph.edge_count());
        for &(u, v) in self.graph.edges() {
            let mut path = vec![u];
            if let Some(list) = along.get_mut(&(u, v)) {
                list.sort_by(|a, b| a.0.total_cmp(&b.0));
                path.extend(list.iter().map(|&(_, d)| d));
            }
            path.push(v);
            for w in path.windows(2) {
                edges.push((w[0], w[1]));
            }
            paths.push(path);
        }
        let graph = Graph::new(n + self.crossings.len(), edges)
            .expect("segments of distinct edges never repeat");
        Planarization {
            graph,
            original: n,
            paths,
            crossing_endpoints: self
                .crossings
                .iter()
                .map(|c| [c.e1.0, c.e1.1, c.e2.0, c.e2.1])
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Planarization {
    /// `G'`: originals keep their ids, dummies follow.
    pub graph: Graph,
    pub original: usize,
    /// `G'` path per edge of the drawn graph, in its edge order.
    pub paths: Vec<Vec<usize>>,
    /// Endpoints of the two edges crossing at each dummy.
    pub crossing_endpoints: Vec<[usize; 4]>,
}

impl Planarization {
    pub fn is_dummy(&self, v: usize) -> bool {
        v >= self.original
    }

    /// Original vertices of `x` plus the four endpoints behind each dummy,
    /// sorted.
    pub fn lift(&self, x: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = x
            .iter()
            .flat_map(|&v| {
                if v < self.original {
                    vec![v]
                } else {
                    self.crossing_endpoints[v - self.original].to_vec()
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Edge budget accepted for a `k`-planar graph on `n` vertices:
/// `max(3n, 4.108 sqrt(k) n)`.
pub fn kplanar_edge_budget(n: usize, k: usize) -> f64 {
    (3.0 * n as f64).max(4.108 * (k as f64).sqrt() * n as f64)
}
