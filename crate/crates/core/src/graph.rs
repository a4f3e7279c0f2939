//! Undirected simple graphs over dense vertex ids, deleted-vertex views, and
//! the basic measurements everything else is built on: BFS distances,
//! layerings, fans, blowups, bandwidth of an ordering and local density.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;

use crate::error::{input, Error, Result};

/// Hop distance with an absorbing infinity for unreachable pairs.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dist(u32);

impl Dist {
    pub const INF: Dist = Dist(u32::MAX);
    pub const ZERO: Dist = Dist(0);

    pub fn new(d: u32) -> Self {
        debug_assert!(d != u32::MAX);
        Dist(d)
    }

    pub fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }

    pub fn get(self) -> Option<u32> {
        self.is_finite().then_some(self.0)
    }

    /// The finite value; panics on infinity.
    pub fn value(self) -> u32 {
        self.get().expect("infinite distance")
    }

    pub fn as_f64(self) -> f64 {
        match self.get() {
            Some(d) => d as f64,
            None => f64::INFINITY,
        }
    }
}

impl Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self.get(), rhs.get()) {
            (Some(a), Some(b)) => Dist(a.saturating_add(b).min(u32::MAX - 1)),
            _ => Dist::INF,
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(d) => write!(f, "{d}"),
            None => write!(f, "inf"),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Exact local density value.
pub type Density = Ratio<u64>;

/// `density <= bound`, compared without dividing.
pub fn density_le(density: &Density, bound: f64) -> bool {
    (*density.numer() as f64) <= bound * (*density.denom() as f64)
}

/// Immutable undirected simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.vertex_count())
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and endpoints
    /// outside `0..n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u}, {v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            list.push((u.min(v), u.max(v)));
        }
        let before = list.len();
        list.sort_unstable();
        list.dedup();
        if list.len() != before {
            let dup = find_duplicate(list.iter().copied(), before);
            return input(format!("duplicate edge {dup:?}"));
        }
        Ok(Self::from_sorted(n, list))
    }

    /// Like [`Graph::new`] but silently merges parallel edges.
    pub fn from_edges_dedup(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u}, {v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted(n, list))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            input(format!("vertex {v} outside 0..{}", self.vertex_count()))
        }
    }

    /// Copy of the subgraph induced by `keep`, re-indexed in the order given.
    /// The second component maps new ids back to ids of `self`.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let mut edges = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            for &w in &self.adj[old] {
                let nw = index[w];
                if nw != usize::MAX && new < nw {
                    edges.push((new, nw));
                }
            }
        }
        edges.sort_unstable();
        (Graph::from_sorted(keep.len(), edges), keep.to_vec())
    }

    /// View with every vertex present.
    pub fn view(&self) -> GraphView<'_> {
        GraphView {
            graph: self,
            alive: vec![true; self.vertex_count()],
            alive_count: self.vertex_count(),
        }
    }

    /// The view `G - removed`; ids keep referring to `self`.
    pub fn without(&self, removed: &[usize]) -> Result<GraphView<'_>> {
        let mut view = self.view();
        for &v in removed {
            self.check_vertex(v)?;
            if view.alive[v] {
                view.alive[v] = false;
                view.alive_count -= 1;
            }
        }
        Ok(view)
    }

    /// Connected components as a label per vertex plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        self.view().components()
    }
}

fn find_duplicate(
    sorted_dedup: impl Iterator<Item = (usize, usize)>,
    _original_len: usize,
) -> (usize, usize) {
    // only reached on error paths; report the first edge that repeats
    let mut prev = None;
    for e in sorted_dedup {
        prev = Some(e);
    }
    prev.unwrap_or((0, 0))
}

/// A graph with some vertices masked out. Vertex ids are those of the
/// underlying graph.
#[derive(Clone, Debug)]
pub struct GraphView<'a> {
    graph: &'a Graph,
    alive: Vec<bool>,
    alive_count: usize,
}

impl<'a> GraphView<'a> {
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn len(&self) -> usize {
        self.alive_count
    }

    pub fn is_empty(&self) -> bool {
        self.alive_count == 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.adj[v]
            .iter()
            .copied()
            .filter(move |&w| self.alive[w])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph
            .edges
            .iter()
            .copied()
            .filter(move |&(u, v)| self.alive[u] && self.alive[v])
    }

    /// Hop distances from `source` inside the view.
    pub fn bfs(&self, source: usize) -> Result<Vec<Dist>> {
        if !self.contains(source) {
            return input(format!("source vertex {source} is not in the graph"));
        }
        let mut dist = vec![Dist::INF; self.alive.len()];
        let mut queue = VecDeque::new();
        dist[source] = Dist::ZERO;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = Dist::new(dist[u].value() + 1);
            for w in self.neighbors(u) {
                if !dist[w].is_finite() {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.alive.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in self.vertices() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

/// Anything that can be looked at as a (possibly vertex-deleted) graph.
pub trait AsGraphView {
    fn as_view(&self) -> GraphView<'_>;
}

impl AsGraphView for Graph {
    fn as_view(&self) -> GraphView<'_> {
        self.view()
    }
}

impl AsGraphView for GraphView<'_> {
    fn as_view(&self) -> GraphView<'_> {
        self.clone()
    }
}

pub fn bfs_distances<G: AsGraphView + ?Sized>(g: &G, source: usize) -> Result<Vec<Dist>> {
    g.as_view().bfs(source)
}

/// Distance in a strong product from the distances in its two factors.
pub fn product_distance(dh: Dist, dp: Dist) -> Dist {
    dh.max(dp)
}

/// Fan on `path_len + 1` vertices. Vertex 0 is the center; `1..=path_len`
/// is the path.
pub fn build_fan(path_len: usize) -> Result<Graph> {
    if path_len == 0 {
        return input("a fan needs at least one path vertex");
    }
    let spokes = (1..=path_len).map(|i| (0, i));
    let path = (1..path_len).map(|i| (i, i + 1));
    Graph::new(path_len + 1, spokes.chain(path))
}

/// The `b`-blowup of a graph.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub graph: Graph,
    pub b: usize,
}

impl Blowup {
    /// Blowup vertex for slot `slot` of the clique replacing `v`.
    pub fn vertex(&self, v: usize, slot: usize) -> usize {
        debug_assert!(slot < self.b);
        v * self.b + slot
    }

    /// Inverse of [`Blowup::vertex`].
    pub fn origin(&self, x: usize) -> (usize, usize) {
        (x / self.b, x % self.b)
    }
}

pub fn build_blowup(h: &Graph, b: usize) -> Result<Blowup> {
    if b == 0 {
        return input("blowup factor must be at least 1");
    }
    let n = h.vertex_count();
    let mut edges = Vec::new();
    for v in 0..n {
        for s in 0..b {
            for t in s + 1..b {
                edges.push((v * b + s, v * b + t));
            }
        }
    }
    for &(v, w) in h.edges() {
        for s in 0..b {
            for t in 0..b {
                edges.push((v * b + s, w * b + t));
            }
        }
    }
    Ok(Blowup {
        graph: Graph::new(n * b, edges)?,
        b,
    })
}

/// Assignment of vertices to integer layers such that every edge joins equal
/// or consecutive layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    layer_of: Vec<usize>,
}

impl Layering {
    pub fn new(g: &Graph, layer_of: Vec<usize>) -> Result<Self> {
        if layer_of.len() != g.vertex_count() {
            return input(format!(
                "layering covers {} vertices, graph has {}",
                layer_of.len(),
                g.vertex_count()
            ));
        }
        for &(u, v) in g.edges() {
            if layer_of[u].abs_diff(layer_of[v]) > 1 {
                return input(format!(
                    "edge ({u}, {v}) joins layers {} and {}",
                    layer_of[u], layer_of[v]
                ));
            }
        }
        Ok(Layering { layer_of })
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layer_of[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn len(&self) -> usize {
        self.layer_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layer_of.is_empty()
    }

    pub fn layer_count(&self) -> usize {
        self.layer_of.iter().max().map_or(0, |&m| m + 1)
    }

    /// Vertices grouped by layer, each group sorted by id.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.layer_count()];
        for (v, &l) in self.layer_of.iter().enumerate() {
            out[l].push(v);
        }
        out
    }
}

/// BFS layering from `root`. Components not reachable from `root` are
/// layered from their lowest-id vertex, also starting at layer 0.
pub fn bfs_layering(g: &Graph, root: usize) -> Result<Layering> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Layering {
            layer_of: Vec::new(),
        });
    }
    g.check_vertex(root)?;
    let mut layer = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let roots = std::iter::once(root).chain(0..n);
    for r in roots {
        if layer[r] != usize::MAX {
            continue;
        }
        layer[r] = 0;
        queue.push_back(r);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(Layering { layer_of: layer })
}

/// A sequence of distinct vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VertexOrdering(Vec<usize>);

impl VertexOrdering {
    pub fn new(sequence: Vec<usize>) -> Self {
        VertexOrdering(sequence)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of each vertex of the view, checking that the ordering is a
    /// permutation of exactly the view's vertices.
    pub fn positions(&self, view: &GraphView<'_>) -> Result<Vec<usize>> {
        let n = view.graph().vertex_count();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in self.0.iter().enumerate() {
            if !view.contains(v) {
                return input(format!(
                    "ordering contains vertex {v} which is not in the graph"
                ));
            }
            if pos[v] != usize::MAX {
                return input(format!("ordering lists vertex {v} twice"));
            }
            pos[v] = i;
        }
        if self.0.len() != view.len() {
            let missing = view.vertices().find(|&v| pos[v] == usize::MAX).unwrap_or(0);
            return input(format!("ordering misses vertex {missing}"));
        }
        Ok(pos)
    }
}

/// Largest index gap across an edge under `ord`; 0 when there are no edges.
pub fn bandwidth_of_ordering<G: AsGraphView + ?Sized>(
    g: &G,
    ord: &VertexOrdering,
) -> Result<usize> {
    let view = g.as_view();
    let pos = ord.positions(&view)?;
    Ok(view
        .edges()
        .map(|(u, v)| pos[u].abs_diff(pos[v]))
        .max()
        .unwrap_or(0))
}

/// Exact `max (|B(v,r)| - 1) / r` over vertices and realized radii, one BFS
/// per vertex.
pub fn graph_local_density<G: AsGraphView + ?Sized>(g: &G) -> Result<Density> {
    let view = g.as_view();
    if view.is_empty() {
        return input("local density of an empty graph is undefined");
    }
    let mut best = Density::from_integer(0);
    let mut counts: Vec<u64> = Vec::new();
    for v in view.vertices() {
        let dist = view.bfs(v)?;
        counts.clear();
        for d in dist.iter().filter_map(|d| d.get()) {
            let d = d as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        let mut ball = counts[0];
        for (r, &c) in counts.iter().enumerate().skip(1) {
            ball += c;
            if c > 0 {
                let cand = Density::new(ball - 1, r as u64);
                if cand > best {
                    best = cand;
                }
            }
        }
    }
    Ok(best)
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub(crate) fn floor_log2(n: usize) -> u32 {
    assert!(n > 0);
    usize::BITS - 1 - n.leading_zeros()
}

/// Checks the invariants shared by everything that consumes a vertex set.
pub fn check_vertex_set(n: usize, set: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::Input(format!("vertex {v} outside 0..{n}")));
        }
        if seen[v] {
            return Err(Error::Input(format!("vertex {v} listed twice")));
        }
        seen[v] = true;
    }
    Ok(())
}
