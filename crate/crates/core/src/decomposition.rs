//! Tree decompositions: validation, min-fill construction, bag-clique
//! completion and the heavy-subtree weighted separator.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{input, Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
    declared_width: Option<usize>,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; nothing else is checked here.
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition {
            bags,
            tree_edges,
            declared_width: None,
        }
    }

    /// Records a width claimed by an external producer, checked by
    /// [`validate_decomposition`].
    pub fn with_declared_width(mut self, w: usize) -> Self {
        self.declared_width = Some(w);
        self
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, x: usize) -> &[usize] {
        &self.bags[x]
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; 0 for a decomposition without vertices.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).max(1) - 1
    }

    /// Tree adjacency lists.
    pub fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(x, y) in &self.tree_edges {
            if x < adj.len() && y < adj.len() {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Same tree with every bag mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(usize) -> usize) -> Self {
        TreeDecomposition::new(
            self.bags
                .iter()
                .map(|b| b.iter().map(|&v| f(v)).collect())
                .collect(),
            self.tree_edges.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree(String),
    VertexOutOfRange { node: usize, vertex: usize },
    UncoveredEdge(usize, usize),
    MissingVertex(usize),
    DisconnectedTrace(usize),
    WidthMismatch { declared: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree(msg) => write!(f, "tree edges do not form a tree: {msg}"),
            Violation::VertexOutOfRange { node, vertex } => {
                write!(f, "bag {node} contains vertex {vertex} outside the graph")
            }
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u}, {v}) is in no bag"),
            Violation::MissingVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::DisconnectedTrace(v) => {
                write!(f, "bags containing vertex {v} do not form a subtree")
            }
            Violation::WidthMismatch { declared, actual } => {
                write!(f, "declared width {declared} but bags give {actual}")
            }
        }
    }
}

/// Every violated condition; empty means valid.
pub fn validate_decomposition(g: &Graph, td: &TreeDecomposition) -> Vec<Violation> {
    let n = g.vertex_count();
    let k = td.node_count();
    let mut out = Vec::new();

    for &(x, y) in td.tree_edges() {
        if x >= k || y >= k {
            out.push(Violation::NotATree(format!(
                "edge ({x}, {y}) names a missing node"
            )));
            return out;
        }
        if x == y {
            out.push(Violation::NotATree(format!("loop at node {x}")));
            return out;
        }
    }
    let adj = td.tree_adjacency();
    if k > 0 {
        if td.tree_edges().len() != k - 1 {
            out.push(Violation::NotATree(format!(
                "{} nodes need {} edges, found {}",
                k,
                k - 1,
                td.tree_edges().len()
            )));
        } else if reach(&adj, 0, |_| true).iter().filter(|&&r| r).count() != k {
            out.push(Violation::NotATree("disconnected".into()));
        }
    }

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(Violation::VertexOutOfRange { node: x, vertex: v });
            } else {
                holders[v].push(x);
            }
        }
    }

    let bag_sets: Vec<HashSet<usize>> = td
        .bags()
        .iter()
        .map(|b| b.iter().copied().collect())
        .collect();
    for &(u, v) in g.edges() {
        if !holders[u].iter().any(|&x| bag_sets[x].contains(&v)) {
            out.push(Violation::UncoveredEdge(u, v));
        }
    }

    let tree_ok = !out.iter().any(|v| matches!(v, Violation::NotATree(_)));
    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            out.push(Violation::MissingVertex(v));
        } else if tree_ok {
            let inside: HashSet<usize> = hs.iter().copied().collect();
            let seen = reach(&adj, hs[0], |x| inside.contains(&x));
            if hs.iter().any(|&x| !seen[x]) {
                out.push(Violation::DisconnectedTrace(v));
            }
        }
    }

    if let Some(declared) = td.declared_width {
        if declared != td.width() {
            out.push(Violation::WidthMismatch {
                declared,
                actual: td.width(),
            });
        }
    }
    out
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] && allowed(y) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Elimination-order decomposition using the min-fill rule, ties to the
/// lowest vertex id. One bag per vertex: the vertex and its neighbours at
/// elimination time.
pub fn minfill_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    let n = g.vertex_count();
    if n == 0 {
        return input("cannot decompose an empty graph");
    }
    let mut adj: Vec<HashSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut fill = vec![0usize; n];
    for v in 0..n {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        fill[v] = missing;
    }
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (fill[v], v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    let mut done = vec![false; n];

    fn set_fill(queue: &mut BTreeSet<(usize, usize)>, fill: &mut [usize], v: usize, f: usize) {
        queue.remove(&(fill[v], v));
        fill[v] = f;
        queue.insert((f, v));
    }

    while let Some((_, v)) = queue.pop_first() {
        done[v] = true;
        let mut nb: Vec<usize> = adj[v].iter().copied().collect();
        nb.sort_unstable();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let (a, b) = (nb[i], nb[j]);
                if adj[a].contains(&b) {
                    continue;
                }
                // pair (a, b) becomes adjacent: common neighbours lose one
                // missing pair, a and b gain the pairs they now lack
                let common: Vec<usize> = adj[a]
                    .iter()
                    .copied()
                    .filter(|x| adj[b].contains(x))
                    .collect();
                for x in common {
                    if !done[x] {
                        let f = fill[x] - 1;
                        set_fill(&mut queue, &mut fill, x, f);
                    }
                }
                let gain_a = adj[a].iter().filter(|y| !adj[b].contains(y)).count();
                let gain_b = adj[b].iter().filter(|y| !adj[a].contains(y)).count();
                // v itself is a common neighbour and already left the queue
                let fa = fill[a] + gain_a;
                set_fill(&mut queue, &mut fill, a, fa);
                let fb = fill[b] + gain_b;
                set_fill(&mut queue, &mut fill, b, fb);
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &u in &nb {
            let lost = adj[u]
                .iter()
                .filter(|&&y| y != v && !adj[v].contains(&y))
                .count();
            let f = fill[u] - lost;
            set_fill(&mut queue, &mut fill, u, f);
            adj[u].remove(&v);
        }
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        order.push(v);
    }

    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut last_root: Option<usize> = None;
    for (i, bag) in bags.iter().enumerate() {
        let v = order[i];
        let parent = bag.iter().filter(|&&u| u != v).map(|&u| pos[u]).min();
        match parent {
            Some(p) => edges.push((i, p)),
            None => {
                if let Some(r) = last_root {
                    edges.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    Ok(TreeDecomposition::new(bags, edges))
}

/// Supergraph of `h` in which every bag of `td` is a clique.
pub fn ttree_complete(h: &Graph, td: &TreeDecomposition) -> Result<Graph> {
    let bad = validate_decomposition(h, td);
    if let Some(v) = bad.first() {
        return input(format!("invalid tree decomposition: {v}"));
    }
    let mut edges: Vec<(usize, usize)> = h.edges().to_vec();
    for bag in td.bags() {
        for (i, &a) in bag.iter().enumerate() {
            for &b in &bag[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges_dedup(h.vertex_count(), edges)
}

/// Output of [`weighted_separator`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separator {
    /// Chosen tree nodes, in selection order.
    pub nodes: Vec<usize>,
    /// Union of the chosen bags, each restricted to the vertices still
    /// present when it was chosen. Sorted.
    pub removed: Vec<usize>,
}

/// At most `c - 1` bags whose removal leaves components of weight at most
/// `xi(h) / c`.
///
/// Each round roots the tree at node 0, walks down through heavy children
/// (lowest id first) to a heavy node `y` with no heavy child, deletes all
/// vertices of the subtree graph below `y` and recurses with `c - 1` on the
/// rest, bags restricted to surviving vertices. A round is skipped once
/// every remaining component already meets the target.
pub fn weighted_separator(
    h: &Graph,
    td: &TreeDecomposition,
    xi: &[u64],
    c: u64,
) -> Result<Separator> {
    let n = h.vertex_count();
    if c == 0 {
        return input("separator parameter c must be at least 1");
    }
    if xi.len() != n {
        return input(format!("{} weights for {} vertices", xi.len(), n));
    }
    let mut nodes = Vec::new();
    let mut removed_flag = vec![false; n];
    if c == 1 || n == 0 {
        return Ok(Separator {
            nodes,
            removed: Vec::new(),
        });
    }
    if let Some(v) = validate_decomposition(h, td).first() {
        return input(format!("invalid tree decomposition: {v}"));
    }

    let k = td.node_count();
    let adj = td.tree_adjacency();
    let mut parent = vec![usize::MAX; k];
    let mut depth = vec![0usize; k];
    let mut bfs_order = Vec::with_capacity(k);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    {
        let mut q = VecDeque::from([0usize]);
        let mut seen = vec![false; k];
        seen[0] = true;
        while let Some(x) = q.pop_front() {
            bfs_order.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    children[x].push(y);
                    q.push_back(y);
                }
            }
        }
    }
    let mut top = vec![usize::MAX; n];
    for (x, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if top[v] == usize::MAX || depth[x] < depth[top[v]] {
                top[v] = x;
            }
        }
    }
    let mut hosted: Vec<Vec<usize>> = vec![Vec::new(); k];
    for v in 0..n {
        hosted[top[v]].push(v);
    }

    let total_all: u128 = xi.iter().map(|&w| w as u128).sum();
    let mut alive = vec![true; n];
    let mut budget = c;
    while budget >= 2 {
        let total: u128 = (0..n).filter(|&v| alive[v]).map(|v| xi[v] as u128).sum();
        if total == 0 {
            break;
        }
        // every component light already: S' = {} works for this round
        if max_component_weight(h, &alive, xi) * budget as u128 <= total {
            break;
        }
        let mut sub = vec![0u128; k];
        for &x in bfs_order.iter().rev() {
            let own: u128 = hosted[x]
                .iter()
                .filter(|&&v| alive[v])
                .map(|&v| xi[v] as u128)
                .sum();
            sub[x] += own;
            if parent[x] != usize::MAX {
                let s = sub[x];
                sub[parent[x]] += s;
            }
        }
        let heavy = |x: usize| sub[x] * budget as u128 >= total;
        let mut y = 0;
        while let Some(&next) = children[y].iter().find(|&&z| heavy(z)) {
            y = next;
        }
        nodes.push(y);
        for &v in td.bag(y) {
            if alive[v] {
                removed_flag[v] = true;
            }
        }
        let mut stack = vec![y];
        while let Some(x) = stack.pop() {
            for &v in &hosted[x] {
                alive[v] = false;
            }
            stack.extend(children[x].iter().copied());
        }
        budget -= 1;
    }
    let removed: Vec<usize> = (0..n).filter(|&v| removed_flag[v]).collect();

    let mut keep = vec![true; n];
    for &v in &removed {
        keep[v] = false;
    }
    let worst = max_component_weight(h, &keep, xi);
    if worst * c as u128 > total_all {
        return Err(Error::Invariant(format!(
            "separator left a component of weight {worst} above {total_all}/{c}"
        )));
    }
    Ok(Separator { nodes, removed })
}

/// Heaviest component of `h` restricted to `alive`.
pub fn max_component_weight(h: &Graph, alive: &[bool], xi: &[u64]) -> u128 {
    component_weights(h, alive, xi)
        .into_iter()
        .max()
        .unwrap_or(0)
}

/// Weights of the components of `h` restricted to `alive`.
pub fn component_weights(h: &Graph, alive: &[bool], xi: &[u64]) -> Vec<u128> {
    let n = h.vertex_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut w = 0u128;
        while let Some(u) = stack.pop() {
            w += xi[u] as u128;
            for &x in h.neighbors(u) {
                if alive[x] && !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        out.push(w);
    }
    out
}
