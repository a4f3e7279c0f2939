//! Brute-force ground truth: exact bandwidth and local density.

use std::collections::VecDeque;

use crate::error::{input, Result};
use crate::graph::{Density, Graph};
use crate::star_metric::FiniteMetric;

pub const EXACT_BANDWIDTH_MAX_N: usize = 12;
pub const BRUTE_FORCE_MAX_N: usize = 8;
pub const DENSITY_ORACLE_MAX_N: usize = 5000;

struct Search<'a> {
    g: &'a Graph,
    pos: Vec<usize>,
    placed: Vec<usize>,
    best: usize,
}

impl Search<'_> {
    /// Tries to place the remaining vertices so every gap stays below
    /// `self.best`.
    fn extend(&mut self) -> bool {
        let n = self.g.vertex_count();
        let p = self.placed.len();
        if p == n {
            return true;
        }
        // a placed vertex with an unplaced neighbour must see it within best-1
        for (q, &u) in self.placed.iter().enumerate() {
            if p - q >= self.best
                && self
                    .g
                    .neighbors(u)
                    .iter()
                    .any(|&w| self.pos[w] == usize::MAX)
            {
                return false;
            }
        }
        for v in 0..n {
            if self.pos[v] != usize::MAX {
                continue;
            }
            let ok = self
                .g
                .neighbors(v)
                .iter()
                .all(|&w| self.pos[w] == usize::MAX || p - self.pos[w] < self.best);
            if !ok {
                continue;
            }
            self.pos[v] = p;
            self.placed.push(v);
            if self.extend() {
                return true;
            }
            self.placed.pop();
            self.pos[v] = usize::MAX;
        }
        false
    }
}

/// Minimum bandwidth over all orderings, by left-to-right branch and bound.
pub fn exact_bandwidth(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > EXACT_BANDWIDTH_MAX_N {
        return input(format!(
            "exact bandwidth limited to {EXACT_BANDWIDTH_MAX_N} vertices, got {n}"
        ));
    }
    if g.edge_count() == 0 {
        return Ok(0);
    }
    // decide bw <= b for increasing b
    for b in 1..n {
        let mut s = Search {
            g,
            pos: vec![usize::MAX; n],
            placed: Vec::with_capacity(n),
            best: b + 1,
        };
        if s.extend() {
            return Ok(b);
        }
    }
    Ok(n - 1)
}

/// Minimum bandwidth by scanning all `n!` permutations.
pub fn brute_force_bandwidth(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_MAX_N {
        return input(format!(
            "permutation scan limited to {BRUTE_FORCE_MAX_N} vertices, got {n}"
        ));
    }
    let eval = |perm: &[usize]| {
        let mut pos = vec![0; n];
        for (i, &v) in perm.iter().enumerate() {
            pos[v] = i;
        }
        g.edges()
            .iter()
            .map(|&(u, v)| pos[u].abs_diff(pos[v]))
            .max()
            .unwrap_or(0)
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = eval(&perm);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(eval(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// `max (|B(v, r)| - 1) / r` over every vertex and every integer radius up
/// to its eccentricity. An empty graph has density 0.
pub fn exhaustive_local_density(g: &Graph, removed: &[usize]) -> Result<Density> {
    let n = g.vertex_count();
    if n > DENSITY_ORACLE_MAX_N {
        return input(format!(
            "density oracle limited to {DENSITY_ORACLE_MAX_N} vertices, got {n}"
        ));
    }
    let mut gone = vec![false; n];
    for &x in removed {
        if x >= n {
            return input(format!("removed vertex {x} out of range"));
        }
        gone[x] = true;
    }
    let mut best = Density::from_integer(0);
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in (0..n).filter(|&s| !gone[s]) {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut seen = Vec::new();
        while let Some(u) = queue.pop_front() {
            seen.push(dist[u]);
            for &w in g.neighbors(u) {
                if !gone[w] && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        let ecc = *seen.last().unwrap_or(&0);
        for r in 1..=ecc {
            let ball = seen.iter().filter(|&&d| d <= r).count() as u64;
            let cand = Density::new(ball - 1, r as u64);
            if cand > best {
                best = cand;
            }
        }
    }
    Ok(best)
}

/// Metric version over integer distances, scanning every integer radius up
/// to the largest finite distance.
pub fn exhaustive_metric_density(m: &FiniteMetric) -> Result<Density> {
    let k = m.len();
    if k > DENSITY_ORACLE_MAX_N {
        return input(format!(
            "density oracle limited to {DENSITY_ORACLE_MAX_N} points, got {k}"
        ));
    }
    let mut best = Density::from_integer(0);
    for a in 0..k {
        let mut row = Vec::with_capacity(k);
        for b in 0..k {
            let d = m.get(a, b);
            if b != a && d.is_finite() {
                if d.fract() != 0.0 || d <= 0.0 {
                    return input(format!("d({a},{b}) = {d} is not a positive integer"));
                }
                row.push(d as u64);
            }
        }
        let top = row.iter().copied().max().unwrap_or(0);
        for r in 1..=top {
            let ball = row.iter().filter(|&&d| d <= r).count() as u64;
            let cand = Density::new(ball, r);
            if cand > best {
                best = cand;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, cycle, path};

    #[test]
    fn bandwidth_examples() {
        assert_eq!(exact_bandwidth(&path(5)).unwrap(), 1);
        assert_eq!(exact_bandwidth(&complete(4)).unwrap(), 3);
        assert_eq!(exact_bandwidth(&cycle(5)).unwrap(), 2);
        assert_eq!(brute_force_bandwidth(&cycle(5)).unwrap(), 2);
        assert_eq!(exact_bandwidth(&Graph::empty(3)).unwrap(), 0);
        assert!(exact_bandwidth(&Graph::empty(13)).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(
            exhaustive_local_density(&cycle(7), &[]).unwrap(),
            Density::from_integer(2)
        );
        let star = Graph::new(6, (1..6).map(|v| (0, v))).unwrap();
        assert_eq!(
            exhaustive_local_density(&star, &[]).unwrap(),
            Density::from_integer(5)
        );
        assert_eq!(
            exhaustive_local_density(&star, &[0]).unwrap(),
            Density::from_integer(0)
        );
    }
}
