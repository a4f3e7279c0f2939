//! Tree volume, simplex volume, the tree/ideal volume sandwich and the
//! reciprocal tree-volume sum.

use nalgebra::DMatrix;

use crate::error::{input, Error, Result};
use crate::star_metric::FiniteMetric;

/// Points in `R^L`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return input(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                ));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return input(format!("point {i} has a non-finite coordinate"));
            }
            coords.extend_from_slice(p);
        }
        Ok(PointSet { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Induced Euclidean metric.
    pub fn metric(&self) -> FiniteMetric {
        let k = self.len();
        let mut d = vec![0.0; k * k];
        for a in 0..k {
            for b in a + 1..k {
                let v = euclidean(self.point(a), self.point(b));
                d[a * k + b] = v;
                d[b * k + a] = v;
            }
        }
        FiniteMetric::from_raw(k, d)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Product of minimum spanning tree edge lengths (Prim, lowest index on
/// ties). One point gives the empty product 1.
pub fn tree_volume(m: &FiniteMetric) -> Result<f64> {
    mst_edges(m).map(|e| e.iter().product())
}

/// Weights of a minimum spanning tree.
pub fn mst_edges(m: &FiniteMetric) -> Result<Vec<f64>> {
    let k = m.len();
    if k == 0 {
        return input("tree volume of an empty set");
    }
    for a in 0..k {
        for b in a + 1..k {
            if m.get(a, b) == 0.0 {
                return Err(Error::Degenerate(format!(
                    "points {a} and {b} are at distance 0"
                )));
            }
        }
    }
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    let mut out = Vec::with_capacity(k - 1);
    in_tree[0] = true;
    for b in 1..k {
        best[b] = m.get(0, b);
    }
    for _ in 1..k {
        let mut pick = usize::MAX;
        for b in 0..k {
            if !in_tree[b] && (pick == usize::MAX || best[b] < best[pick]) {
                pick = b;
            }
        }
        in_tree[pick] = true;
        out.push(best[pick]);
        for b in 0..k {
            if !in_tree[b] {
                best[b] = best[b].min(m.get(pick, b));
            }
        }
    }
    Ok(out)
}

/// `(k-1)`-dimensional volume of the simplex on the points, from the Gram
/// determinant of the edge vectors at the first point.
pub fn euclidean_volume(ps: &PointSet) -> Result<f64> {
    let k = ps.len();
    if k == 0 {
        return input("volume of an empty point set");
    }
    if k > ps.dim() + 1 {
        return input(format!("{k} points span at most {} dimensions", ps.dim()));
    }
    Ok(simplex_volume(
        &(0..k).map(|i| ps.point(i)).collect::<Vec<_>>(),
    ))
}

/// Simplex volume of borrowed points of equal dimension.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let k = points.len();
    if k <= 1 {
        return 1.0;
    }
    let base = points[0];
    let edges: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let m = k - 1;
    let gram = DMatrix::from_fn(m, m, |r, c| {
        edges[r]
            .iter()
            .zip(&edges[c])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    });
    let det = gram.determinant().max(0.0);
    det.sqrt() / factorial(m)
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|x| x as f64).product()
}

/// `(tvol / ((k-1)! 2^((k-2)/2)), tvol / (k-1)!)`.
pub fn ivol_sandwich(m: &FiniteMetric) -> Result<(f64, f64)> {
    let k = m.len();
    if k < 2 {
        return input("the volume sandwich needs at least two points");
    }
    let tvol = tree_volume(m)?;
    let upper = tvol / factorial(k - 1);
    let lower = upper / 2f64.powf((k as f64 - 2.0) / 2.0);
    Ok((lower, upper))
}

pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocalSum {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub const RECIPROCAL_MAX_N: usize = 14;

/// `sum over k-subsets of 1/tvol` against `n (D H_n / 2)^(k-1)`.
pub fn reciprocal_sum_check(m: &FiniteMetric, d: f64, k: usize) -> Result<ReciprocalSum> {
    let n = m.len();
    if n > RECIPROCAL_MAX_N {
        return Err(Error::Oversize(format!(
            "{n} points; subset enumeration is limited to {RECIPROCAL_MAX_N}"
        )));
    }
    if k < 2 || k > n {
        return input(format!("subset size k = {k} must lie in 2..={n}"));
    }
    let mut lhs = 0.0;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        lhs += 1.0 / tree_volume(&m.restrict(&idx))?;
        // next k-combination in lexicographic order
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    let rhs = n as f64 * (d * harmonic(n) / 2.0).powi(k as i32 - 1);
    Ok(ReciprocalSum {
        lhs,
        rhs,
        ok: lhs <= rhs,
    })
}

/// `max_x sum_{y != x} 1 / d(x, y)`, the per-point quantity bounded by
/// `D H_n` for density-`D` metrics.
pub fn max_reciprocal_row(m: &FiniteMetric) -> f64 {
    let k = m.len();
    (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| b != a)
                .map(|b| 1.0 / m.get(a, b))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
