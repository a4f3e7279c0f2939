//! Fan-blowup certificates: build, verify, serialize, and the converse
//! direction from a blowup embedding back to a bandwidth ordering.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{input, Error, Result};
use crate::graph::{bandwidth_of_ordering, Graph, VertexOrdering};

/// Embedding of `G` into the `b`-blowup of a fan with `fan_size` nodes;
/// node 0 is the center, `1..fan_size` the path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanCertificate {
    pub n: usize,
    pub b: usize,
    pub fan_size: usize,
    /// Center preimage, in the order it was assigned slots.
    pub x: Vec<usize>,
    /// Ordering of `G - X`.
    pub ordering: Vec<usize>,
    /// `(node, slot)` per vertex.
    pub mapping: Vec<(usize, usize)>,
    pub measured_bandwidth: usize,
    pub seeds: Vec<u64>,
    /// Free-form parameter echo, `key value` pairs without whitespace.
    pub params: Vec<(String, String)>,
}

/// `max(2, ceil(n / b))`: one center plus at least one path node.
pub fn fan_size_for(n: usize, b: usize) -> usize {
    n.div_ceil(b).max(2)
}

/// Builds the certificate from `X` and an ordering of `G - X` of bandwidth
/// at most `b`. `X` is padded to exactly `b` vertices from the tail of the
/// ordering.
pub fn fan_certificate(
    g: &Graph,
    x: &[usize],
    ord: &VertexOrdering,
    b: usize,
) -> Result<FanCertificate> {
    let n = g.vertex_count();
    if n == 0 {
        return input("cannot certify an empty graph");
    }
    if b == 0 || b > n {
        return input(format!("b = {b} outside 1..={n}"));
    }
    if x.len() > b {
        return Err(Error::Constraint(format!(
            "|X| = {} exceeds b = {b}",
            x.len()
        )));
    }
    let view = g.without(x)?;
    let bw = bandwidth_of_ordering(&view, ord)?;
    if bw > b {
        return Err(Error::Constraint(format!(
            "bw(G - X) = {bw} exceeds b = {b}"
        )));
    }
    let mut xs = x.to_vec();
    let mut rest = ord.as_slice().to_vec();
    while xs.len() < b {
        xs.push(rest.pop().expect("n >= b leaves enough vertices"));
    }
    let fan_size = fan_size_for(n, b);
    let mut mapping = vec![(usize::MAX, usize::MAX); n];
    for (slot, &v) in xs.iter().enumerate() {
        mapping[v] = (0, slot);
    }
    for (pos, &v) in rest.iter().enumerate() {
        mapping[v] = (1 + pos / b, pos % b);
    }
    let measured = bandwidth_of_ordering(&g.without(&xs)?, &VertexOrdering::new(rest.clone()))?;
    Ok(FanCertificate {
        n,
        b,
        fan_size,
        x: xs,
        ordering: rest,
        mapping,
        measured_bandwidth: measured,
        seeds: Vec::new(),
        params: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertViolation {
    VertexCount {
        graph: usize,
        certificate: usize,
    },
    BadFanSize {
        fan_size: usize,
        expected: usize,
    },
    SlotOutOfRange {
        vertex: usize,
        node: usize,
        slot: usize,
    },
    SlotCollision {
        a: usize,
        b: usize,
        node: usize,
        slot: usize,
    },
    NonFanEdge {
        u: usize,
        v: usize,
        nu: usize,
        nv: usize,
    },
    CenterMismatch {
        vertex: usize,
    },
    OrderingMismatch(String),
    BandwidthMismatch {
        claimed: usize,
        actual: usize,
    },
    /// Entry differs from the one `x` and `ordering` determine.
    MappingMismatch {
        vertex: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
}

impl fmt::Display for CertViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertViolation::VertexCount { graph, certificate } => {
                write!(f, "graph has {graph} vertices, certificate {certificate}")
            }
            CertViolation::BadFanSize { fan_size, expected } => {
                write!(f, "fan_size {fan_size}, expected {expected}")
            }
            CertViolation::SlotOutOfRange { vertex, node, slot } => {
                write!(
                    f,
                    "vertex {vertex} mapped to ({node}, {slot}) outside the blowup"
                )
            }
            CertViolation::SlotCollision { a, b, node, slot } => {
                write!(f, "vertices {a} and {b} share slot ({node}, {slot})")
            }
            CertViolation::NonFanEdge { u, v, nu, nv } => write!(
                f,
                "edge {u}-{v} maps to fan nodes {nu} and {nv}, which are not adjacent"
            ),
            CertViolation::CenterMismatch { vertex } => {
                write!(
                    f,
                    "vertex {vertex} disagrees between X and the center clique"
                )
            }
            CertViolation::OrderingMismatch(s) => write!(f, "ordering: {s}"),
            CertViolation::BandwidthMismatch { claimed, actual } => {
                write!(f, "measured_bandwidth {claimed}, recomputed {actual}")
            }
            CertViolation::MappingMismatch {
                vertex,
                expected,
                found,
            } => write!(
                f,
                "vertex {vertex} mapped to {found:?}, x and ordering place it at {expected:?}"
            ),
        }
    }
}

fn fan_adjacent(a: usize, b: usize) -> bool {
    a == b || a == 0 || b == 0 || a.abs_diff(b) == 1
}

/// Checks the mapping alone: slot bounds, injectivity, fan adjacency of
/// every edge.
fn mapping_violations(
    g: &Graph,
    mapping: &[(usize, usize)],
    b: usize,
    fan_size: usize,
) -> Vec<CertViolation> {
    let mut out = Vec::new();
    if mapping.len() != g.vertex_count() {
        out.push(CertViolation::VertexCount {
            graph: g.vertex_count(),
            certificate: mapping.len(),
        });
        return out;
    }
    let mut owner = std::collections::HashMap::new();
    for (v, &(node, slot)) in mapping.iter().enumerate() {
        if node >= fan_size || slot >= b {
            out.push(CertViolation::SlotOutOfRange {
                vertex: v,
                node,
                slot,
            });
            continue;
        }
        if let Some(&a) = owner.get(&(node, slot)) {
            out.push(CertViolation::SlotCollision {
                a,
                b: v,
                node,
                slot,
            });
        } else {
            owner.insert((node, slot), v);
        }
    }
    for &(u, v) in g.edges() {
        let (nu, nv) = (mapping[u].0, mapping[v].0);
        if !fan_adjacent(nu, nv) {
            out.push(CertViolation::NonFanEdge { u, v, nu, nv });
        }
    }
    out
}

/// Every violation found; empty means the certificate is valid for `g`.
pub fn verify_certificate(g: &Graph, cert: &FanCertificate) -> Vec<CertViolation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if cert.n != n {
        out.push(CertViolation::VertexCount {
            graph: n,
            certificate: cert.n,
        });
        return out;
    }
    if cert.b == 0 {
        out.push(CertViolation::SlotOutOfRange {
            vertex: 0,
            node: 0,
            slot: 0,
        });
        return out;
    }
    let expected = fan_size_for(n, cert.b);
    if cert.fan_size != expected {
        out.push(CertViolation::BadFanSize {
            fan_size: cert.fan_size,
            expected,
        });
    }
    out.extend(mapping_violations(g, &cert.mapping, cert.b, cert.fan_size));
    if cert.mapping.len() != n {
        return out;
    }
    let mut in_x = vec![false; n];
    for &v in &cert.x {
        if v >= n || in_x[v] {
            out.push(CertViolation::CenterMismatch { vertex: v });
        } else {
            in_x[v] = true;
        }
    }
    for v in 0..n {
        if in_x[v] != (cert.mapping[v].0 == 0) {
            out.push(CertViolation::CenterMismatch { vertex: v });
        }
    }
    let mut seen = vec![false; n];
    let mut ok = true;
    for &v in &cert.ordering {
        if v >= n || seen[v] || in_x[v] {
            out.push(CertViolation::OrderingMismatch(format!(
                "unexpected vertex {v}"
            )));
            ok = false;
        } else {
            seen[v] = true;
        }
    }
    if ok && cert.ordering.len() + cert.x.len() != n {
        out.push(CertViolation::OrderingMismatch(
            "ordering and X do not cover V(G)".into(),
        ));
        ok = false;
    }
    if ok {
        let slots = cert.x.iter().enumerate().map(|(s, &v)| (v, (0, s)));
        let path =
            (cert.ordering.iter().enumerate()).map(|(p, &v)| (v, (1 + p / cert.b, p % cert.b)));
        for (v, expected) in slots.chain(path) {
            if v < n && cert.mapping[v] != expected {
                out.push(CertViolation::MappingMismatch {
                    vertex: v,
                    expected,
                    found: cert.mapping[v],
                });
            }
        }
        let xs: Vec<usize> = (0..n).filter(|&v| in_x[v]).collect();
        if let Ok(view) = g.without(&xs) {
            if let Ok(bw) =
                bandwidth_of_ordering(&view, &VertexOrdering::new(cert.ordering.clone()))
            {
                if bw != cert.measured_bandwidth {
                    out.push(CertViolation::BandwidthMismatch {
                        claimed: cert.measured_bandwidth,
                        actual: bw,
                    });
                }
            }
        }
    }
    out
}

/// From a valid embedding into the `b`-blowup of a fan: `X` is the center
/// preimage, the ordering lists path blocks in order. Fails unless the
/// result has bandwidth at most `2b - 1`.
pub fn blowup_to_bandwidth(
    g: &Graph,
    mapping: &[(usize, usize)],
    b: usize,
) -> Result<(Vec<usize>, VertexOrdering, usize)> {
    if b == 0 {
        return input("b must be positive");
    }
    let fan_size = mapping.iter().map(|m| m.0 + 1).max().unwrap_or(1).max(2);
    if let Some(v) = mapping_violations(g, mapping, b, fan_size).first() {
        return input(format!("invalid fan mapping: {v}"));
    }
    let x: Vec<usize> = (0..mapping.len()).filter(|&v| mapping[v].0 == 0).collect();
    let mut rest: Vec<usize> = (0..mapping.len()).filter(|&v| mapping[v].0 != 0).collect();
    rest.sort_by_key(|&v| (mapping[v], v));
    let ord = VertexOrdering::new(rest);
    let bw = bandwidth_of_ordering(&g.without(&x)?, &ord)?;
    if bw > 2 * b - 1 {
        return Err(Error::Invariant(format!(
            "bandwidth {bw} above 2b - 1 = {}",
            2 * b - 1
        )));
    }
    Ok((x, ord, bw))
}

const MAGIC: &str = "fan-certificate v1";

fn join(v: &[usize]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl FanCertificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "b {}", self.b);
        let _ = writeln!(s, "fan_size {}", self.fan_size);
        let _ = writeln!(s, "x {}", join(&self.x).trim_end());
        let _ = writeln!(s, "ordering {}", join(&self.ordering));
        for (v, (node, slot)) in self.mapping.iter().enumerate() {
            let _ = writeln!(s, "map {v} {node} {slot}");
        }
        let _ = writeln!(s, "measured_bandwidth {}", self.measured_bandwidth);
        let seeds: Vec<String> = self.seeds.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "seeds {}", seeds.join(" "));
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k} {v}");
        }
        s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(perr(1, format!("expected '{MAGIC}'"))),
        }
        let mut n = None;
        let mut b = None;
        let mut fan_size = None;
        let mut x = None;
        let mut ordering = None;
        let mut mapping: Vec<Option<(usize, usize)>> = Vec::new();
        let mut measured = None;
        let mut seeds = None;
        let mut params = Vec::new();
        for (ln, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let nums = |rest: &[&str]| -> Result<Vec<usize>> {
                rest.iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| perr(ln, format!("bad integer '{t}'")))
                    })
                    .collect()
            };
            let one = |rest: &[&str]| -> Result<usize> {
                match nums(rest)?.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(perr(ln, format!("'{key}' takes one integer"))),
                }
            };
            match key {
                "n" => n = Some(one(&rest)?),
                "b" => b = Some(one(&rest)?),
                "fan_size" => fan_size = Some(one(&rest)?),
                "x" => x = Some(nums(&rest)?),
                "ordering" => ordering = Some(nums(&rest)?),
                "map" => {
                    let v = nums(&rest)?;
                    let [vert, node, slot] = v[..] else {
                        return Err(perr(ln, "map takes vertex node slot".into()));
                    };
                    if vert >= mapping.len() {
                        mapping.resize(vert + 1, None);
                    }
                    if mapping[vert].replace((node, slot)).is_some() {
                        return Err(perr(ln, format!("vertex {vert} mapped twice")));
                    }
                }
                "measured_bandwidth" => measured = Some(one(&rest)?),
                "seeds" => {
                    seeds = Some(
                        rest.iter()
                            .map(|t| {
                                t.parse::<u64>()
                                    .map_err(|_| perr(ln, format!("bad seed '{t}'")))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "param" => match rest[..] {
                    [k, v] => params.push((k.to_string(), v.to_string())),
                    _ => return Err(perr(ln, "param takes a key and a value".into())),
                },
                other => return Err(perr(ln, format!("unknown field '{other}'"))),
            }
        }
        let missing = |f: &str| Error::Parse {
            line: 0,
            msg: format!("missing field '{f}'"),
        };
        let n = n.ok_or_else(|| missing("n"))?;
        if mapping.len() != n || mapping.iter().any(Option::is_none) {
            return Err(missing("map (one line per vertex)"));
        }
        Ok(FanCertificate {
            n,
            b: b.ok_or_else(|| missing("b"))?,
            fan_size: fan_size.ok_or_else(|| missing("fan_size"))?,
            x: x.ok_or_else(|| missing("x"))?,
            ordering: ordering.ok_or_else(|| missing("ordering"))?,
            mapping: mapping.into_iter().map(Option::unwrap).collect(),
            measured_bandwidth: measured.ok_or_else(|| missing("measured_bandwidth"))?,
            seeds: seeds.ok_or_else(|| missing("seeds"))?,
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, path};

    #[test]
    fn fan_size_examples() {
        assert_eq!(fan_size_for(10, 3), 4);
        assert_eq!(fan_size_for(5, 5), 2);
    }

    #[test]
    fn path_certificate() {
        let g = path(4);
        let cert = fan_certificate(&g, &[], &VertexOrdering::new(vec![0, 1, 2, 3]), 1).unwrap();
        assert_eq!(cert.x, vec![3]);
        assert_eq!(cert.ordering, vec![0, 1, 2]);
        assert_eq!(cert.measured_bandwidth, 1);
        assert_eq!(cert.fan_size, 4);
        assert!(verify_certificate(&g, &cert).is_empty());
        let (x, _, bw) = blowup_to_bandwidth(&g, &cert.mapping, cert.b).unwrap();
        assert_eq!(x, vec![3]);
        assert!(bw <= 1);
    }

    #[test]
    fn whole_graph_in_center() {
        let g = complete(4);
        let ord = VertexOrdering::new(vec![0, 1, 2, 3]);
        let cert = fan_certificate(&g, &[], &ord, 4).unwrap();
        assert_eq!(cert.fan_size, 2);
        assert_eq!(cert.x.len(), 4);
        assert!(cert.ordering.is_empty());
        assert!(verify_certificate(&g, &cert).is_empty());
        assert!(fan_certificate(&g, &[], &ord, 5).is_err());
    }

    #[test]
    fn constraint_errors() {
        let g = complete(4);
        let ord = VertexOrdering::new(vec![0, 1, 2, 3]);
        assert!(matches!(
            fan_certificate(&g, &[], &ord, 2),
            Err(Error::Constraint(_))
        ));
        let ord = VertexOrdering::new(vec![3]);
        assert!(matches!(
            fan_certificate(&g, &[0, 1, 2], &ord, 2),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn violations_are_reported() {
        let g = path(10);
        let ord = VertexOrdering::new((0..10).collect());
        let cert = fan_certificate(&g, &[], &ord, 2).unwrap();
        assert!(verify_certificate(&g, &cert).is_empty());
        let mut twin = cert.clone();
        twin.mapping[2] = twin.mapping[3];
        assert!(verify_certificate(&g, &twin)
            .iter()
            .any(|v| matches!(v, CertViolation::SlotCollision { .. })));
        let mut far = cert.clone();
        // vertex 0 sits on node 1; swap 1 with 5 on node 3
        far.mapping.swap(1, 5);
        let vs = verify_certificate(&g, &far);
        assert!(vs
            .iter()
            .any(|v| matches!(v, CertViolation::NonFanEdge { u: 0, v: 1, .. })));
        assert!(vs.iter().any(|v| v.to_string().contains("edge 0-1")));
    }

    #[test]
    fn text_round_trip() {
        let g = path(7);
        let mut cert =
            fan_certificate(&g, &[3], &VertexOrdering::new(vec![0, 1, 2, 4, 5, 6]), 2).unwrap();
        cert.seeds = vec![7, 11];
        cert.params = vec![("D".into(), "8".into()), ("k".into(), "4".into())];
        let text = cert.to_text();
        let back = FanCertificate::from_text(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_text(), text);
        assert!(FanCertificate::from_text("nope\n").is_err());
        let bad = text.replace("map 2", "map 2 9");
        assert!(matches!(
            FanCertificate::from_text(&bad),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn empty_blocks_are_skipped() {
        let g = path(3);
        let mapping = vec![(1, 0), (4, 0), (0, 0)];
        assert!(blowup_to_bandwidth(&g, &mapping, 1).is_err());
        let mapping = vec![(3, 0), (4, 0), (0, 0)];
        let (x, ord, bw) = blowup_to_bandwidth(&g, &mapping, 1).unwrap();
        assert_eq!(x, vec![2]);
        assert_eq!(ord.into_vec(), vec![0, 1]);
        assert_eq!(bw, 1);
    }
}
