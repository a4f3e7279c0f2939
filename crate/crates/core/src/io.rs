//! Text formats. `#` starts a comment; blank lines are ignored; errors
//! carry 1-based line numbers.
//!
//! Graph: a header `n m` followed by `m` lines `u v`.
//!
//! Drawn graph: a graph, then optionally `crossings c` and `c` lines
//! `u1 v1 u2 v2 pos1 pos2`.
//!
//! Product document: sections `[H]` (a graph), optional `[TD]` (lines
//! `bag v...` and `edge a b`), `[P]` (row count; rows are `1..=rows`) and
//! `[G]` (header `n m`, `n` lines `id h row`, then `m` edge lines).

use std::fmt::Write as _;

use crate::crossing::{Crossing, DrawnGraph};
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::product::{ProductInstance, ProductVertex};

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("").trim();
                (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
            })
            .collect();
        Lines { items, at: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.at)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.items.last().map_or(0, |l| l.0);
        let item = self
            .items
            .get(self.at)
            .cloned()
            .ok_or_else(|| Error::Parse {
                line: last + 1,
                msg: format!("unexpected end of input, expected {what}"),
            })?;
        self.at += 1;
        Ok(item)
    }

    fn done(&self) -> bool {
        self.at >= self.items.len()
    }
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .or_else(|_| perr(line, format!("cannot parse '{tok}'")))
}

fn fields<const K: usize>(line: usize, toks: &[&str], what: &str) -> Result<[usize; K]> {
    if toks.len() != K {
        return perr(line, format!("expected {what}"));
    }
    let mut out = [0; K];
    for (o, t) in out.iter_mut().zip(toks) {
        *o = num(line, t)?;
    }
    Ok(out)
}

fn graph_from(lines: &mut Lines<'_>) -> Result<(Graph, usize)> {
    let (hl, toks) = lines.next("'n m' header")?;
    let [n, m] = fields::<2>(hl, &toks, "'n m' header")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, toks) = lines.next("an edge line")?;
        let [u, v] = fields::<2>(ln, &toks, "'u v' edge")?;
        if u >= n || v >= n {
            return perr(ln, format!("edge {u}-{v} has an endpoint outside 0..{n}"));
        }
        edges.push((u, v));
    }
    let g = Graph::new(n, edges).map_err(|e| Error::Parse {
        line: hl,
        msg: e.to_string(),
    })?;
    Ok((g, hl))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text);
    let (g, _) = graph_from(&mut lines)?;
    if let Some((ln, _)) = lines.peek() {
        return perr(*ln, "trailing content after the edge list");
    }
    Ok(g)
}

pub fn format_graph(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn parse_drawn_graph(text: &str) -> Result<DrawnGraph> {
    let mut lines = Lines::new(text);
    let (g, hl) = graph_from(&mut lines)?;
    let mut crossings = Vec::new();
    if !lines.done() {
        let (ln, toks) = lines.next("'crossings c'")?;
        if toks.len() != 2 || toks[0] != "crossings" {
            return perr(ln, "expected 'crossings c'");
        }
        let c: usize = num(ln, toks[1])?;
        for _ in 0..c {
            let (ln, toks) = lines.next("a crossing line")?;
            if toks.len() != 6 {
                return perr(ln, "expected 'u1 v1 u2 v2 pos1 pos2'");
            }
            let ids: Vec<usize> = toks[..4]
                .iter()
                .map(|t| num(ln, t))
                .collect::<Result<_>>()?;
            crossings.push((
                ln,
                Crossing {
                    e1: (ids[0], ids[1]),
                    e2: (ids[2], ids[3]),
                    pos1: num(ln, toks[4])?,
                    pos2: num(ln, toks[5])?,
                },
            ));
        }
        if let Some((ln, _)) = lines.peek() {
            return perr(*ln, "trailing content after the crossing list");
        }
    }
    let lines_of: Vec<usize> = crossings.iter().map(|c| c.0).collect();
    DrawnGraph::new(g, crossings.into_iter().map(|c| c.1).collect()).map_err(|e| {
        let msg = e.to_string();
        // point at the offending crossing when the message names one
        let line = msg
            .split("crossing ")
            .nth(1)
            .and_then(|r| r.split(':').next())
            .and_then(|i| i.parse::<usize>().ok())
            .and_then(|i| lines_of.get(i).copied())
            .unwrap_or(hl);
        Error::Parse { line, msg }
    })
}

pub fn format_drawn_graph(dg: &DrawnGraph) -> String {
    let mut s = format_graph(&dg.graph);
    if !dg.crossings.is_empty() {
        let _ = writeln!(s, "crossings {}", dg.crossings.len());
        for c in &dg.crossings {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {}",
                c.e1.0, c.e1.1, c.e2.0, c.e2.1, c.pos1, c.pos2
            );
        }
    }
    s
}

/// Whitespace-separated vertex ids, comments allowed.
pub fn parse_vertex_list(text: &str) -> Result<Vec<usize>> {
    let lines = Lines::new(text);
    let mut out = Vec::new();
    for (ln, toks) in lines.items {
        for t in toks {
            out.push(num(ln, t)?);
        }
    }
    Ok(out)
}

pub fn parse_product(text: &str) -> Result<ProductInstance> {
    let mut sections: Vec<(String, usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.starts_with('[') && l.ends_with(']') {
            sections.push((l[1..l.len() - 1].to_string(), i + 1, String::new()));
        } else if let Some(last) = sections.last_mut() {
            last.2.push_str(raw);
            last.2.push('\n');
        } else if !l.is_empty() {
            return perr(i + 1, "content before the first section");
        }
    }
    let find = |name: &str| -> Result<Option<&(String, usize, String)>> {
        let mut hits = sections.iter().filter(|s| s.0 == name);
        let first = hits.next();
        if let Some(dup) = hits.next() {
            return perr(dup.1, format!("section [{name}] repeated"));
        }
        Ok(first)
    };
    for s in &sections {
        if !["H", "TD", "P", "G"].contains(&s.0.as_str()) {
            return perr(s.1, format!("unknown section [{}]", s.0));
        }
    }
    // body lines are numbered from their section header
    let shift = |e: Error, base: usize| match e {
        Error::Parse { line, msg } => Error::Parse {
            line: line + base,
            msg,
        },
        other => other,
    };
    let (_, hbase, htext) = find("H")?.ok_or(Error::Parse {
        line: 0,
        msg: "missing section [H]".into(),
    })?;
    let h = {
        let mut l = Lines::new(htext);
        let (h, _) = graph_from(&mut l).map_err(|e| shift(e, *hbase))?;
        if let Some((ln, _)) = l.peek() {
            return perr(ln + hbase, "trailing content in [H]");
        }
        h
    };
    let td = match find("TD")? {
        None => None,
        Some((_, base, body)) => {
            let mut bags = Vec::new();
            let mut tree = Vec::new();
            for (ln, toks) in Lines::new(body).items {
                let ln = ln + base;
                match toks.first().copied() {
                    Some("bag") => bags.push(
                        toks[1..]
                            .iter()
                            .map(|t| num(ln, t))
                            .collect::<Result<Vec<usize>>>()?,
                    ),
                    Some("edge") => {
                        let [a, b] = fields::<2>(ln, &toks[1..], "'edge a b'")?;
                        tree.push((a, b));
                    }
                    _ => return perr(ln, "expected 'bag ...' or 'edge a b'"),
                }
            }
            Some(TreeDecomposition::new(bags, tree))
        }
    };
    let (_, pbase, ptext) = find("P")?.ok_or(Error::Parse {
        line: 0,
        msg: "missing section [P]".into(),
    })?;
    let rows: i64 = {
        let mut l = Lines::new(ptext);
        let (ln, toks) = l.next("row count").map_err(|e| shift(e, *pbase))?;
        let [r] = fields::<1>(ln + pbase, &toks, "row count")?;
        if r == 0 {
            return perr(ln + pbase, "P needs at least one row");
        }
        r as i64
    };
    let (_, gbase, gtext) = find("G")?.ok_or(Error::Parse {
        line: 0,
        msg: "missing section [G]".into(),
    })?;
    let mut l = Lines::new(gtext);
    let (hl, toks) = l.next("'n m' header").map_err(|e| shift(e, *gbase))?;
    let [n, m] = fields::<2>(hl + gbase, &toks, "'n m' header")?;
    let mut place = vec![None; n];
    for _ in 0..n {
        let (ln, toks) = l.next("an 'id h row' line").map_err(|e| shift(e, *gbase))?;
        let ln = ln + gbase;
        if toks.len() != 3 {
            return perr(ln, "expected 'id h row'");
        }
        let id: usize = num(ln, toks[0])?;
        let hv: usize = num(ln, toks[1])?;
        let row: i64 = num(ln, toks[2])?;
        if id >= n {
            return perr(ln, format!("vertex id {id} outside 0..{n}"));
        }
        if place[id].replace(ProductVertex::new(hv, row)).is_some() {
            return perr(ln, format!("vertex {id} placed twice"));
        }
    }
    let mut edges = Vec::with_capacity(m);
    let mut edge_line = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, toks) = l.next("an edge line").map_err(|e| shift(e, *gbase))?;
        let ln = ln + gbase;
        let [u, v] = fields::<2>(ln, &toks, "'u v' edge")?;
        if u >= n || v >= n {
            return perr(ln, format!("edge {u}-{v} has an endpoint outside 0..{n}"));
        }
        edges.push((u, v));
        edge_line.push(ln);
    }
    if let Some((ln, _)) = l.peek() {
        return perr(ln + gbase, "trailing content in [G]");
    }
    let place: Vec<ProductVertex> = place
        .into_iter()
        .map(|p| p.expect("all ids placed"))
        .collect();
    for (i, &(u, v)) in edges.iter().enumerate() {
        if place[u].h < h.vertex_count()
            && place[v].h < h.vertex_count()
            && !crate::product::is_product_edge(&h, place[u], place[v])
        {
            return perr(
                edge_line[i],
                format!(
                    "edge {u}-{v} joins ({}, {}) and ({}, {}), not adjacent in H x P",
                    place[u].h, place[u].row, place[v].h, place[v].row
                ),
            );
        }
    }
    let g = Graph::new(n, edges).map_err(|e| Error::Parse {
        line: hl + gbase,
        msg: e.to_string(),
    })?;
    ProductInstance::new(h, td, 1, rows, place, g)
}

pub fn format_product(inst: &ProductInstance) -> String {
    let mut s = String::from("[H]\n");
    s.push_str(&format_graph(&inst.h));
    if let Some(td) = &inst.td {
        s.push_str("[TD]\n");
        for bag in td.bags() {
            let ids: Vec<String> = bag.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "bag {}", ids.join(" "));
        }
        for &(a, b) in td.tree_edges() {
            let _ = writeln!(s, "edge {a} {b}");
        }
    }
    let shift = 1 - inst.row_lo;
    let _ = writeln!(s, "[P]\n{}", inst.row_hi + shift);
    let _ = writeln!(s, "[G]\n{} {}", inst.n(), inst.g.edge_count());
    for (v, p) in inst.place.iter().enumerate() {
        let _ = writeln!(s, "{v} {} {}", p.h, p.row + shift);
    }
    for &(u, v) in inst.g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}
