use std::io::{BufRead, Write};
use std::path::Path;

use super::{GrowthGraph, Result, SimError};
use crate::atomic::write_atomic;
use crate::model::Color;

/// Text edge list:
///
/// ```text
/// # dmpa v1 nodes=<n> edges=<m>
/// N <id> <R|B>
/// E <source> <target>
/// ```
pub fn write_edge_list<W: Write>(g: &GrowthGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# dmpa v1 nodes={} edges={}", g.node_count(), g.edge_count())?;
    for (i, c) in g.colors().iter().enumerate() {
        writeln!(w, "N {i} {}", c.tag())?;
    }
    for (s, t) in g.edges() {
        writeln!(w, "E {s} {t}")?;
    }
    Ok(())
}

/// Writes the edge list to `path` atomically.
pub fn export_graph(g: &GrowthGraph, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(16 * (g.node_count() + g.edge_count()) + 64);
    write_edge_list(g, &mut buf)?;
    write_atomic(path, &buf)?;
    Ok(())
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix("# dmpa v1 ")?;
    let mut it = rest.split_whitespace();
    let n = it.next()?.strip_prefix("nodes=")?.parse().ok()?;
    let m = it.next()?.strip_prefix("edges=")?.parse().ok()?;
    it.next().is_none().then_some((n, m))
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<GrowthGraph> {
    let mut lines = r.lines().enumerate();
    let err = |line: usize, msg: &str| SimError::Parse {
        line: line + 1,
        msg: msg.to_string(),
    };
    let (n, m) = match lines.next() {
        Some((i, l)) => parse_header(&l?).ok_or_else(|| err(i, "bad header"))?,
        None => return Err(err(0, "missing header")),
    };
    let mut colors = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            [] => continue,
            ["N", id, tag] => {
                if !edges.is_empty() {
                    return Err(err(i, "node line after edge lines"));
                }
                let id: usize = id.parse().map_err(|_| err(i, "bad node id"))?;
                if id != colors.len() {
                    return Err(err(i, "node ids must be dense and ascending"));
                }
                colors.push(Color::from_tag(tag).ok_or_else(|| err(i, "color must be R or B"))?);
            }
            ["E", s, t] => {
                let s = s.parse().map_err(|_| err(i, "bad source id"))?;
                let t = t.parse().map_err(|_| err(i, "bad target id"))?;
                edges.push((s, t));
            }
            _ => return Err(err(i, "expected an N or E line")),
        }
    }
    if colors.len() != n || edges.len() != m {
        return Err(SimError::InvalidInitialGraph(format!(
            "header declares {n} nodes and {m} edges, found {} and {}",
            colors.len(),
            edges.len()
        )));
    }
    GrowthGraph::from_edges(colors, edges)
}
