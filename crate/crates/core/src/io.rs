//! Edge-list text format.
//!
//! ```text
//! n m directed|undirected
//! u v w
//! ...
//! ```
//!
//! Vertices are 0-based. Serialization is canonical (edges sorted, single
//! spaces, trailing newline), so `serialize(parse(x))` normalizes `x`.

use crate::error::GraphError;
use crate::graph::{UndirectedWeightedGraph, WeightedDigraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGraph {
    Directed(WeightedDigraph),
    Undirected(UndirectedWeightedGraph),
}

impl ParsedGraph {
    pub fn vertex_count(&self) -> usize {
        match self {
            ParsedGraph::Directed(g) => g.vertex_count(),
            ParsedGraph::Undirected(g) => g.vertex_count(),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hdr_no, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .ok_or_else(|| parse_err(hdr_no + 1, "missing vertex count"))?
        .parse()
        .map_err(|_| parse_err(hdr_no + 1, "vertex count is not an integer"))?;
    let m: usize = parts
        .next()
        .ok_or_else(|| parse_err(hdr_no + 1, "missing edge count"))?
        .parse()
        .map_err(|_| parse_err(hdr_no + 1, "edge count is not an integer"))?;
    let kind = parts
        .next()
        .ok_or_else(|| parse_err(hdr_no + 1, "missing directed|undirected marker"))?;
    if parts.next().is_some() {
        return Err(parse_err(hdr_no + 1, "trailing tokens in header"));
    }
    if n == 0 {
        return Err(parse_err(hdr_no + 1, "vertex count must be positive"));
    }

    let mut triples = Vec::with_capacity(m);
    for (idx, line) in lines {
        let mut f = line.split_whitespace();
        let u: usize = f
            .next()
            .ok_or_else(|| parse_err(idx + 1, "missing source vertex"))?
            .parse()
            .map_err(|_| parse_err(idx + 1, "source vertex is not an integer"))?;
        let v: usize = f
            .next()
            .ok_or_else(|| parse_err(idx + 1, "missing destination vertex"))?
            .parse()
            .map_err(|_| parse_err(idx + 1, "destination vertex is not an integer"))?;
        let w: i64 = f
            .next()
            .ok_or_else(|| parse_err(idx + 1, "missing weight"))?
            .parse()
            .map_err(|_| parse_err(idx + 1, "weight is not an integer"))?;
        if f.next().is_some() {
            return Err(parse_err(idx + 1, "trailing tokens in edge line"));
        }
        if u == v {
            return Err(parse_err(idx + 1, format!("self-loop on vertex {u}")));
        }
        if u >= n || v >= n {
            return Err(parse_err(idx + 1, format!("vertex out of range (n = {n})")));
        }
        triples.push((idx + 1, u, v, w));
    }
    if triples.len() != m {
        return Err(parse_err(
            1,
            format!("header promises {m} edges, found {}", triples.len()),
        ));
    }

    match kind {
        "directed" => {
            let bound = triples
                .iter()
                .map(|&(_, _, _, w)| w.abs())
                .max()
                .unwrap_or(0);
            let mut g = WeightedDigraph::new(n, bound);
            for (line, u, v, w) in triples {
                if g.arc(u, v).is_some() {
                    return Err(parse_err(line, format!("duplicate arc {u}->{v}")));
                }
                g.add_arc(u, v, w)
                    .map_err(|e| parse_err(line, e.to_string()))?;
            }
            Ok(ParsedGraph::Directed(g))
        }
        "undirected" => {
            let mut g = UndirectedWeightedGraph::new(n);
            for (line, u, v, w) in triples {
                if g.weight(u, v).is_some() {
                    return Err(parse_err(line, format!("duplicate edge {{{u},{v}}}")));
                }
                g.set_edge(u, v, w)
                    .map_err(|e| parse_err(line, e.to_string()))?;
            }
            Ok(ParsedGraph::Undirected(g))
        }
        other => Err(parse_err(
            hdr_no + 1,
            format!("expected directed|undirected, found {other:?}"),
        )),
    }
}

pub fn serialize_graph(g: &ParsedGraph) -> String {
    let mut out = String::new();
    match g {
        ParsedGraph::Directed(g) => {
            out.push_str(&format!(
                "{} {} directed\n",
                g.vertex_count(),
                g.arc_count()
            ));
            for (u, v, w) in g.arcs() {
                out.push_str(&format!("{u} {v} {w}\n"));
            }
        }
        ParsedGraph::Undirected(g) => {
            out.push_str(&format!(
                "{} {} undirected\n",
                g.vertex_count(),
                g.edge_count()
            ));
            for (u, v, w) in g.edges() {
                out.push_str(&format!("{u} {v} {w}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_arc() {
        let g = parse_graph("2 1 directed\n0 1 5\n").unwrap();
        match g {
            ParsedGraph::Directed(g) => {
                assert_eq!(g.vertex_count(), 2);
                assert_eq!(g.arc(0, 1), Some(5));
            }
            _ => panic!("expected a digraph"),
        }
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        let err = parse_graph("2 1 directed\n0 0 5\n").unwrap_err();
        match err {
            GraphError::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("self-loop"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_vertex() {
        assert!(parse_graph("2 1 undirected\n0 2 5\n").is_err());
    }

    #[test]
    fn serialize_normalizes() {
        let messy = "3   2 undirected\n2 0   4\n\n1 0 -2\n";
        let parsed = parse_graph(messy).unwrap();
        let canon = serialize_graph(&parsed);
        assert_eq!(canon, "3 2 undirected\n0 1 -2\n0 2 4\n");
        // Round-trip stability.
        assert_eq!(serialize_graph(&parse_graph(&canon).unwrap()), canon);
    }
}
