//! Line-oriented graph files.
//!
//! ```text
//! # comment
//! v 1
//! v 2
//! e 1 2
//! ```
//!
//! Declaration order defines vertex and edge order. Blank lines are ignored.

use super::{build_digraph, DiGraph};
use crate::error::GraphError;

pub fn parse_graph(input: &str) -> Result<DiGraph, GraphError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |message: &str| GraphError::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        match fields.as_slice() {
            ["v", label] => vertices.push(label.to_string()),
            ["e", tail, head] => edges.push((tail.to_string(), head.to_string())),
            ["v", ..] => return Err(parse_err("expected `v <label>`")),
            ["e", ..] => return Err(parse_err("expected `e <tail> <head>`")),
            _ => return Err(parse_err("unknown declaration")),
        }
    }
    build_digraph(vertices, edges)
}

pub fn write_graph(g: &DiGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str(&format!("v {v}\n"));
    }
    for &(u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", g.label(u), g.label(v)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_g1, build_g2k};

    #[test]
    fn round_trips() {
        for g in [build_g1(), build_g2k(2).unwrap()] {
            assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn comments_and_errors() {
        let g = parse_graph("# tiny\n\nv a\nv b\n# arc\ne a b\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(
            parse_graph("v a\nx a\n").unwrap_err(),
            GraphError::Parse {
                line: 2,
                message: "unknown declaration".into()
            }
        );
        assert!(matches!(parse_graph("v a b\n"), Err(GraphError::Parse { line: 1, .. })));
        assert_eq!(
            parse_graph("v a\ne a a\n").unwrap_err(),
            GraphError::SelfLoop("a".into())
        );
    }
}
