//! The HGR text format and its JSON mirror.
//!
//! HGR: a header line `r n m`, then `m` lines each holding the `r` vertices of
//! one edge in ascending order. Edges are written in lexicographic order, so
//! writing a parsed file reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bits, RGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonGraph {
    pub r: usize,
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
}

impl From<&RGraph> for JsonGraph {
    fn from(g: &RGraph) -> Self {
        JsonGraph { r: g.r(), n: g.n(), edges: g.edge_lists() }
    }
}

impl Serialize for RGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        JsonGraph::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = JsonGraph::deserialize(deserializer)?;
        RGraph::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<JsonGraph> for RGraph {
    type Error = Error;
    fn try_from(j: JsonGraph) -> Result<RGraph> {
        RGraph::new(j.r, j.n, j.edges)
    }
}

pub fn to_hgr(g: &RGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", g.r(), g.n(), g.edge_count());
    for &e in g.edges() {
        let line: Vec<String> = bits(e).map(|v| v.to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn to_json(g: &RGraph) -> String {
    serde_json::to_string(&JsonGraph::from(g)).expect("graph serializes")
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse(format!("line {line}: expected a nonnegative integer, found {tok:?}")))
}

/// Parses HGR text. Blank lines are ignored.
pub fn parse_hgr(text: &str) -> Result<RGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|t| parse_usize(t, hl))
        .collect::<Result<_>>()?;
    if head.len() != 3 {
        return Err(Error::Parse(format!("line {hl}: header must be `r n m`")));
    }
    let (r, n, m) = (head[0], head[1], head[2]);
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        let e: Vec<usize> = l.split_whitespace().map(|t| parse_usize(t, ln)).collect::<Result<_>>()?;
        if e.len() != r {
            return Err(Error::Parse(format!("line {ln}: expected {r} vertices, found {}", e.len())));
        }
        if e.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("line {ln}: vertices must be strictly ascending")));
        }
        edges.push(e);
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
    }
    RGraph::new(r, n, edges).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<RGraph> {
    let j: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    RGraph::try_from(j).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses either format, choosing JSON when the first non-blank byte is `{`.
pub fn parse_graph(text: &str) -> Result<RGraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_hgr(text)
    }
}

pub fn read_graph(path: &Path) -> Result<RGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn write_hgr(path: &Path, g: &RGraph) -> std::io::Result<()> {
    std::fs::write(path, to_hgr(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = RGraph::new(3, 5, [[2, 3, 4], [0, 1, 3], [0, 1, 2]]).unwrap();
        let text = to_hgr(&g);
        assert_eq!(text, "3 5 3\n0 1 2\n0 1 3\n2 3 4\n");
        assert_eq!(parse_hgr(&text).unwrap(), g);
        assert_eq!(to_hgr(&parse_hgr(&text).unwrap()), text);
        assert_eq!(parse_graph(&to_json(&g)).unwrap(), g);
        let e = RGraph::empty(2, 0).unwrap();
        assert_eq!(parse_hgr(&to_hgr(&e)).unwrap(), e);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_hgr("2 3 2\n0 1\n0 1\n"), Err(Error::Parse(_))));
        assert!(parse_hgr("2 3 1\n0 3\n").is_err());
        assert!(parse_hgr("2 3 2\n0 1\n").is_err());
        assert!(parse_hgr("2 3\n").is_err());
        assert!(parse_hgr("2 3 1\n1 0\n").is_err());
        assert!(parse_hgr("2 3 1\n0 x\n").is_err());
        assert!(parse_json(r#"{"r":2,"n":3,"edges":[[0,1]],"extra":1}"#).is_err());
    }
}
