//! Road graphs and ranked stations.
//!
//! Edges come from CSV with the header `u,v,length_m,maxspeed_kmh`; node ids
//! are arbitrary strings. Travel times are seconds.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use clqaoa_core::CostMatrix;
use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_text, write_text};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    pub length_m: f64,
    pub maxspeed_kmh: f64,
}

impl Edge {
    pub fn seconds(&self) -> f64 {
        self.length_m / (self.maxspeed_kmh / 3.6)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedDigraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
}

impl WeightedDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, id: &str) {
        if !self.index.contains_key(id) {
            self.index.insert(id.to_owned(), self.nodes.len());
            self.nodes.push(id.to_owned());
        }
    }

    pub fn add_edge(&mut self, edge: Edge) -> std::result::Result<(), String> {
        if !(edge.length_m > 0.0 && edge.length_m.is_finite()) {
            return Err(format!("length_m must be positive, got {}", edge.length_m));
        }
        if !(edge.maxspeed_kmh > 0.0 && edge.maxspeed_kmh.is_finite()) {
            return Err(format!("maxspeed_kmh must be positive, got {}", edge.maxspeed_kmh));
        }
        self.intern(&edge.u);
        self.intern(&edge.v);
        self.edges.push(edge);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Node ids in first-seen order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.edges.is_empty() {
            w.write_record(["u", "v", "length_m", "maxspeed_kmh"]).expect("in-memory write");
        }
        for e in &self.edges {
            w.serialize(e).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 ids")
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        let expected = ["u", "v", "length_m", "maxspeed_kmh"];
        if headers.iter().ne(expected) {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                column: 0,
                msg: format!("expected header {}", expected.join(",")),
            });
        }
        let mut g = Self::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let edge: Edge = rec.deserialize(Some(&headers)).map_err(|e| Error::Parse {
                path: path.into(),
                line,
                column: match e.kind() {
                    csv::ErrorKind::Deserialize { err, .. } => err.field().map_or(0, |f| f as usize + 1),
                    _ => 0,
                },
                msg: e.to_string(),
            })?;
            g.add_edge(edge).map_err(|msg| Error::Parse { path: path.into(), line, column: 0, msg })?;
        }
        Ok(g)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse_csv(&read_text(path)?, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv())
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { path: path.into(), line, column: 0, msg: e.to_string() }
}

/// Node ids, most frequented first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedNodes(Vec<String>);

impl RankedNodes {
    pub fn new(ids: Vec<String>) -> std::result::Result<Self, String> {
        let mut seen = HashSet::new();
        if let Some(d) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(format!("duplicate node {d}"));
        }
        Ok(Self(ids))
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One id per line; blank lines are skipped.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut ids = Vec::new();
        let mut seen = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let id = raw.trim();
            if id.is_empty() {
                continue;
            }
            if let Some(first) = seen.insert(id.to_owned(), i + 1) {
                return Err(Error::Parse {
                    path: path.into(),
                    line: i + 1,
                    column: 1,
                    msg: format!("duplicate node {id} (first on line {first})"),
                });
            }
            ids.push(id.to_owned());
        }
        Ok(Self(ids))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }

    pub fn to_text(&self) -> String {
        self.0.iter().map(|id| format!("{id}\n")).collect()
    }
}

/// Shortest-path travel times between the selected nodes, `(i, j)` being
/// the time from `nodes[i]` to `nodes[j]`.
pub fn graph_to_matrix(graph: &WeightedDigraph, nodes: &[String]) -> Result<CostMatrix> {
    let mut g: DiGraph<(), f64> = DiGraph::with_capacity(graph.node_count(), graph.edges.len());
    for _ in 0..graph.node_count() {
        g.add_node(());
    }
    for e in &graph.edges {
        g.add_edge(NodeIndex::new(graph.index[&e.u]), NodeIndex::new(graph.index[&e.v]), e.seconds());
    }
    let idx = nodes
        .iter()
        .map(|id| graph.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.clone())))
        .collect::<Result<Vec<usize>>>()?;
    let n = nodes.len();
    let mut data = vec![0.0; n * n];
    for (i, &src) in idx.iter().enumerate() {
        let dist = dijkstra(&g, NodeIndex::new(src), None, |e| *e.weight());
        for (j, &dst) in idx.iter().enumerate() {
            if i == j {
                continue;
            }
            data[i * n + j] = *dist
                .get(&NodeIndex::new(dst))
                .ok_or_else(|| Error::Unreachable { from: nodes[i].clone(), to: nodes[j].clone() })?;
        }
    }
    Ok(CostMatrix::from_row_major(n, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: &str, v: &str, len: f64, kmh: f64) -> Edge {
        Edge { u: u.into(), v: v.into(), length_m: len, maxspeed_kmh: kmh }
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_edge_time() {
        assert!((edge("a", "b", 100.0, 50.0).seconds() - 7.2).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_two_node_graph() {
        let mut g = WeightedDigraph::new();
        g.add_edge(edge("a", "b", 100.0, 50.0)).unwrap();
        g.add_edge(edge("b", "a", 100.0, 25.0)).unwrap();
        let m = graph_to_matrix(&g, &ids(&["a", "b"])).unwrap();
        assert!((m.get(0, 1) - 7.2).abs() < 1e-12);
        assert!((m.get(1, 0) - 14.4).abs() < 1e-12);
    }

    #[test]
    fn two_hop_beats_slow_direct_edge() {
        let mut g = WeightedDigraph::new();
        g.add_edge(edge("a", "c", 1000.0, 10.0)).unwrap();
        g.add_edge(edge("a", "b", 500.0, 50.0)).unwrap();
        g.add_edge(edge("b", "c", 600.0, 50.0)).unwrap();
        for (u, v) in [("c", "a"), ("b", "a"), ("c", "b")] {
            g.add_edge(edge(u, v, 100.0, 36.0)).unwrap();
        }
        let m = graph_to_matrix(&g, &ids(&["a", "b", "c"])).unwrap();
        let two_hop = 500.0 / (50.0 / 3.6) + 600.0 / (50.0 / 3.6);
        assert!(two_hop < 1000.0 / (10.0 / 3.6));
        assert!((m.get(0, 2) - two_hop).abs() < 1e-9);
    }

    #[test]
    fn unreachable_pair_is_named() {
        let mut g = WeightedDigraph::new();
        g.add_edge(edge("a", "b", 100.0, 50.0)).unwrap();
        match graph_to_matrix(&g, &ids(&["a", "b"])) {
            Err(Error::Unreachable { from, to }) => assert_eq!((from.as_str(), to.as_str()), ("b", "a")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_node() {
        let g = WeightedDigraph::new();
        assert!(matches!(graph_to_matrix(&g, &ids(&["z"])), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn csv_round_trip() {
        let mut g = WeightedDigraph::new();
        g.add_edge(edge("1", "2", 0.1 + 0.2, 50.0)).unwrap();
        g.add_edge(edge("2", "x y", 123.456789, 1.0 / 3.0)).unwrap();
        let back = WeightedDigraph::parse_csv(&g.to_csv(), Path::new("g.csv")).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn bad_speed_reports_line() {
        let text = "u,v,length_m,maxspeed_kmh\na,b,10,50\nb,a,10,0\n";
        match WeightedDigraph::parse_csv(text, Path::new("g.csv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_numeric_length_reports_field() {
        let text = "u,v,length_m,maxspeed_kmh\na,b,ten,50\n";
        match WeightedDigraph::parse_csv(text, Path::new("g.csv")) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_header() {
        assert!(WeightedDigraph::parse_csv("a,b,c,d\n", Path::new("g.csv")).is_err());
    }

    #[test]
    fn ranked_duplicates_rejected() {
        assert!(RankedNodes::parse("a\nb\na\n", Path::new("r.txt")).is_err());
        assert!(RankedNodes::new(ids(&["a", "a"])).is_err());
        let r = RankedNodes::parse("a\n\nb\n", Path::new("r.txt")).unwrap();
        assert_eq!(r.as_slice(), ids(&["a", "b"]).as_slice());
    }
}
