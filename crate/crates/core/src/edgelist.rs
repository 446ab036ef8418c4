//! Line-oriented edge-list text format.
//!
//! ```text
//! # comment
//! directed false
//! node a          # optional, declares a node (needed for isolated nodes)
//! edge a b
//! ```
//!
//! The `directed` header must precede all other records. Labels are arbitrary
//! whitespace-free tokens and map to dense ids in order of first appearance.
//! Unknown keywords and malformed records are errors.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodePair};

/// A graph with the external labels of its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

impl LabeledGraph {
    /// Wraps a graph, labelling node `i` with `"i"`.
    pub fn with_numeric_labels(graph: Graph) -> Self {
        let labels = (0..graph.node_count()).map(|i| i.to_string()).collect();
        Self { graph, labels }
    }

    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    let mut directed: Option<bool> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut pairs: Vec<(NodePair, usize)> = Vec::new();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        *ids.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        match keyword {
            "directed" => {
                if directed.is_some() {
                    return Err(parse_err(line_no, "duplicate `directed` header"));
                }
                directed = Some(match args {
                    ["true"] => true,
                    ["false"] => false,
                    _ => return Err(parse_err(line_no, "expected `directed true` or `directed false`")),
                });
            }
            "node" | "edge" if directed.is_none() => {
                return Err(parse_err(line_no, "`directed true|false` header must come first"));
            }
            "node" => match args {
                [label] => {
                    intern(label, &mut labels);
                }
                _ => return Err(parse_err(line_no, "expected `node <label>`")),
            },
            "edge" => match args {
                [u, v] => {
                    let s = intern(u, &mut labels);
                    let t = intern(v, &mut labels);
                    pairs.push((NodePair::new(s, t), line_no));
                }
                _ => return Err(parse_err(line_no, "expected `edge <u> <v>`")),
            },
            other => return Err(parse_err(line_no, format!("unknown keyword `{other}`"))),
        }
    }

    let Some(directed) = directed else {
        return Err(parse_err(text.lines().count().max(1), "missing `directed true|false` header"));
    };
    let list: Vec<NodePair> = pairs.iter().map(|(p, _)| *p).collect();
    let graph = build_graph(labels.len(), &list, directed).map_err(|e| {
        // point at the first record involving the offending pair
        let line = match &e {
            Error::SelfLoop(n) => pairs.iter().find(|(p, _)| p.source == *n && p.target == *n).map(|(_, l)| *l),
            Error::DuplicateEdge { from: source, to: target } => pairs
                .iter()
                .filter(|(p, _)| {
                    (p.source == *source && p.target == *target)
                        || (!directed && p.source == *target && p.target == *source)
                })
                .nth(1)
                .map(|(_, l)| *l),
            _ => None,
        };
        parse_err(line.unwrap_or(0), e.to_string())
    })?;
    Ok(LabeledGraph { graph, labels })
}

/// Serializes a labelled graph; `parse_edge_list` restores it exactly.
pub fn write_edge_list(lg: &LabeledGraph) -> String {
    let g = &lg.graph;
    let mut out = String::new();
    writeln!(out, "directed {}", g.is_directed()).unwrap();
    for label in &lg.labels {
        writeln!(out, "node {label}").unwrap();
    }
    for (i, k) in g.bonds() {
        writeln!(out, "edge {} {}", lg.labels[i], lg.labels[k]).unwrap();
    }
    out
}
