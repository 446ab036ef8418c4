//! Finite graphs on dense node ids.
//!
//! An undirected graph is stored as a directed graph carrying both
//! orientations `(i, k)` and `(k, i)` of every bond, so that degree-dependent
//! formulas read the same for both kinds of graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of enumerated minimal paths.
pub const DEFAULT_PATH_CAP: usize = 10_000;

/// An ordered pair of node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodePair {
    pub source: usize,
    pub target: usize,
}

impl NodePair {
    pub fn new(source: usize, target: usize) -> Self {
        Self { source, target }
    }
}

impl From<(usize, usize)> for NodePair {
    fn from((source, target): (usize, usize)) -> Self {
        Self { source, target }
    }
}

/// Immutable finite graph without self-loops or multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    directed: bool,
    /// Stored directed edges, sorted lexicographically.
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Builds a graph from an edge list.
///
/// For `directed == false` every pair is a bond and its reverse orientation is
/// synthesized; listing both orientations of one bond is a duplicate.
pub fn build_graph(node_count: usize, edge_list: &[NodePair], directed: bool) -> Result<Graph> {
    let mut edges = Vec::with_capacity(if directed { edge_list.len() } else { 2 * edge_list.len() });
    for p in edge_list {
        if p.source >= node_count || p.target >= node_count {
            return Err(Error::NodeOutOfRange { from: p.source, to: p.target,
                node_count,
            });
        }
        if p.source == p.target {
            return Err(Error::SelfLoop(p.source));
        }
        edges.push((p.source, p.target));
        if !directed {
            edges.push((p.target, p.source));
        }
    }
    edges.sort_unstable();
    if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
        let (source, target) = w[0];
        // report the pair in the orientation the caller is most likely to have written
        let (source, target) = if directed { (source, target) } else { (source.min(target), source.max(target)) };
        return Err(Error::DuplicateEdge { from: source, to: target });
    }

    let mut out_adj = vec![Vec::new(); node_count];
    let mut in_adj = vec![Vec::new(); node_count];
    for &(i, k) in &edges {
        out_adj[i].push(k);
        in_adj[k].push(i);
    }
    for list in &mut in_adj {
        list.sort_unstable();
    }
    Ok(Graph {
        node_count,
        directed,
        edges,
        out_adj,
        in_adj,
    })
}

impl Graph {
    /// Convenience constructor from plain tuples.
    pub fn from_pairs(node_count: usize, pairs: &[(usize, usize)], directed: bool) -> Result<Self> {
        let list: Vec<NodePair> = pairs.iter().copied().map(NodePair::from).collect();
        build_graph(node_count, &list, directed)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored directed edges (twice the bond count when undirected).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Bonds `(i, k)` with `i < k` for undirected graphs; all edges otherwise.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        if self.directed {
            self.edges.clone()
        } else {
            self.edges.iter().copied().filter(|&(i, k)| i < k).collect()
        }
    }

    pub fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        self.edges.binary_search(&(source, target)).ok()
    }

    /// Index of the oppositely oriented edge, if stored.
    pub fn reverse_edge(&self, e: usize) -> Option<usize> {
        let (i, k) = self.edges[e];
        self.edge_index(k, i)
    }

    /// Out-neighbors in increasing order. For undirected graphs these are all neighbors.
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_adj[i].len()
    }

    /// Node degree: number of neighbors when undirected, in plus out when directed.
    pub fn degree(&self, i: usize) -> usize {
        if self.directed {
            self.in_degree(i) + self.out_degree(i)
        } else {
            self.out_degree(i)
        }
    }

    /// The degree that enters the commutator norm: neighbors, or out-neighbors when directed.
    pub fn constraint_degree(&self, i: usize) -> usize {
        self.out_degree(i)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn degree_sum(&self) -> usize {
        (0..self.node_count).map(|i| self.degree(i)).sum()
    }

    /// Neighbors ignoring orientation, deduplicated and sorted.
    pub fn neighbors_undirected(&self, i: usize) -> Vec<usize> {
        if !self.directed {
            return self.out_adj[i].clone();
        }
        let mut v: Vec<usize> = self.out_adj[i].iter().chain(&self.in_adj[i]).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Weakly connected component label of every node, labels dense from 0.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.node_count];
        let mut next = 0;
        for start in 0..self.node_count {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in self.out_adj[v].iter().chain(&self.in_adj[v]) {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    fn check_node(&self, n: usize) -> Result<()> {
        if n >= self.node_count {
            Err(Error::NodeOutOfRange { from: n, to: n,
                node_count: self.node_count,
            })
        } else {
            Ok(())
        }
    }
}

/// Breadth-first distances from `source`, following edge orientation.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap_or(0);
        for &w in g.out_neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Length of a shortest (directed) path from `from` to `to`; `None` when unreachable.
pub fn graph_distance(g: &Graph, from: usize, to: usize) -> Result<Option<usize>> {
    g.check_node(from)?;
    g.check_node(to)?;
    if from == to {
        return Ok(Some(0));
    }
    Ok(bfs_distances(g, from)[to])
}

/// A node-induced subgraph together with the id maps between both graphs.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

/// Restricts `g` to `nodes`, keeping exactly the edges with both endpoints in the set.
/// New ids follow the increasing order of the old ids.
pub fn induced_subgraph(g: &Graph, nodes: &[usize]) -> Result<Subgraph> {
    if nodes.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    for &n in nodes {
        g.check_node(n)?;
    }
    let mut new_to_old = nodes.to_vec();
    new_to_old.sort_unstable();
    new_to_old.dedup();
    let mut old_to_new = vec![None; g.node_count()];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old] = Some(new);
    }
    let pairs: Vec<NodePair> = g
        .bonds()
        .into_iter()
        .filter_map(|(i, k)| Some(NodePair::new(old_to_new[i]?, old_to_new[k]?)))
        .collect();
    let graph = build_graph(new_to_old.len(), &pairs, g.is_directed())?;
    Ok(Subgraph {
        graph,
        old_to_new,
        new_to_old,
    })
}

/// All shortest paths from `from` to `to` as node sequences, at most `cap` of them.
pub fn minimal_paths(g: &Graph, from: usize, to: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    g.check_node(from)?;
    g.check_node(to)?;
    let dist = bfs_distances(g, from);
    if dist[to].is_none() {
        return Err(Error::Unreachable { from, to });
    }
    // Walk backwards from `to` over predecessors one level closer to `from`.
    let mut paths = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![to]];
    while let Some(partial) = stack.pop() {
        let head = *partial.last().unwrap();
        if head == from {
            if paths.len() == cap {
                return Err(Error::TooManyPaths { cap });
            }
            let mut p = partial;
            p.reverse();
            paths.push(p);
            continue;
        }
        let dh = dist[head].unwrap();
        for &pred in g.in_neighbors(head).iter().rev() {
            if dist[pred] == Some(dh - 1) {
                let mut next = partial.clone();
                next.push(pred);
                stack.push(next);
            }
        }
    }
    paths.sort();
    Ok(paths)
}
