//! Finite truncations of the standard graph families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodePair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Undirected path with nodes `0..=n`.
    Path(usize),
    /// Undirected cycle on `n` nodes.
    Cycle(usize),
    /// Path with edges `k -> k+1`, nodes `0..=n`.
    DirectedPath(usize),
    /// Nodes `(i, j)`, `0 <= i <= width`, `0 <= j <= height`, with edges
    /// `(i, j) -> (i+1, j)` and `(i, j) -> (i, j+1)`.
    DirectedLattice2d { width: usize, height: usize },
    /// Complete binary tree with levels `0..=depth`, nodes in heap order.
    BinaryTree(usize),
    /// Erdős–Rényi graph; each (ordered, when directed) pair is an edge with the given probability.
    Random {
        nodes: usize,
        edge_probability: f64,
        directed: bool,
        seed: u64,
    },
}

/// Node id of lattice point `(i, j)` in a lattice of the given width.
pub fn lattice_id(width: usize, i: usize, j: usize) -> usize {
    j * (width + 1) + i
}

fn positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSize(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

pub fn generate(kind: &GraphKind) -> Result<Graph> {
    match *kind {
        GraphKind::Path(n) => {
            positive("path length", n)?;
            let pairs: Vec<NodePair> = (0..n).map(|k| NodePair::new(k, k + 1)).collect();
            build_graph(n + 1, &pairs, false)
        }
        GraphKind::DirectedPath(n) => {
            positive("path length", n)?;
            let pairs: Vec<NodePair> = (0..n).map(|k| NodePair::new(k, k + 1)).collect();
            build_graph(n + 1, &pairs, true)
        }
        GraphKind::Cycle(n) => {
            if n < 3 {
                return Err(Error::InvalidSize("cycle needs at least 3 nodes".into()));
            }
            let pairs: Vec<NodePair> = (0..n).map(|k| NodePair::new(k, (k + 1) % n)).collect();
            build_graph(n, &pairs, false)
        }
        GraphKind::DirectedLattice2d { width, height } => {
            positive("lattice width", width)?;
            positive("lattice height", height)?;
            let mut pairs = Vec::new();
            for j in 0..=height {
                for i in 0..=width {
                    let here = lattice_id(width, i, j);
                    if i < width {
                        pairs.push(NodePair::new(here, lattice_id(width, i + 1, j)));
                    }
                    if j < height {
                        pairs.push(NodePair::new(here, lattice_id(width, i, j + 1)));
                    }
                }
            }
            build_graph((width + 1) * (height + 1), &pairs, true)
        }
        GraphKind::BinaryTree(depth) => {
            if depth >= usize::BITS as usize - 1 {
                return Err(Error::InvalidSize(format!("tree depth {depth} too large")));
            }
            let nodes = (1usize << (depth + 1)) - 1;
            let pairs: Vec<NodePair> = (1..nodes).map(|k| NodePair::new((k - 1) / 2, k)).collect();
            build_graph(nodes, &pairs, false)
        }
        GraphKind::Random {
            nodes,
            edge_probability,
            directed,
            seed,
        } => {
            positive("node count", nodes)?;
            if !(0.0..=1.0).contains(&edge_probability) {
                return Err(Error::InvalidSize(format!("edge probability {edge_probability} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pairs = Vec::new();
            for i in 0..nodes {
                for k in 0..nodes {
                    let candidate = if directed { i != k } else { i < k };
                    if candidate && rng.gen::<f64>() < edge_probability {
                        pairs.push(NodePair::new(i, k));
                    }
                }
            }
            build_graph(nodes, &pairs, directed)
        }
    }
}

/// Level-indexed binary tree family, used for exhaustion studies.
pub fn binary_tree_family(level: usize) -> Result<Graph> {
    generate(&GraphKind::BinaryTree(level))
}

/// Level-indexed path family: level `n` is the path with `n + 1` nodes.
pub fn path_family(level: usize) -> Result<Graph> {
    generate(&GraphKind::Path(level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_tree_shapes() {
        let g = generate(&GraphKind::BinaryTree(1)).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 1);
        let g = generate(&GraphKind::BinaryTree(3)).unwrap();
        assert_eq!(g.node_count(), 15);
        assert_eq!(g.degree(0), 2);
        assert!((1..7).all(|i| g.degree(i) == 3));
        assert!((7..15).all(|i| g.degree(i) == 1));
        assert_eq!(generate(&GraphKind::BinaryTree(0)).unwrap().node_count(), 1);
    }

    #[test]
    fn lattice_shape() {
        let g = generate(&GraphKind::DirectedLattice2d { width: 1, height: 1 }).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.out_degree(lattice_id(1, 1, 1)), 0);
        assert_eq!(g.out_degree(lattice_id(1, 0, 0)), 2);
    }

    #[test]
    fn path_and_cycle() {
        let g = generate(&GraphKind::Path(4)).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.max_degree(), 2);
        let c = generate(&GraphKind::Cycle(5)).unwrap();
        assert!((0..5).all(|i| c.degree(i) == 2));
    }

    #[test]
    fn nonpositive_sizes_are_rejected() {
        assert!(generate(&GraphKind::Path(0)).is_err());
        assert!(generate(&GraphKind::DirectedPath(0)).is_err());
        assert!(generate(&GraphKind::Cycle(2)).is_err());
        assert!(generate(&GraphKind::DirectedLattice2d { width: 0, height: 3 }).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let kind = GraphKind::Random {
            nodes: 10,
            edge_probability: 0.3,
            directed: true,
            seed: 7,
        };
        assert_eq!(generate(&kind).unwrap(), generate(&kind).unwrap());
    }
}
