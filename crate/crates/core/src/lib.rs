//! Graph operator calculus and Connes distances on finite graphs.
//!
//! The crate builds the vertex/edge Hilbert spaces of a finite (directed or
//! undirected) graph, the coboundary `d` and its adjoint, adjacency, degree
//! and Laplacian operators, and the Dirac operator `D = [[0, d*], [d, 0]]` on
//! `H0 ⊕ H1`. On top of that it computes the Connes distance
//!
//! ```text
//! dist_C(n, n') = sup { |f(n') - f(n)| : ‖[D, f]‖ ≤ 1 }
//! ```
//!
//! as a convex program, together with a-priori bounds and closed forms.

pub mod connes;
pub mod edgelist;
pub mod error;
pub mod generators;
pub mod graph;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{build_graph, graph_distance, Graph, NodePair};
