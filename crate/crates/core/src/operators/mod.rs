//! Operator calculus on the vertex space `H0` and the edge space `H1`.
//!
//! Basis of `H0`: one indicator per node. Basis of `H1`: one indicator per
//! stored directed edge, in the order of [`Graph::edges`]. Vectors on
//! `H0 ⊕ H1` are laid out as `[node values..., edge values...]`.
//!
//! Sign convention: `(df)_(i,k) = f_k - f_i` on every stored edge, for directed
//! and undirected graphs alike. Node functions act on `H1` through the value
//! at the edge's terminal node, `f · d_ik = f_k d_ik`; with this choice the
//! commutator norm is governed by out-neighbor sums on directed graphs.

mod sparse;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use sparse::SparseMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Dense matrices are only materialized for graphs up to this many nodes.
pub const DENSE_LIMIT: usize = 4096;

/// Relative singular-value cutoff for numerical rank.
pub const RANK_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Vertex space.
    H0,
    /// Edge space.
    H1,
    /// `H0 ⊕ H1`.
    Total,
}

impl Space {
    pub fn dim(self, g: &Graph) -> usize {
        match self {
            Space::H0 => g.node_count(),
            Space::H1 => g.edge_count(),
            Space::Total => g.node_count() + g.edge_count(),
        }
    }
}

/// A real linear map with its adjoint, possibly matrix-free.
pub trait LinearOperator: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64>;
}

/// A named operator between graph Hilbert spaces, stored as a sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphOperator {
    name: &'static str,
    domain: Space,
    codomain: Space,
    node_count: usize,
    matrix: SparseMatrix,
}

impl GraphOperator {
    pub fn new(name: &'static str, g: &Graph, domain: Space, codomain: Space, matrix: SparseMatrix) -> Self {
        debug_assert_eq!(matrix.cols(), domain.dim(g));
        debug_assert_eq!(matrix.rows(), codomain.dim(g));
        Self {
            name,
            domain,
            codomain,
            node_count: g.node_count(),
            matrix,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn domain(&self) -> Space {
        self.domain
    }

    pub fn codomain(&self) -> Space {
        self.codomain
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Dense materialization, available below [`DENSE_LIMIT`] nodes.
    pub fn dense(&self) -> Option<DMatrix<f64>> {
        (self.node_count <= DENSE_LIMIT).then(|| self.matrix.to_dense())
    }

    pub fn adjoint(&self) -> GraphOperator {
        GraphOperator {
            name: self.name,
            domain: self.codomain,
            codomain: self.domain,
            node_count: self.node_count,
            matrix: self.matrix.transpose(),
        }
    }

    /// Applies the (real) operator to a complex vector.
    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        self.matrix
            .apply(&re)
            .into_iter()
            .zip(self.matrix.apply(&im))
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }
}

impl LinearOperator for GraphOperator {
    fn input_dim(&self) -> usize {
        self.matrix.cols()
    }

    fn output_dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.apply(x)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.matrix.apply_transpose(y)
    }
}

macro_rules! space_vector {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
        pub struct $name(pub Vec<f64>);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                Self(vec![0.0; len])
            }

            pub fn values(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn dot(&self, other: &Self) -> f64 {
                self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
            }

            pub fn norm(&self) -> f64 {
                self.dot(self).sqrt()
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }
    };
}

space_vector!(
    /// Element of `H0`: one value per node.
    VertexVector
);
space_vector!(
    /// Element of `H1`: one value per stored directed edge.
    EdgeVector
);

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn coboundary_matrix(g: &Graph) -> SparseMatrix {
    let trip = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &(i, k))| [(e, k, 1.0), (e, i, -1.0)])
        .collect();
    SparseMatrix::from_triplets(g.edge_count(), g.node_count(), trip)
}

/// The coboundary `d : H0 -> H1`.
pub fn coboundary_operator(g: &Graph) -> GraphOperator {
    GraphOperator::new("d", g, Space::H0, Space::H1, coboundary_matrix(g))
}

/// The adjoint `d* : H1 -> H0`.
pub fn boundary_operator(g: &Graph) -> GraphOperator {
    GraphOperator::new("d*", g, Space::H1, Space::H0, coboundary_matrix(g).transpose())
}

/// The partial coboundaries `(d1, d2)` with `d = d1 - d2`:
/// `d1` reads the terminal node of each edge, `d2` the initial node.
/// Their adjoints are the boundary maps `δ1 : d_ik -> n_k` and `δ2 : d_ik -> n_i`.
pub fn partial_coboundaries(g: &Graph) -> (GraphOperator, GraphOperator) {
    let terminal = g.edges().iter().enumerate().map(|(e, &(_, k))| (e, k, 1.0)).collect();
    let initial = g.edges().iter().enumerate().map(|(e, &(i, _))| (e, i, 1.0)).collect();
    (
        GraphOperator::new("d1", g, Space::H0, Space::H1, SparseMatrix::from_triplets(g.edge_count(), g.node_count(), terminal)),
        GraphOperator::new("d2", g, Space::H0, Space::H1, SparseMatrix::from_triplets(g.edge_count(), g.node_count(), initial)),
    )
}

/// `(df)_(i,k) = f_k - f_i`.
pub fn coboundary(g: &Graph, f: &VertexVector) -> Result<EdgeVector> {
    check_len(g.node_count(), f.len())?;
    Ok(EdgeVector(g.edges().iter().map(|&(i, k)| f.0[k] - f.0[i]).collect()))
}

/// `(d*h)_j = sum of h over edges entering j - sum of h over edges leaving j`.
pub fn boundary_adjoint(g: &Graph, h: &EdgeVector) -> Result<VertexVector> {
    check_len(g.edge_count(), h.len())?;
    let mut out = vec![0.0; g.node_count()];
    for (&(i, k), &v) in g.edges().iter().zip(&h.0) {
        out[k] += v;
        out[i] -= v;
    }
    Ok(VertexVector(out))
}

/// In- and out-adjacency: `A_out[i][k] = 1` iff `i -> k`, `A_in = A_out^T`.
/// Both equal the ordinary adjacency matrix for undirected graphs.
pub fn directed_adjacency(g: &Graph) -> (GraphOperator, GraphOperator) {
    let out: Vec<_> = g.edges().iter().map(|&(i, k)| (i, k, 1.0)).collect();
    let inc: Vec<_> = g.edges().iter().map(|&(i, k)| (k, i, 1.0)).collect();
    let n = g.node_count();
    (
        GraphOperator::new("A_in", g, Space::H0, Space::H0, SparseMatrix::from_triplets(n, n, inc)),
        GraphOperator::new("A_out", g, Space::H0, Space::H0, SparseMatrix::from_triplets(n, n, out)),
    )
}

/// `(V_in, V_out)`, diagonal in- and out-degree matrices.
pub fn directed_degree(g: &Graph) -> (GraphOperator, GraphOperator) {
    let n = g.node_count();
    let vin: Vec<f64> = (0..n).map(|i| g.in_degree(i) as f64).collect();
    let vout: Vec<f64> = (0..n).map(|i| g.out_degree(i) as f64).collect();
    (
        GraphOperator::new("V_in", g, Space::H0, Space::H0, SparseMatrix::diagonal(&vin)),
        GraphOperator::new("V_out", g, Space::H0, Space::H0, SparseMatrix::diagonal(&vout)),
    )
}

/// Symmetric adjacency: `A` when undirected, `A_in + A_out` when directed.
pub fn adjacency(g: &Graph) -> GraphOperator {
    let (ain, aout) = directed_adjacency(g);
    if g.is_directed() {
        GraphOperator::new("A_d", g, Space::H0, Space::H0, ain.matrix().combine(1.0, aout.matrix(), 1.0))
    } else {
        GraphOperator::new("A", g, Space::H0, Space::H0, aout.matrix().clone())
    }
}

/// Degree matrix: `V` when undirected, `V_in + V_out` when directed.
pub fn degree(g: &Graph) -> GraphOperator {
    let values: Vec<f64> = (0..g.node_count()).map(|i| g.degree(i) as f64).collect();
    let name = if g.is_directed() { "V_d" } else { "V" };
    GraphOperator::new(name, g, Space::H0, Space::H0, SparseMatrix::diagonal(&values))
}

/// The graph Laplacian `Δ = A - V` (directed: `A_d - V_d`); `-Δ` is positive semidefinite.
///
/// `d*d = -2Δ` on undirected graphs and `d*d = -Δ` on directed graphs.
pub fn laplacian(g: &Graph) -> GraphOperator {
    let m = adjacency(g).matrix().combine(1.0, degree(g).matrix(), -1.0);
    GraphOperator::new("Laplacian", g, Space::H0, Space::H0, m)
}

/// The Dirac operator `D = [[0, d*], [d, 0]]` on `H0 ⊕ H1`.
pub fn dirac(g: &Graph) -> GraphOperator {
    let n = g.node_count();
    let trip = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &(i, k))| {
            let row = n + e;
            [(row, k, 1.0), (row, i, -1.0), (k, row, 1.0), (i, row, -1.0)]
        })
        .collect();
    let dim = n + g.edge_count();
    GraphOperator::new("D", g, Space::Total, Space::Total, SparseMatrix::from_triplets(dim, dim, trip))
}

/// The grading `χ = diag(1 on H0, -1 on H1)`.
pub fn grading(g: &Graph) -> GraphOperator {
    let values: Vec<f64> = std::iter::repeat(1.0)
        .take(g.node_count())
        .chain(std::iter::repeat(-1.0).take(g.edge_count()))
        .collect();
    GraphOperator::new("chi", g, Space::Total, Space::Total, SparseMatrix::diagonal(&values))
}

/// The antilinear involution `J`: entrywise complex conjugation.
pub fn involution(x: &[Complex64]) -> Vec<Complex64> {
    x.iter().map(|z| z.conj()).collect()
}

/// Diagonal of the multiplication operator of `f` on `H0 ⊕ H1`.
fn multiplication_diagonal<T: Copy>(g: &Graph, f: &[T]) -> Vec<T> {
    f.iter().copied().chain(g.edges().iter().map(|&(_, k)| f[k])).collect()
}

/// Representation of the node function `f` on `H0 ⊕ H1`.
pub fn multiplication(g: &Graph, f: &VertexVector) -> Result<GraphOperator> {
    check_len(g.node_count(), f.len())?;
    let diag = multiplication_diagonal(g, &f.0);
    Ok(GraphOperator::new("f", g, Space::Total, Space::Total, SparseMatrix::diagonal(&diag)))
}

/// Applies the multiplication operator of a complex node function.
pub fn multiplication_complex(g: &Graph, f: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(g.node_count(), f.len())?;
    check_len(Space::Total.dim(g), x.len())?;
    Ok(multiplication_diagonal(g, f).into_iter().zip(x).map(|(a, b)| a * b).collect())
}

/// Matrix-free commutator `[D, f]` on `H0 ⊕ H1` for a real node function `f`.
#[derive(Debug, Clone)]
pub struct Commutator {
    dirac: GraphOperator,
    diag: Vec<f64>,
}

/// Builds `[D, f]`.
pub fn commutator(g: &Graph, f: &VertexVector) -> Result<Commutator> {
    check_len(g.node_count(), f.len())?;
    Ok(Commutator {
        dirac: dirac(g),
        diag: multiplication_diagonal(g, &f.0),
    })
}

impl LinearOperator for Commutator {
    fn input_dim(&self) -> usize {
        self.diag.len()
    }

    fn output_dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let fx: Vec<f64> = x.iter().zip(&self.diag).map(|(a, b)| a * b).collect();
        let d_fx = self.dirac.apply(&fx);
        let dx = self.dirac.apply(x);
        d_fx.iter().zip(dx.iter().zip(&self.diag)).map(|(a, (b, m))| a - m * b).collect()
    }

    // D and f are self-adjoint, so [D, f]* = -[D, f].
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y).into_iter().map(|v| -v).collect()
    }
}

/// Applies `[D, f]` to a vector of `H0 ⊕ H1`.
pub fn commutator_apply(g: &Graph, f: &VertexVector, x: &[f64]) -> Result<Vec<f64>> {
    check_len(Space::Total.dim(g), x.len())?;
    Ok(commutator(g, f)?.apply(x))
}

/// Per-node sums `a_i = Σ_{k ∈ out(i)} (f_k - f_i)^2`.
pub fn node_jump_sums(g: &Graph, f: &[f64]) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| g.out_neighbors(i).iter().map(|&k| (f[k] - f[i]).powi(2)).sum())
        .collect()
}

/// `‖[D, f]‖ = max_i sqrt(a_i)`, neighbors taken as out-neighbors on directed graphs.
pub fn commutator_norm(g: &Graph, f: &VertexVector) -> Result<f64> {
    check_len(g.node_count(), f.len())?;
    Ok(node_jump_sums(g, &f.0).into_iter().fold(0.0, f64::max).sqrt())
}

/// Orthogonal projection of `H1` onto the antisymmetric subspace `g_ik = -g_ki`.
pub fn antisymmetrize(g: &Graph, h: &EdgeVector) -> Result<EdgeVector> {
    if g.is_directed() {
        return Err(Error::RequiresUndirected);
    }
    check_len(g.edge_count(), h.len())?;
    Ok(EdgeVector(
        (0..g.edge_count())
            .map(|e| {
                let r = g.reverse_edge(e).expect("undirected graphs store both orientations");
                0.5 * (h.0[e] - h.0[r])
            })
            .collect(),
    ))
}

/// The oriented bond `b_ik = d_ik - d_ki`.
pub fn bond_vector(g: &Graph, i: usize, k: usize) -> Result<EdgeVector> {
    if g.is_directed() {
        return Err(Error::RequiresUndirected);
    }
    let (Some(e), Some(r)) = (g.edge_index(i, k), g.edge_index(k, i)) else {
        return Err(Error::Unreachable { from: i, to: k });
    };
    let mut v = vec![0.0; g.edge_count()];
    v[e] = 1.0;
    v[r] = -1.0;
    Ok(EdgeVector(v))
}

/// Dimensions of the cycle space, computed by numerical rank and by counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSpaceDimensions {
    /// `dim H1`, the number of stored directed edges (`Σ v_i` when undirected).
    pub edge_space_dim: usize,
    /// Numerical rank of `d*`, equal to `dim Rg(d)`.
    pub rank: usize,
    /// `dim Ker(d*) = dim H1 - rank`.
    pub kernel_dim: usize,
    /// Number of weakly connected components.
    pub components: usize,
    /// `dim H1 - (n - c)`.
    pub predicted_kernel_dim: usize,
    /// `dim (Ker(d*) ∩ H1a)`, the number of independent cycles; `None` for directed graphs.
    pub antisymmetric_kernel_dim: Option<usize>,
}

fn numerical_rank(m: DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

pub fn cycle_space_dimension(g: &Graph) -> Result<CycleSpaceDimensions> {
    if g.node_count() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            nodes: g.node_count(),
            limit: DENSE_LIMIT,
        });
    }
    let rank = numerical_rank(boundary_operator(g).matrix().to_dense());
    let components = g.component_count();
    let antisymmetric_kernel_dim = if g.is_directed() {
        None
    } else {
        let bonds = g.bonds();
        let trip = bonds
            .iter()
            .enumerate()
            .flat_map(|(b, &(i, k))| [(k, b, 2.0), (i, b, -2.0)])
            .collect();
        let restricted = SparseMatrix::from_triplets(g.node_count(), bonds.len(), trip);
        Some(bonds.len() - numerical_rank(restricted.to_dense()))
    };
    Ok(CycleSpaceDimensions {
        edge_space_dim: g.edge_count(),
        rank,
        kernel_dim: g.edge_count() - rank,
        components,
        predicted_kernel_dim: g.edge_count() - (g.node_count() - components),
        antisymmetric_kernel_dim,
    })
}

#[cfg(test)]
mod tests;
