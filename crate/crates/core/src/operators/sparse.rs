use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Compressed sparse row matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < rows && c < cols);
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != 0.0);

        let mut row_ptr = vec![0; rows + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let col_idx = merged.iter().map(|t| t.1).collect();
        let values = merged.iter().map(|t| t.2).collect();
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |j| (r, self.col_idx[j], self.values[j]))
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "sparse apply: dimension mismatch");
        (0..self.rows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|j| self.values[j] * x[self.col_idx[j]])
                    .sum()
            })
            .collect()
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "sparse transpose apply: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.col_idx[j]] += self.values[j] * y[r];
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    /// Sparse product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "sparse product: dimension mismatch");
        let mut trip = Vec::new();
        for r in 0..self.rows {
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (mid, a) = (self.col_idx[j], self.values[j]);
                for l in rhs.row_ptr[mid]..rhs.row_ptr[mid + 1] {
                    trip.push((r, rhs.col_idx[l], a * rhs.values[l]));
                }
            }
        }
        Self::from_triplets(self.rows, rhs.cols, trip)
    }

    /// `alpha * self + beta * rhs`.
    pub fn combine(&self, alpha: f64, rhs: &SparseMatrix, beta: f64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let trip = self
            .triplets()
            .map(|(r, c, v)| (r, c, alpha * v))
            .chain(rhs.triplets().map(|(r, c, v)| (r, c, beta * v)))
            .collect();
        Self::from_triplets(self.rows, self.cols, trip)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral norm of a symmetric matrix.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|j| self.values[j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Coordinate-triplet text: a `rows cols nnz` header followed by `row col value` lines.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for (r, c, v) in self.triplets() {
            writeln!(s, "{r} {c} {v:e}").unwrap();
        }
        s
    }
}
