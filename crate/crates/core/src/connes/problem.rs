//! The distance program restricted to one weakly connected component:
//! maximize `f_t - f_s` subject to `q_i(f) = Σ_{k ∈ out(i)} (f_k - f_i)^2 <= 1`.

use nalgebra::{DMatrix, DVector};

use crate::graph::Graph;

/// Star constraint centred at a node with at least one out-neighbor (local ids).
#[derive(Debug, Clone)]
pub(crate) struct Star {
    pub centre: usize,
    pub leaves: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    /// Local id -> global node id.
    pub nodes: Vec<usize>,
    pub source: usize,
    pub target: usize,
    pub stars: Vec<Star>,
}

impl Problem {
    /// Restricts to the component of `source`; `None` if `target` lies elsewhere.
    pub fn new(g: &Graph, source: usize, target: usize) -> Option<Self> {
        let comp = g.components();
        if comp[source] != comp[target] {
            return None;
        }
        let nodes: Vec<usize> = (0..g.node_count()).filter(|&i| comp[i] == comp[source]).collect();
        let mut local = vec![usize::MAX; g.node_count()];
        for (l, &i) in nodes.iter().enumerate() {
            local[i] = l;
        }
        let stars = nodes
            .iter()
            .filter(|&&i| g.out_degree(i) > 0)
            .map(|&i| Star {
                centre: local[i],
                leaves: g.out_neighbors(i).iter().map(|&k| local[k]).collect(),
            })
            .collect();
        Some(Self {
            nodes,
            source: local[source],
            target: local[target],
            stars,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn q(&self, star: &Star, f: &[f64]) -> f64 {
        star.leaves.iter().map(|&k| (f[k] - f[star.centre]).powi(2)).sum()
    }

    pub fn max_q(&self, f: &[f64]) -> f64 {
        self.stars.iter().map(|s| self.q(s, f)).fold(0.0, f64::max)
    }

    pub fn objective(&self, f: &[f64]) -> f64 {
        f[self.target] - f[self.source]
    }

    /// Shifts to `f_s = 0` and scales onto the feasible set.
    pub fn certify(&self, f: &[f64]) -> Vec<f64> {
        let shift = f[self.source];
        let m = self.max_q(f);
        let scale = if m > 1.0 { m.sqrt() } else { 1.0 };
        f.iter().map(|v| (v - shift) / scale).collect()
    }

    /// Index in the reduced coordinates that drop the gauge-fixed source.
    pub fn reduced(&self, i: usize) -> Option<usize> {
        match i.cmp(&self.source) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        }
    }

    /// Adds `w (e_a - e_b)(e_a - e_b)^T` to a reduced matrix.
    pub fn add_edge_term(&self, h: &mut DMatrix<f64>, a: usize, b: usize, w: f64) {
        let (ra, rb) = (self.reduced(a), self.reduced(b));
        if let Some(x) = ra {
            h[(x, x)] += w;
        }
        if let Some(y) = rb {
            h[(y, y)] += w;
        }
        if let (Some(x), Some(y)) = (ra, rb) {
            h[(x, y)] -= w;
            h[(y, x)] -= w;
        }
    }

    /// Lagrangian dual bound for weights `nu >= 0` (one per star):
    /// `sqrt(Σ nu · c^T L_nu^+ c)` with `L_nu = Σ nu_i M_i` and `c = e_t - e_s`.
    /// Every such value is an upper bound on the optimum.
    pub fn dual_bound(&self, nu: &[f64]) -> f64 {
        // nodes joined to the source through weighted stars
        let mut adj = vec![Vec::new(); self.len()];
        for (star, &w) in self.stars.iter().zip(nu) {
            if w > 0.0 {
                for &k in &star.leaves {
                    adj[star.centre].push(k);
                    adj[k].push(star.centre);
                }
            }
        }
        let mut seen = vec![false; self.len()];
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !seen[self.target] {
            return f64::INFINITY;
        }
        let mut index = vec![usize::MAX; self.len()];
        let mut n = 0;
        for v in 0..self.len() {
            if seen[v] && v != self.source {
                index[v] = n;
                n += 1;
            }
        }
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut add = |a: usize, b: usize, w: f64| {
            let (ia, ib) = (index[a], index[b]);
            if ia != usize::MAX {
                l[(ia, ia)] += w;
            }
            if ib != usize::MAX {
                l[(ib, ib)] += w;
            }
            if ia != usize::MAX && ib != usize::MAX {
                l[(ia, ib)] -= w;
                l[(ib, ia)] -= w;
            }
        };
        let mut total = 0.0;
        for (star, &w) in self.stars.iter().zip(nu) {
            if w > 0.0 {
                total += w;
                if seen[star.centre] {
                    for &k in &star.leaves {
                        add(k, star.centre, w);
                    }
                }
            }
        }
        let Some(chol) = l.cholesky() else {
            return f64::INFINITY;
        };
        let t = index[self.target];
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[t] = 1.0;
        let r = chol.solve(&rhs)[t];
        if r.is_finite() && r >= 0.0 {
            (total * r).sqrt()
        } else {
            f64::INFINITY
        }
    }

    pub fn to_global(&self, f: &[f64], node_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; node_count];
        for (&i, &v) in self.nodes.iter().zip(f) {
            out[i] = v;
        }
        out
    }
}

/// Tolerance on the objective: absolute up to 10, relative beyond.
pub(crate) fn effective_tol(tol: f64, value: f64) -> f64 {
    tol * (value.abs() / 10.0).max(1.0)
}
