//! Reference values from a general-purpose conic solver.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

use super::problem::Problem;
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const ORACLE_NODE_LIMIT: usize = 12;

/// Connes distance computed as a second-order cone program by Clarabel.
///
/// Each star constraint `Σ (f_k - f_i)^2 <= 1` becomes the cone
/// `(1, f_k1 - f_i, ..., f_kv - f_i) ∈ SOC`; the gauge `f_s = 0` is a zero
/// cone row. `budget` caps the interior point iterations.
pub fn oracle_connes_distance(g: &Graph, source: usize, target: usize, budget: usize) -> Result<f64> {
    if g.node_count() > ORACLE_NODE_LIMIT {
        return Err(Error::TooLarge {
            nodes: g.node_count(),
            limit: ORACLE_NODE_LIMIT,
        });
    }
    for n in [source, target] {
        if n >= g.node_count() {
            return Err(Error::NodeOutOfRange {
                from: source,
                to: target,
                node_count: g.node_count(),
            });
        }
    }
    if source == target {
        return Ok(0.0);
    }
    let p = Problem::new(g, source, target).ok_or(Error::Unreachable { from: source, to: target })?;
    let n = p.len();

    let (mut rows, mut cols, mut vals) = (vec![0], vec![p.source], vec![1.0]);
    let mut b = vec![0.0];
    let mut cones = vec![SupportedConeT::ZeroConeT(1)];
    for star in &p.stars {
        b.push(1.0);
        for &k in &star.leaves {
            let row = b.len();
            rows.extend([row, row]);
            cols.extend([k, star.centre]);
            vals.extend([-1.0, 1.0]);
            b.push(0.0);
        }
        cones.push(SupportedConeT::SecondOrderConeT(star.leaves.len() + 1));
    }
    let a = CscMatrix::new_from_triplets(b.len(), n, rows, cols, vals);
    let pm = CscMatrix::zeros((n, n));
    let mut q = vec![0.0; n];
    q[p.target] = -1.0;
    let mut last = None;
    for accuracy in [1e-11, 1e-9, 1e-8] {
        let settings = DefaultSettings {
            verbose: false,
            max_iter: budget.min(u32::MAX as usize) as u32,
            tol_gap_abs: accuracy,
            tol_gap_rel: accuracy,
            tol_feas: accuracy,
            ..DefaultSettings::default()
        };
        let mut solver =
            DefaultSolver::new(&pm, &q, &a, &b, &cones, settings).map_err(|e| Error::Numerical(format!("{e:?}")))?;
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                return Ok(solver.solution.x[p.target] - solver.solution.x[p.source])
            }
            SolverStatus::MaxIterations => return Err(Error::Numerical("oracle iteration budget exhausted".into())),
            status => last = Some(status),
        }
    }
    Err(Error::Numerical(format!("oracle solver stopped with status {:?}", last.expect("at least one attempt"))))
}
