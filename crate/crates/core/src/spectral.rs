//! Spectral norm estimates by power iteration, and norm bounds for adjacency
//! operators along exhaustions by finite subgraphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph};
use crate::operators::{adjacency, GraphOperator, LinearOperator};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RESTARTS: usize = 5;

/// Iteration cap per restart.
const MAX_POWER_ITERATIONS: usize = 200_000;

/// Result of a norm estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Certified distance from `value` to a singular value of the operator.
    pub residual: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nx = norm(&x);
        if nx > 1e-3 {
            return x.into_iter().map(|v| v / nx).collect();
        }
    }
}

/// Power iteration on `op* op` with random restarts.
///
/// Each run stops once the Rayleigh residual `‖op*op x - ρx‖` certifies the
/// singular value estimate `√ρ` to within `tol`. The returned value is the
/// largest `‖op x‖` over all runs, hence a rigorous lower bound on `‖op‖`.
/// `upper_bound` is `value + residual`.
pub fn power_norm(op: &dyn LinearOperator, tol: f64, seed: u64, restarts: usize) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {tol}")));
    }
    let n = op.input_dim();
    if n == 0 || op.output_dim() == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
            lower_bound: 0.0,
            upper_bound: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    let mut best_residual = 0.0;
    let mut total_iterations = 0;
    for _ in 0..restarts.max(1) {
        let mut x = random_unit(&mut rng, n);
        let mut residual = f64::INFINITY;
        let mut sigma = 0.0;
        let mut last_rho = f64::NAN;
        let mut stalled = 0;
        for _ in 0..MAX_POWER_ITERATIONS {
            total_iterations += 1;
            let y = op.apply(&x);
            let m = op.apply_adjoint(&y);
            let rho = dot(&x, &m);
            sigma = norm(&y);
            let r = m.iter().zip(&x).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt();
            // ρ is within r of an eigenvalue of op*op, so √ρ is within this of a singular value
            residual = if rho > 0.0 { (rho + r).sqrt() - rho.sqrt() } else { r.sqrt() };
            let nm = norm(&m);
            if nm == 0.0 {
                residual = 0.0;
                break;
            }
            if residual <= tol * 0.1 {
                break;
            }
            // near-degenerate top eigenvalues: ρ is settled long before the residual
            if (rho - last_rho).abs() <= 1e-15 * rho.max(1e-300) {
                stalled += 1;
                if stalled >= 50 && residual <= tol * sigma.max(1.0) {
                    break;
                }
            } else {
                stalled = 0;
            }
            last_rho = rho;
            x = m.into_iter().map(|v| v / nm).collect();
        }
        if sigma > best || total_iterations == 0 {
            best = sigma;
            best_residual = residual;
        } else if (sigma - best).abs() <= tol {
            best_residual = best_residual.min(residual);
        }
    }
    Ok(NormEstimate {
        value: best,
        iterations: total_iterations,
        residual: best_residual,
        lower_bound: best,
        upper_bound: best + best_residual,
    })
}

/// Randomized adjointness defect `max |<Ax, y> - <x, Ay>|` over a few probes.
pub fn adjointness_defect(op: &dyn LinearOperator, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.input_dim();
    if n == 0 {
        return 0.0;
    }
    (0..3)
        .map(|_| {
            let x = random_unit(&mut rng, n);
            let y = random_unit(&mut rng, n);
            (dot(&op.apply(&x), &y) - dot(&x, &op.apply(&y))).abs()
        })
        .fold(0.0, f64::max)
}

/// Spectral norm of a self-adjoint graph operator.
///
/// `upper_bound` is the maximal absolute row sum, which dominates the norm of
/// a symmetric matrix.
pub fn spectral_norm(op: &GraphOperator, tol: f64) -> Result<NormEstimate> {
    let scale = op.matrix().max_abs_row_sum().max(1.0);
    let defect = if op.domain() == op.codomain() {
        adjointness_defect(op, DEFAULT_SEED)
    } else {
        f64::INFINITY
    };
    if defect > 1e-12 * scale {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let mut est = power_norm(op, tol, DEFAULT_SEED, DEFAULT_RESTARTS)?;
    est.upper_bound = op.matrix().max_abs_row_sum();
    Ok(est)
}

/// `(Σ v_i / n, v_max)`, which bracket `‖A‖` for an undirected graph.
pub fn adjacency_norm_bounds(g: &Graph) -> Result<(f64, f64)> {
    if g.is_directed() {
        return Err(Error::RequiresUndirected);
    }
    if g.node_count() == 0 {
        return Ok((0.0, 0.0));
    }
    let avg = g.degree_sum() as f64 / g.node_count() as f64;
    Ok((avg, g.max_degree() as f64))
}

/// Adjacency norms along a nested family `generator(1), ..., generator(max_level)`.
///
/// Each level must be the induced subgraph of the next one on its first nodes.
/// Norms along such an exhaustion cannot decrease; a decrease beyond `10 tol`
/// is reported as a numerical failure.
pub fn norm_exhaustion<F>(generator: F, max_level: usize, tol: f64) -> Result<Vec<NormEstimate>>
where
    F: Fn(usize) -> Result<Graph> + Sync,
{
    let graphs: Vec<Graph> = (1..=max_level).map(&generator).collect::<Result<_>>()?;
    for (k, pair) in graphs.windows(2).enumerate() {
        let (small, big) = (&pair[0], &pair[1]);
        let prefix: Vec<usize> = (0..small.node_count()).collect();
        let nested = small.node_count() <= big.node_count()
            && small.is_directed() == big.is_directed()
            && induced_subgraph(big, &prefix).map(|s| s.graph == *small).unwrap_or(false);
        if !nested {
            return Err(Error::NotNested(k + 1));
        }
    }
    let estimates: Vec<NormEstimate> = graphs
        .par_iter()
        .map(|g| spectral_norm(&adjacency(g), tol))
        .collect::<Result<_>>()?;
    for (k, w) in estimates.windows(2).enumerate() {
        if w[1].value < w[0].value - 10.0 * tol {
            return Err(Error::Numerical(format!(
                "adjacency norm decreased from {} to {} at level {}",
                w[0].value,
                w[1].value,
                k + 2
            )));
        }
    }
    Ok(estimates)
}
