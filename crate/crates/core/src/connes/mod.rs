//! Connes distance
//!
//! ```text
//! dist_C(n, n') = sup { f(n') - f(n) : ‖[D, f]‖ <= 1 }
//!              = sup { f(n') - f(n) : Σ_{k ∈ out(i)} (f_k - f_i)^2 <= 1 for all i }
//! ```
//!
//! solved as a convex program on the weakly connected component of `n`.
//! Results carry a feasible certificate, a dual upper bound (through
//! `residual`) and the a-priori bracket from [`apriori_bounds`].

mod barrier;
mod oracle;
mod problem;
mod projected;
mod structural;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{minimal_paths, Graph, DEFAULT_PATH_CAP};
use crate::operators::{commutator_norm, VertexVector};

pub use oracle::{oracle_connes_distance, ORACLE_NODE_LIMIT};
pub use projected::project_star;
pub use structural::{structural_checks, StructuralCheck, StructuralOptions, StructuralReport};

use problem::{effective_tol, Problem};

/// Admissibility slack allowed when re-checking certificates.
pub const ADMISSIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Barrier,
    ProjectedAscent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub method: Method,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 100_000,
            method: Method::Barrier,
            seed: 42,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// A node function together with `‖[D, f]‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleFunction {
    pub f: VertexVector,
    pub norm: f64,
}

impl AdmissibleFunction {
    pub fn new(g: &Graph, f: VertexVector) -> Result<Self> {
        let norm = commutator_norm(g, &f)?;
        Ok(Self { f, norm })
    }

    pub fn is_admissible(&self) -> bool {
        self.norm <= 1.0 + ADMISSIBILITY_SLACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistanceStatus {
    Converged,
    BoundOnly,
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    /// Best certified value; infinite when unreachable.
    pub value: f64,
    pub certificate: AdmissibleFunction,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Length of a shortest path in the undirected support.
    pub graph_distance: Option<usize>,
    pub iterations: usize,
    /// Dual upper bound minus `value`.
    pub residual: f64,
    pub status: DistanceStatus,
}

/// A-priori bracket for the distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriBounds {
    pub lower: f64,
    pub upper: f64,
    /// The distance is strictly below `upper`.
    pub strict_upper: bool,
    /// Shortest path length in the undirected support.
    pub graph_distance: usize,
    /// Admissible function attaining `lower`, with `f(source) = 0`.
    pub certificate: Vec<f64>,
}

/// Exact distance between the ends of an undirected path with `n` edges.
pub fn path_closed_form(n: usize) -> f64 {
    let half = (n * n / 2) as f64;
    if n % 2 == 0 {
        half.sqrt()
    } else {
        (half + 1.0).sqrt()
    }
}

fn undirected_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap_or(0);
        for w in g.neighbors_undirected(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn check_nodes(g: &Graph, source: usize, target: usize) -> Result<()> {
    if source >= g.node_count() || target >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            from: source,
            to: target,
            node_count: g.node_count(),
        });
    }
    Ok(())
}

fn has_two_minimal_paths(g: &Graph, a: usize, b: usize, length: usize) -> bool {
    match minimal_paths(g, a, b, DEFAULT_PATH_CAP) {
        Ok(paths) => paths.len() >= 2 && paths[0].len() == length + 1,
        Err(Error::TooManyPaths { .. }) => crate::graph::graph_distance(g, a, b).ok().flatten() == Some(length),
        Err(_) => false,
    }
}

/// Lower and upper bounds without optimization.
///
/// The lower bound comes from the layered function `min(d(base, ·), D)` with
/// `base ∈ {source, target}` and `D` the distance, rescaled by the largest
/// number of out-neighbors in a different layer. It equals `D / sqrt(v)` when
/// every node sees at most `v` layer changes. The upper bound is the distance
/// of the minimal path for undirected graphs and `D` for directed ones.
pub fn apriori_bounds(g: &Graph, source: usize, target: usize) -> Result<AprioriBounds> {
    check_nodes(g, source, target)?;
    if source == target {
        return Ok(AprioriBounds {
            lower: 0.0,
            upper: 0.0,
            strict_upper: false,
            graph_distance: 0,
            certificate: vec![0.0; g.node_count()],
        });
    }
    let from_source = undirected_distances(g, source);
    let d = from_source[target].ok_or(Error::Unreachable { from: source, to: target })?;
    let from_target = undirected_distances(g, target);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (layers, sign) in [(&from_source, 1.0), (&from_target, -1.0)] {
        let level: Vec<f64> = layers.iter().map(|l| l.map_or(0.0, |x| x.min(d) as f64)).collect();
        let v_eff = (0..g.node_count())
            .map(|i| g.out_neighbors(i).iter().filter(|&&k| level[k] != level[i]).count())
            .max()
            .unwrap_or(0)
            .max(1);
        let lower = d as f64 / (v_eff as f64).sqrt();
        if best.as_ref().map_or(true, |(b, _)| lower > *b) {
            let scale = sign / (v_eff as f64).sqrt();
            let offset = level[source] * scale;
            let cert = level.iter().map(|x| x * scale - offset).collect();
            best = Some((lower, cert));
        }
    }
    let (lower, certificate) = best.expect("two candidates");

    let (upper, strict_upper) = if g.is_directed() {
        let strict = d > 1 && (has_two_minimal_paths(g, source, target, d) || has_two_minimal_paths(g, target, source, d));
        (d as f64, strict)
    } else {
        (path_closed_form(d), d > 1)
    };
    Ok(AprioriBounds {
        lower,
        upper,
        strict_upper,
        graph_distance: d,
        certificate,
    })
}

/// Solver state shared by the barrier and projected ascent methods.
#[derive(Debug, Clone)]
pub(crate) struct SolveOutcome {
    /// Best feasible point found (local ids, gauge fixed).
    pub f: Vec<f64>,
    pub value: f64,
    /// Smallest dual bound found.
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveOutcome {
    pub fn start(p: &Problem) -> Self {
        Self {
            f: vec![0.0; p.len()],
            value: 0.0,
            upper: f64::INFINITY,
            iterations: 0,
            converged: false,
        }
    }

    pub fn offer(&mut self, p: &Problem, f: &[f64], upper: f64) {
        let cert = p.certify(f);
        let v = p.objective(&cert);
        if v > self.value {
            self.value = v;
            self.f = cert;
        }
        self.upper = self.upper.min(upper);
    }
}

fn zero_result(g: &Graph) -> DistanceResult {
    DistanceResult {
        value: 0.0,
        certificate: AdmissibleFunction {
            f: VertexVector::zeros(g.node_count()),
            norm: 0.0,
        },
        lower_bound: 0.0,
        upper_bound: 0.0,
        graph_distance: Some(0),
        iterations: 0,
        residual: 0.0,
        status: DistanceStatus::Converged,
    }
}

fn unreachable_result(g: &Graph) -> DistanceResult {
    DistanceResult {
        value: f64::INFINITY,
        lower_bound: f64::INFINITY,
        upper_bound: f64::INFINITY,
        graph_distance: None,
        residual: 0.0,
        status: DistanceStatus::Unreachable,
        ..zero_result(g)
    }
}

/// Connes distance between `source` and `target`.
///
/// The value is the objective of a feasible certificate, so it never exceeds
/// the true distance; `residual` bounds the remaining gap. A disconnected pair
/// yields status `Unreachable`, an exhausted iteration budget `BoundOnly`.
pub fn connes_distance(g: &Graph, source: usize, target: usize, cfg: &SolverConfig) -> Result<DistanceResult> {
    cfg.validate()?;
    check_nodes(g, source, target)?;
    if source == target {
        return Ok(zero_result(g));
    }
    let Some(p) = Problem::new(g, source, target) else {
        return Ok(unreachable_result(g));
    };
    let bounds = apriori_bounds(g, source, target)?;

    let mut outcome = match cfg.method {
        Method::Barrier => barrier::solve(&p, cfg.tol, cfg.max_iterations),
        Method::ProjectedAscent => {
            projected::solve(&p, cfg.tol, cfg.max_iterations, bounds.graph_distance as f64, cfg.seed)
        }
    };
    let mut certificate = p.to_global(&outcome.f, g.node_count());
    if bounds.lower > outcome.value {
        outcome.value = bounds.lower;
        certificate = bounds.certificate.clone();
        if outcome.upper - outcome.value <= effective_tol(cfg.tol, outcome.value) {
            outcome.converged = true;
        }
    }
    let certificate = AdmissibleFunction::new(g, VertexVector(certificate))?;
    if !certificate.is_admissible() {
        return Err(Error::Numerical(format!("certificate has commutator norm {}", certificate.norm)));
    }
    Ok(DistanceResult {
        value: outcome.value,
        certificate,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        graph_distance: Some(bounds.graph_distance),
        iterations: outcome.iterations,
        residual: (outcome.upper - outcome.value).max(0.0),
        status: if outcome.converged {
            DistanceStatus::Converged
        } else {
            DistanceStatus::BoundOnly
        },
    })
}

/// All ordered pairs, indexed `[source][target]`.
pub fn distance_matrix(g: &Graph, cfg: &SolverConfig) -> Result<Vec<Vec<DistanceResult>>> {
    let n = g.node_count();
    let flat: Vec<DistanceResult> = (0..n * n)
        .into_par_iter()
        .map(|idx| connes_distance(g, idx / n, idx % n, cfg))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(n);
    let mut it = flat.into_iter();
    for _ in 0..n {
        rows.push(it.by_ref().take(n).collect());
    }
    Ok(rows)
}
