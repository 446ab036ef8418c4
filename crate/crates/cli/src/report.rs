//! JSON envelope shared by every subcommand.

use std::time::Duration;

use graph_connes::connes::{DistanceResult, DistanceStatus, SolverConfig};
use graph_connes::edgelist::LabeledGraph;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Option<f64> {
    x.is_finite().then(|| format!("{x:.11e}").parse().expect("formatted float parses"))
}

pub fn nums(xs: &[f64]) -> Vec<Option<f64>> {
    xs.iter().map(|&x| num(x)).collect()
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub directed: bool,
    pub v_max: usize,
}

impl GraphSummary {
    pub fn of(lg: &LabeledGraph) -> Self {
        let g = &lg.graph;
        Self {
            n: g.node_count(),
            edges: if g.is_directed() { g.edge_count() } else { g.edge_count() / 2 },
            directed: g.is_directed(),
            v_max: g.max_degree(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    pub tol: Option<f64>,
    pub method: &'static str,
    pub max_iterations: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Diagnostics {
    pub fn new(cfg: &SolverConfig) -> Self {
        Self {
            tol: num(cfg.tol),
            method: match cfg.method {
                graph_connes::connes::Method::Barrier => "barrier",
                graph_connes::connes::Method::ProjectedAscent => "projected_ascent",
            },
            max_iterations: cfg.max_iterations,
            seed: cfg.seed,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport<P: Serialize> {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub graph: Option<GraphSummary>,
    pub result: P,
    pub timing: Timing,
    pub diagnostics: Diagnostics,
}

impl<P: Serialize> RunReport<P> {
    pub fn new(command: Vec<String>, graph: Option<GraphSummary>, result: P, elapsed: Duration, cfg: &SolverConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            graph,
            result,
            timing: Timing {
                elapsed_ms: num(elapsed.as_secs_f64() * 1e3),
            },
            diagnostics: Diagnostics::new(cfg),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DistancePayload {
    pub from: String,
    pub to: String,
    pub value: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub graph_distance: Option<usize>,
    pub status: DistanceStatus,
    pub iterations: usize,
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Option<f64>>>,
}

impl DistancePayload {
    pub fn new(lg: &LabeledGraph, from: usize, to: usize, r: &DistanceResult, certificate: bool) -> Self {
        Self {
            from: lg.labels[from].clone(),
            to: lg.labels[to].clone(),
            value: num(r.value),
            lower_bound: num(r.lower_bound),
            upper_bound: num(r.upper_bound),
            graph_distance: r.graph_distance,
            status: r.status,
            iterations: r.iterations,
            residual: num(r.residual),
            certificate: certificate.then(|| nums(&r.certificate.f.0)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}
