//! `connes`: Connes distances, operator norms and checks on graph files.

mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_connes::connes::{
    connes_distance, distance_matrix, structural_checks, DistanceResult, DistanceStatus, Method, SolverConfig,
    StructuralOptions,
};
use graph_connes::edgelist::{parse_edge_list, write_edge_list, LabeledGraph};
use graph_connes::generators::{generate, GraphKind};
use graph_connes::graph::bfs_distances;
use graph_connes::operators::{
    adjacency, boundary_operator, coboundary_operator, commutator, commutator_norm, cycle_space_dimension, dirac,
    grading, laplacian, VertexVector,
};
use graph_connes::spectral::{adjacency_norm_bounds, power_norm, spectral_norm, DEFAULT_RESTARTS};
use graph_connes::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use report::{num, Check, DistancePayload, GraphSummary, RunReport};

const EXIT_USAGE: u8 = 1;
const EXIT_UNREACHABLE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "connes", version, about = "Connes distances and operator norms on finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Barrier,
    ProjectedAscent,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Absolute tolerance on the distance (relative beyond 10).
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Barrier)]
    method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iterations: self.max_iterations,
            method: match self.method {
                MethodArg::Barrier => Method::Barrier,
                MethodArg::ProjectedAscent => Method::ProjectedAscent,
            },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorArg {
    Adjacency,
    Laplacian,
    Dirac,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Connes distance between two nodes.
    Dist {
        graph: PathBuf,
        from: String,
        to: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Include the optimal function in the output.
        #[arg(long)]
        certificate: bool,
    },
    /// Distances between all ordered pairs.
    Matrix {
        graph: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// One JSON object per pair instead of a single report.
        #[arg(long)]
        jsonl: bool,
    },
    /// Operator norm by power iteration.
    Norm {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = OperatorArg::Adjacency)]
        operator: OperatorArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Writes a generated graph as an edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file; the edge list goes to stdout when absent.
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42, global = true)]
        seed: u64,
    },
    /// Operator identities and structural checks.
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Path { n: usize },
    Cycle { n: usize },
    DirectedPath { n: usize },
    DirectedLattice { width: usize, height: usize },
    BinaryTree { depth: usize },
    Random {
        nodes: usize,
        edge_probability: f64,
        #[arg(long)]
        directed: bool,
    },
}

impl GenKind {
    fn to_kind(&self, seed: u64) -> GraphKind {
        match *self {
            GenKind::Path { n } => GraphKind::Path(n),
            GenKind::Cycle { n } => GraphKind::Cycle(n),
            GenKind::DirectedPath { n } => GraphKind::DirectedPath(n),
            GenKind::DirectedLattice { width, height } => GraphKind::DirectedLattice2d { width, height },
            GenKind::BinaryTree { depth } => GraphKind::BinaryTree(depth),
            GenKind::Random {
                nodes,
                edge_probability,
                directed,
            } => GraphKind::Random {
                nodes,
                edge_probability,
                directed,
                seed,
            },
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: Error },
    #[error("unknown node label `{0}`")]
    UnknownNode(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
    #[error("encoding output: {0}")]
    Json(#[from] serde_json::Error),
}

fn load(path: &Path) -> Result<LabeledGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_edge_list(&text).map_err(|source| CliError::Graph {
        path: path.to_owned(),
        source,
    })
}

fn node(lg: &LabeledGraph, label: &str) -> Result<usize, CliError> {
    lg.id_of(label).ok_or_else(|| CliError::UnknownNode(label.to_owned()))
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn status_code(results: impl IntoIterator<Item = DistanceStatus>) -> u8 {
    if results.into_iter().any(|s| s == DistanceStatus::BoundOnly) {
        EXIT_NOT_CONVERGED
    } else {
        0
    }
}

fn run(cli: Cli, command: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Dist {
            graph,
            from,
            to,
            solver,
            certificate,
        } => {
            let lg = load(&graph)?;
            let (s, t) = (node(&lg, &from)?, node(&lg, &to)?);
            let cfg = solver.config();
            let r = connes_distance(&lg.graph, s, t, &cfg)?;
            let payload = DistancePayload::new(&lg, s, t, &r, certificate);
            emit(&RunReport::new(command, Some(GraphSummary::of(&lg)), payload, started.elapsed(), &cfg))?;
            Ok(match r.status {
                DistanceStatus::Unreachable => EXIT_UNREACHABLE,
                status => status_code([status]),
            })
        }
        Command::Matrix { graph, solver, jsonl } => {
            let lg = load(&graph)?;
            let cfg = solver.config();
            let rows = distance_matrix(&lg.graph, &cfg)?;
            let code = status_code(rows.iter().flatten().map(|r| r.status));
            if jsonl {
                let mut out = std::io::stdout().lock();
                for (s, row) in rows.iter().enumerate() {
                    for (t, r) in row.iter().enumerate() {
                        serde_json::to_writer(&mut out, &DistancePayload::new(&lg, s, t, r, false))?;
                        writeln!(out)?;
                    }
                }
            } else {
                let payload = MatrixPayload::new(&lg, &rows);
                emit(&RunReport::new(command, Some(GraphSummary::of(&lg)), payload, started.elapsed(), &cfg))?;
            }
            Ok(code)
        }
        Command::Norm { graph, operator, tol } => {
            let lg = load(&graph)?;
            let g = &lg.graph;
            let op = match operator {
                OperatorArg::Adjacency => adjacency(g),
                OperatorArg::Laplacian => laplacian(g),
                OperatorArg::Dirac => dirac(g),
            };
            let est = spectral_norm(&op, tol)?;
            let (lo, hi) = adjacency_norm_bounds(g)?;
            let payload = NormPayload {
                operator: op.name(),
                value: num(est.value),
                lower_bound: num(est.lower_bound),
                upper_bound: num(est.upper_bound),
                iterations: est.iterations,
                residual: num(est.residual),
                adjacency_bounds: [num(lo), num(hi)],
            };
            let cfg = SolverConfig {
                tol,
                ..SolverConfig::default()
            };
            emit(&RunReport::new(command, Some(GraphSummary::of(&lg)), payload, started.elapsed(), &cfg))?;
            Ok(0)
        }
        Command::Gen { kind, out, seed } => {
            let g = generate(&kind.to_kind(seed))?;
            let lg = LabeledGraph::with_numeric_labels(g);
            let text = write_edge_list(&lg);
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let cfg = SolverConfig {
                        seed,
                        ..SolverConfig::default()
                    };
                    let payload = GenPayload {
                        path: path.display().to_string(),
                    };
                    emit(&RunReport::new(command, Some(GraphSummary::of(&lg)), payload, started.elapsed(), &cfg))?;
                }
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
            Ok(0)
        }
        Command::Verify { graph, solver } => {
            let lg = load(&graph)?;
            let cfg = solver.config();
            let checks = verify(&lg, &cfg)?;
            let all_passed = checks.iter().all(|c| c.passed);
            let payload = VerifyPayload { all_passed, checks };
            emit(&RunReport::new(command, Some(GraphSummary::of(&lg)), payload, started.elapsed(), &cfg))?;
            Ok(if all_passed { 0 } else { EXIT_NOT_CONVERGED })
        }
    }
}

#[derive(Debug, Serialize)]
struct MatrixPayload {
    labels: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
    status: Vec<Vec<DistanceStatus>>,
    max_residual: Option<f64>,
}

impl MatrixPayload {
    fn new(lg: &LabeledGraph, rows: &[Vec<DistanceResult>]) -> Self {
        Self {
            labels: lg.labels.clone(),
            values: rows.iter().map(|row| row.iter().map(|r| num(r.value)).collect()).collect(),
            status: rows.iter().map(|row| row.iter().map(|r| r.status).collect()).collect(),
            max_residual: num(rows.iter().flatten().map(|r| r.residual).fold(0.0, f64::max)),
        }
    }
}

#[derive(Debug, Serialize)]
struct NormPayload {
    operator: &'static str,
    value: Option<f64>,
    lower_bound: Option<f64>,
    upper_bound: Option<f64>,
    iterations: usize,
    residual: Option<f64>,
    adjacency_bounds: [Option<f64>; 2],
}

#[derive(Debug, Serialize)]
struct GenPayload {
    path: String,
}

#[derive(Debug, Serialize)]
struct VerifyPayload {
    all_passed: bool,
    checks: Vec<Check>,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_owned(),
        passed,
        detail,
    }
}

fn verify(lg: &LabeledGraph, cfg: &SolverConfig) -> Result<Vec<Check>, CliError> {
    let g = &lg.graph;
    let mut checks = Vec::new();

    let d = coboundary_operator(g).dense().expect("coboundary has a dense form");
    let dstar = boundary_operator(g).dense().expect("boundary has a dense form");
    let factor = if g.is_directed() { -1.0 } else { -2.0 };
    let lap = laplacian(g).dense().expect("laplacian has a dense form") * factor;
    let defect = (&dstar * &d - lap).amax();
    checks.push(check("coboundary_laplacian", defect <= 1e-12, format!("max defect {defect:e}")));

    let dm = dirac(g).dense().expect("dirac has a dense form");
    let chi = grading(g).dense().expect("grading has a dense form");
    let anti = (&chi * &dm + &dm * &chi).amax();
    checks.push(check("grading_anticommutes", anti == 0.0, format!("max entry {anti:e}")));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let f = VertexVector((0..g.node_count()).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let exact = commutator_norm(g, &f)?;
        let est = power_norm(&commutator(g, &f)?, 1e-11, rng.gen(), DEFAULT_RESTARTS)?;
        worst = worst.max((exact - est.value).abs());
    }
    checks.push(check("commutator_norm", worst <= 1e-8, format!("max deviation {worst:e}")));

    let dims = cycle_space_dimension(g)?;
    checks.push(check(
        "cycle_space",
        dims.kernel_dim == dims.predicted_kernel_dim,
        format!("kernel {} predicted {}", dims.kernel_dim, dims.predicted_kernel_dim),
    ));

    if let Some((s, t)) = farthest_pair(lg) {
        let r = connes_distance(g, s, t, cfg)?;
        checks.push(check(
            "solver_converged",
            r.status == DistanceStatus::Converged,
            format!("{} -> {}: {} ({:?})", lg.labels[s], lg.labels[t], r.value, r.status),
        ));
        let structural = structural_checks(g, s, t, &r, cfg, &StructuralOptions::default())?;
        checks.extend(structural.checks.into_iter().map(|c| Check {
            name: format!("structural.{}", c.name),
            passed: c.passed,
            detail: c.detail,
        }));
    }
    Ok(checks)
}

/// The reachable pair with the largest graph distance, smallest ids first.
fn farthest_pair(lg: &LabeledGraph) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for s in 0..lg.graph.node_count() {
        for (t, d) in bfs_distances(&lg.graph, s).into_iter().enumerate() {
            if let Some(d) = d.filter(|&d| d > 0) {
                if best.is_none_or(|(_, _, b)| d > b) {
                    best = Some((s, t, d));
                }
            }
        }
    }
    best.map(|(s, t, _)| (s, t))
}

fn init_threads() {
    if let Some(n) = std::env::var("CONNES_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    let command = std::env::args().skip(1).collect();
    match run(cli, command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
