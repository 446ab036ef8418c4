//! Consistency checks of a computed distance against graph modifications
//! whose effect on the distance is known.

use serde::Serialize;

use super::{connes_distance, path_closed_form, DistanceResult, DistanceStatus, SolverConfig, ADMISSIBILITY_SLACK};
use crate::error::Result;
use crate::graph::{build_graph, Graph, NodePair};

#[derive(Debug, Clone, Default)]
pub struct StructuralOptions {
    /// Subgraphs on the same node ids; the distance may only grow on them.
    pub subgraphs: Vec<Graph>,
    /// Length of the shortcut path to attach. Defaults to the largest integer
    /// strictly below the current value.
    pub shortcut_length: Option<usize>,
    /// Allowed discrepancy between two solves.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct StructuralReport {
    pub checks: Vec<StructuralCheck>,
}

impl StructuralReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(StructuralCheck {
            name: name.into(),
            passed,
            detail,
        });
    }
}

fn with_extra(g: &Graph, extra_nodes: usize, extra: &[(usize, usize)]) -> Result<Graph> {
    let pairs: Vec<NodePair> = g
        .bonds()
        .into_iter()
        .chain(extra.iter().copied())
        .map(NodePair::from)
        .collect();
    build_graph(g.node_count() + extra_nodes, &pairs, g.is_directed())
}

fn is_subgraph(sub: &Graph, g: &Graph) -> bool {
    sub.node_count() == g.node_count()
        && sub.is_directed() == g.is_directed()
        && sub.edges().iter().all(|&(i, k)| g.edge_index(i, k).is_some())
}

fn is_tree_component(g: &Graph, node: usize) -> bool {
    if g.is_directed() {
        return false;
    }
    let comp = g.components();
    let nodes = comp.iter().filter(|&&c| c == comp[node]).count();
    let edges = g.edges().iter().filter(|&&(i, _)| comp[i] == comp[node]).count();
    edges == 2 * (nodes - 1)
}

/// Runs every applicable check for a converged `result` of `(source, target)`.
pub fn structural_checks(
    g: &Graph,
    source: usize,
    target: usize,
    result: &DistanceResult,
    cfg: &SolverConfig,
    options: &StructuralOptions,
) -> Result<StructuralReport> {
    let mut report = StructuralReport::default();
    if result.status != DistanceStatus::Converged {
        return Ok(report);
    }
    let tol = options.tolerance.unwrap_or(1e-6_f64.max(4.0 * cfg.tol));
    let value = result.value;

    report.push(
        "bracket",
        result.lower_bound - tol <= value && value <= result.upper_bound + tol,
        format!("{} <= {} <= {}", result.lower_bound, value, result.upper_bound),
    );
    let cert = &result.certificate;
    let gain = cert.f.0[target] - cert.f.0[source];
    report.push(
        "certificate",
        cert.norm <= 1.0 + ADMISSIBILITY_SLACK && gain >= value - tol,
        format!("norm {}, objective {}", cert.norm, gain),
    );

    for (idx, sub) in options.subgraphs.iter().enumerate() {
        let name = format!("subgraph_monotonicity[{idx}]");
        if !is_subgraph(sub, g) {
            report.push(name, false, "not a subgraph on the same nodes".into());
            continue;
        }
        let r = connes_distance(sub, source, target, cfg)?;
        let passed = r.status == DistanceStatus::Unreachable || value <= r.value + tol;
        report.push(name, passed, format!("{} <= {}", value, r.value));
    }

    if source != target && is_tree_component(g, source) {
        if let Some(d) = result.graph_distance {
            let expected = path_closed_form(d);
            report.push(
                "tree_closed_form",
                (value - expected).abs() <= tol,
                format!("{value} vs {expected} at distance {d}"),
            );
        }
    }

    let n = g.node_count();
    let hairs: Vec<(usize, usize)> = (0..n).map(|i| (i, n + i)).collect();
    let haired = with_extra(g, n, &hairs)?;
    let r = connes_distance(&haired, source, target, cfg)?;
    report.push(
        "pendant_extension",
        (r.value - value).abs() <= tol,
        format!("{} with pendants vs {}", r.value, value),
    );

    let auto = (value - tol).ceil() as i64 - 1;
    let length = options.shortcut_length.or((auto >= 1).then_some(auto as usize));
    if let Some(l) = length.filter(|&l| l >= 1 && (l as f64) < value) {
        let mut chain = vec![source];
        chain.extend(n..n + l - 1);
        chain.push(target);
        let extra: Vec<(usize, usize)> = chain.windows(2).map(|w| (w[0], w[1])).collect();
        let cut = with_extra(g, l - 1, &extra)?;
        let r = connes_distance(&cut, source, target, cfg)?;
        report.push(
            "shortcut",
            r.value <= l as f64 + tol,
            format!("{} after a shortcut of length {l}", r.value),
        );
    }
    Ok(report)
}
