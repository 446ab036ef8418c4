use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn connes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_connes")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SQUARE: &str = "directed false\nedge x1 x2\nedge x2 x3\nedge x3 x4\nedge x4 x1\n";

#[test]
fn square_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "square.txt", SQUARE);
    let out = connes(&["dist", &file, "x1", "x3", "--certificate"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["graph"]["n"], 4);
    assert_eq!(report["graph"]["edges"], 4);
    assert_eq!(report["graph"]["v_max"], 2);
    let r = &report["result"];
    assert!((r["value"].as_f64().unwrap() - 1.414214).abs() < 1e-6);
    assert_eq!(r["status"], "CONVERGED");
    assert_eq!(r["graph_distance"], 2);
    assert_eq!(r["certificate"].as_array().unwrap().len(), 4);

    let text = String::from_utf8(out.stdout).unwrap();
    let order = ["schema_version", "command", "graph", "result", "timing", "diagnostics"];
    let positions: Vec<usize> = order.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn certificate_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "square.txt", SQUARE);
    let report = json(&connes(&["dist", &file, "x1", "x2"]));
    assert!(report["result"].get("certificate").is_none());
}

#[test]
fn same_node_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "square.txt", SQUARE);
    let out = connes(&["dist", &file, "x2", "x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["value"], 0.0);
}

#[test]
fn disconnected_pair_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "split.txt", "directed false\nedge a b\nedge c d\n");
    let out = connes(&["dist", &file, "a", "d"]);
    assert_eq!(out.status.code(), Some(2));
    let r = &json(&out)["result"];
    assert_eq!(r["status"], "UNREACHABLE");
    assert!(r["value"].is_null());
    assert!(r["graph_distance"].is_null());
}

#[test]
fn parse_error_exits_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "directed false\nedge a b\nedge c\n");
    let out = connes(&["dist", &file, "a", "b"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(connes(&["bogus"]).status.code(), Some(1));
    assert_eq!(connes(&["dist"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "square.txt", SQUARE);
    assert_eq!(connes(&["dist", &file, "x1", "nowhere"]).status.code(), Some(1));
    assert_eq!(connes(&["dist", &file, "x1", "x3", "--tol", "-1"]).status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "path.txt", "directed false\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\n");
    let out = connes(&["dist", &file, "0", "4", "--max-iterations", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["result"]["status"], "BOUND_ONLY");
}

#[test]
fn generated_tree_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tree.txt");
    let file = file.to_str().unwrap();
    let out = connes(&["gen", "binary-tree", "3", "--out", file]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["graph"]["n"], 15);

    let printed = connes(&["gen", "binary-tree", "3"]);
    assert_eq!(printed.stdout, std::fs::read(file).unwrap());

    let first = json(&connes(&["dist", file, "7", "14"]));
    let second = json(&connes(&["dist", file, "7", "14"]));
    assert_eq!(first["result"], second["result"]);
    assert_eq!(first["graph"]["n"], 15);
    assert_eq!(first["graph"]["edges"], 14);
    assert!((first["result"]["value"].as_f64().unwrap() - 18f64.sqrt()).abs() < 1e-6);
}

#[test]
fn tree_adjacency_norm() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tree8.txt");
    let file = file.to_str().unwrap();
    assert_eq!(connes(&["gen", "binary-tree", "8", "-o", file]).status.code(), Some(0));
    let out = connes(&["norm", file, "--operator", "adjacency"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let v = r["value"].as_f64().unwrap();
    assert!((2.0..=2.8285).contains(&v), "{v}");
    let bounds = r["adjacency_bounds"].as_array().unwrap();
    assert!(bounds[0].as_f64().unwrap() <= v && v <= bounds[1].as_f64().unwrap());
}

#[test]
fn verify_random_graph() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("random.txt");
    let file = file.to_str().unwrap();
    let gen = connes(&["gen", "random", "10", "0.35", "--seed", "7", "-o", file]);
    assert_eq!(gen.status.code(), Some(0));
    let out = connes(&["verify", file]);
    let report = json(&out);
    assert_eq!(out.status.code(), Some(0), "{report:#}");
    assert_eq!(report["result"]["all_passed"], true);
    let names: Vec<&str> = report["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in ["coboundary_laplacian", "grading_anticommutes", "commutator_norm", "cycle_space"] {
        assert!(names.contains(&expected), "{names:?}");
    }
}

#[test]
fn matrix_reports_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "square.txt", SQUARE);
    let out = connes(&["matrix", &file]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let values = r["values"].as_array().unwrap();
    assert_eq!(values.len(), 4);
    assert_eq!(values[0][0], 0.0);
    assert_eq!(values[0][2], values[2][0]);

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_connes"))
        .args(["matrix", &file, "--jsonl"])
        .env("CONNES_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[2]["from"], "x1");
    assert_eq!(lines[2]["to"], "x3");
    assert_eq!(lines[2]["value"], values[0][2]);
}
