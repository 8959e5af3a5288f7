use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consensus-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_dir(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn missing_graph_file_is_an_input_error() {
    let out = run(&["simulate", "--graph", "/definitely/missing/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn scenario_with_missing_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(
        &cfg,
        "graph-path = \"nope.txt\"\nkp = 1.0\nkd = 1.0\ntau_bar = 0.05\nhorizon = 5.0\nseed = 1\ninitial-state = \"random:1\"\n",
    )
    .unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_outputs_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.txt"),
        consensus_lab::Graph::path(4).unwrap().to_text(),
    )
    .unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(
        &cfg,
        "graph-path = \"g.txt\"\nkp = 1.0\nkd = 1.0\ntau_bar = 0.1\nhorizon = 30.0\nseed = 3\n\
         initial-state = { x = [1, 2, 3, 4], v = [0, 0, 0, 0] }\noutput-step = 0.1\n",
    )
    .unwrap();
    let files = [
        "trajectory.csv",
        "metrics.csv",
        "schedule.csv",
        "positions.svg",
        "velocities.svg",
        "sampled_positions.svg",
        "sampled_velocities.svg",
    ];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out_dir(d),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("final position disagreement"));
        assert!(stdout.contains("gamma_hat"));
    }
    for f in files {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn consensus_start_reports_zero_disagreement() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--consensus-at",
        "2.5",
        "--horizon",
        "10",
        "--out-dir",
        out_dir(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let spread: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("final position disagreement: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(spread < 1e-12, "{spread}");
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let feasible = run(&[
        "certify",
        "--kp",
        "1",
        "--kd",
        "1",
        "--tau-bar",
        "0.05",
        "--lambda-bar",
        "0.5",
        "--out-dir",
        out_dir(dir.path()),
    ]);
    assert_eq!(feasible.status.code(), Some(0));
    assert!(dir.path().join("certificate.toml").exists());
    assert!(fs::read_to_string(dir.path().join("report.txt"))
        .unwrap()
        .contains("re-verification: passed"));

    let none_dir = tempfile::tempdir().unwrap();
    let none = run(&[
        "certify",
        "--kp",
        "1",
        "--kd",
        "1",
        "--tau-bar",
        "10",
        "--lambda-bar",
        "0.99",
        "--out-dir",
        out_dir(none_dir.path()),
    ]);
    assert_eq!(none.status.code(), Some(1));
    assert!(!none_dir.path().join("certificate.toml").exists());

    let bad = run(&["certify", "--tau-bar", "0.05", "--lambda-bar", "1.2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sweep_default_grid_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let out = run(&["sweep", "--bisect-tol", "0.01", "--out-dir", out_dir(d)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let csv = fs::read_to_string(a.path().join("region.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.starts_with("lambda_bar,tau_star,margin,fragile\n"));
    for f in ["region.csv", "region.svg"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn graph_gen_writes_a_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let out = run(&[
        "graph-gen",
        "--n",
        "9",
        "--edge-prob",
        "0.2",
        "--seed",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let g = consensus_lab::Graph::load(&path).unwrap();
    assert_eq!(g.n(), 9);
    assert!(consensus_lab::graph::is_connected(&g));
}
