use std::process::Command;

use revlb_cli::{ConvergenceRecord, ExperimentConfig};

fn revlb(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_revlb")).args(args).output().expect("binary runs")
}

#[test]
fn printed_config_parses_back() {
    let out = revlb(&["converge", "square-toroid", "--alpha", "-0.75", "--ntheta", "8,16", "--print-config"]);
    assert!(out.status.success());
    let cfg = ExperimentConfig::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.rhs.alpha, -0.75);
    assert_eq!(cfg.discretization.ntheta, vec![8, 16]);
}

#[test]
fn config_file_with_unknown_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[solver]\nkernal = \"poisson\"\n").unwrap();
    let out = revlb(&["lb-solve", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn bad_kernel_fails() {
    assert!(!revlb(&["ode-solve", "--kernel", "helmholtz"]).status.success());
}

#[test]
fn square_toroid_sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sq.csv");
    let json = dir.path().join("sq.json");
    let out = revlb(&[
        "converge",
        "square-toroid",
        "--alpha=-0.5",
        "--refine-depth",
        "1,2,3,4",
        "--out",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = ConvergenceRecord::read_csv("sq", std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rec.rows.len(), 4);
    assert!(rec.rows.windows(2).all(|w| w[1].error < w[0].error));
    let parsed: ConvergenceRecord = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed.rows, rec.rows);
    assert!(String::from_utf8_lossy(&out.stderr).contains("order 0.5"));
}

#[test]
fn hodge_reports_small_residual() {
    let out = revlb(&["hodge", "--rhs", "paper-test"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let row = rd.records().next().unwrap().unwrap();
    let residual: f64 = row[3].parse().unwrap();
    assert!(residual < 1e-13);
}

#[test]
fn lb_solve_reports_torus_error() {
    let out = revlb(&["lb-solve", "--ntheta", "32", "--panels", "4"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("relative L2 error"), "{err}");
    let lines = String::from_utf8(out.stdout).unwrap().lines().count();
    assert_eq!(lines, 1 + 32 * 64);
}

#[test]
fn ode_solve_prints_nodes() {
    let out = revlb(&["ode-solve", "--panels", "4", "--solver", "dense"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("s,u,du"));
    assert_eq!(text.lines().count(), 1 + 64);
}
