//! Exit-code and output-shape tests for the command-line interface:
//! 0 on success, 1 on verification failure, 2 on input errors.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kacward::isoradial::square_patch;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_kacward")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kacward-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn square3_file(dir: &Path) -> PathBuf {
    let path = dir.join("square-3.graph");
    square_patch(3).to_graph_file().write_path(&path).unwrap();
    path
}

#[test]
fn validate_reports_counts_and_exits_zero() {
    let dir = tmp_dir();
    let path = square3_file(&dir);
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("24 edges, max degree 4"), "got: {stdout}");
    assert!(stdout.contains("dual: 9 vertices"));
}

#[test]
fn validate_names_the_crossing_pair() {
    let dir = tmp_dir();
    let path = dir.join("crossing.graph");
    std::fs::write(
        &path,
        "vertices\n0 0 0\n1 1 0\n2 0 1\n3 1 1\nedges\n0 3\n1 2\n0 1\n2 3\n",
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cross"), "got: {stderr}");
    assert!(
        stderr.contains("(0, 3)") && stderr.contains("(1, 2)"),
        "got: {stderr}"
    );
}

#[test]
fn validate_need_dual_fails_without_dual_section() {
    let dir = tmp_dir();
    let path = dir.join("no-dual.graph");
    std::fs::write(
        &path,
        "vertices\n0 0 0\n1 1 0\n2 1 1\n3 0 1\nedges\n0 1\n1 2\n2 3\n3 0\nfaces\n0 1 2 3\n",
    )
    .unwrap();
    assert_eq!(
        run(&["validate", path.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let out = run(&["validate", path.to_str().unwrap(), "--need-dual"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_missing_file_is_an_input_error() {
    let out = run(&["validate", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_zero_trials_is_a_vacuous_pass() {
    let dir = tmp_dir();
    let path = square3_file(&dir);
    let out = run(&["verify", path.to_str().unwrap(), "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("warning"), "got: {stdout}");
}

#[test]
fn verify_oversized_graph_skips_brute_force_checks() {
    let dir = tmp_dir();
    let path = dir.join("square-6.graph");
    square_patch(6).to_graph_file().write_path(&path).unwrap(); // 49 vertices
    let out = run(&[
        "verify",
        path.to_str().unwrap(),
        "--trials",
        "2",
        "--seed",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("skipping partition identities"),
        "got: {stdout}"
    );
    assert!(stdout.contains("operator norm closed form"));
}

#[test]
fn verify_impossible_tolerance_exits_one() {
    let dir = tmp_dir();
    let path = square3_file(&dir);
    let out = run(&[
        "verify",
        path.to_str().unwrap(),
        "--trials",
        "2",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("verification failed"), "got: {stderr}");
}

#[test]
fn scan_regimes_without_graph_yields_membership_only() {
    let out = run(&[
        "scan-regimes",
        "--m",
        "1",
        "--M",
        "1",
        "--re",
        "0.5:0.5:1",
        "--im",
        "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "re_beta,im_beta,in_high,in_low,l_high,l_low,cert_bound,rho_exact"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("0.5,0,true,false,"), "got: {row}");
    assert!(row.ends_with(",,"), "cert and rho must be blank: {row}");
}

#[test]
fn scan_regimes_membership_flips_at_the_boundary() {
    let out = run(&[
        "scan-regimes",
        "--m",
        "1",
        "--M",
        "1",
        "--re",
        "0.9:1.1:3",
        "--im",
        "0:0:1",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].contains(",true,false,"));
    assert!(rows[1].contains(",false,false,")); // Re beta = 1: on neither side
    assert!(rows[2].contains(",false,true,"));
}

#[test]
fn scan_certified_bound_crosses_one_at_the_self_dual_point() {
    let dir = tmp_dir();
    let path = square3_file(&dir);
    let m = format!("{}", (2.0f64.sqrt() - 1.0).atanh());
    let out = run(&[
        "scan-regimes",
        "--m",
        &m,
        "--M",
        &m,
        "--re",
        "0.9:1.1:3",
        "--im",
        "0:0:1",
        "--graph",
        path.to_str().unwrap(),
        "--couplings",
        "zinvariant",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let cert_of = |row: &str| -> f64 { row.split(',').nth(6).unwrap().parse().unwrap() };
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert!(
        cert_of(rows[0]) < 1.0,
        "below the self-dual point: {}",
        rows[0]
    );
    assert!(
        (cert_of(rows[1]) - 1.0).abs() < 1e-9,
        "at the self-dual point: {}",
        rows[1]
    );
    assert!(
        cert_of(rows[2]) > 1.0,
        "above the self-dual point: {}",
        rows[2]
    );
}

#[test]
fn scan_regimes_empty_grid_yields_header_only() {
    let out = run(&[
        "scan-regimes",
        "--m",
        "1",
        "--M",
        "1",
        "--re",
        "0:1:0",
        "--im",
        "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
}

#[test]
fn free_energy_emits_rows_per_method_with_status() {
    let out = run(&[
        "free-energy",
        "--graph-family",
        "square",
        "--n-max",
        "2",
        "--bc",
        "free",
        "--couplings",
        "zinvariant",
        "--re",
        "0.5:0.5:1",
        "--im",
        "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].ends_with("boundary_ratio,status"));
    // Two patches, one beta, three methods each.
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn free_energy_flags_out_of_regime_series_points() {
    // beta = 2 with the self-dual coupling puts the degree-4 vertices of
    // the 2x2 patch far outside the contractive regime.
    let out = run(&[
        "free-energy",
        "--graph-family",
        "square",
        "--n-max",
        "2",
        "--couplings",
        "zinvariant",
        "--re",
        "2:2:1",
        "--im",
        "0.4:0.4:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout
            .lines()
            .any(|l| l.starts_with("square-2") && l.contains("not-in-regime")),
        "got: {stdout}"
    );
}

#[test]
fn free_energy_plus_bc_exercises_the_dual() {
    let out = run(&[
        "free-energy",
        "--graph-family",
        "square",
        "--n-max",
        "3",
        "--bc",
        "plus",
        "--couplings",
        "zinvariant",
        "--re",
        "1.4:1.4:1",
        "--im",
        "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    // square-1 has no interior, so only the larger patches emit rows.
    assert!(!stdout.contains("square-1"));
    assert!(stdout.contains("square-2") && stdout.contains("square-3"));
    let brute: Vec<&str> = stdout.lines().filter(|l| l.contains(",brute,")).collect();
    let series: Vec<&str> = stdout
        .lines()
        .filter(|l| l.contains(",trace-series,"))
        .collect();
    assert!(!brute.is_empty() && !series.is_empty());
}

#[test]
fn free_energy_bad_family_is_an_input_error() {
    let out = run(&[
        "free-energy",
        "--graph-family",
        "penrose",
        "--re",
        "0.5:0.5:1",
        "--im",
        "0:0:1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn meta_sidecar_written_next_to_output() {
    let dir = tmp_dir();
    let out_path = dir.join("scan.csv");
    let out = run(&[
        "scan-regimes",
        "--m",
        "1",
        "--M",
        "1",
        "--re",
        "0.5:0.5:1",
        "--im",
        "0:0:1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let meta_path = dir.join("scan.csv.meta.json");
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(meta_path).unwrap()).unwrap();
    assert_eq!(meta["command"], "scan-regimes");
    assert_eq!(meta["rows"], 1);
}
