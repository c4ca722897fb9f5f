//! Exit-code contract and output determinism of the command-line
//! interface.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_slgreen")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn slgreen")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

#[test]
fn analyze_constant_field_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("const11.cfg");
    write(&cfg, "kind=constant\nr0=1\nq0=1\n");
    let out = run(&[
        "analyze",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "10",
        "--samples",
        "101",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"solvable\": \"Yes\""));
    assert!(text.contains("\"compact\": \"No\""));
    // report files land in the output directory
    assert!(dir.path().join("out/report.json").exists());
    let aux = std::fs::read_to_string(dir.path().join("out/aux_profile.csv")).unwrap();
    assert!(aux.starts_with("x,d1,d2,phi,psi,h,d,s,mu,dtilde"));
    let fss = std::fs::read_to_string(dir.path().join("out/fss.csv")).unwrap();
    assert!(fss.starts_with("x,log_v,log_u,rho,rv_prime,ru_prime"));
}

#[test]
fn analyze_missing_spec_exits_one() {
    let out = run(&["analyze", "--spec", "/nonexistent/missing.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_zero_mass_field_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("zero.csv"),
        "x,r,q\n-4,1,0\n0,1,0\n4,1,0\n",
    );
    let cfg = dir.path().join("zero.cfg");
    write(&cfg, "kind=tabulated\ntable=zero.csv\n");
    let out = run(&[
        "analyze",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "3",
        "--samples",
        "31",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn identical_configs_give_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    write(&cfg, "kind=exponential\nalpha=0.5\nbeta=0.5\n");
    let args = [
        "analyze",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "6",
        "--samples",
        "61",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn table_single_compact_cell() {
    let out = run(&[
        "table",
        "--alphas",
        "1",
        "--betas",
        "1",
        "--window",
        "12",
        "--samples",
        "121",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"all_match\": true"));
}

#[test]
fn table_empty_alpha_list_is_a_usage_error() {
    let out = run(&["table", "--alphas", "", "--betas", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn covering_emits_the_arithmetic_chain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("const11.cfg");
    write(&cfg, "kind=constant\nr0=1\nq0=1\n");
    let out = run(&[
        "covering",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "2",
        "--samples",
        "21",
        "--x",
        "0",
        "--kind",
        "d",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,lo,hi,center,half_width"));
    // segments of width 1/2 chained exactly
    let first = lines.next().unwrap();
    let fields: Vec<f64> = first
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((fields[1] - fields[0] - 0.5).abs() < 1e-6);
}

#[test]
fn spectrum_reports_top_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("const11.cfg");
    write(&cfg, "kind=constant\nr0=1\nq0=1\n");
    let out = run(&[
        "spectrum",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "10",
        "--samples",
        "101",
        "--n",
        "64",
        "--top",
        "5",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lambda_max"));
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn verify_passes_on_the_flat_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("const11.cfg");
    write(&cfg, "kind=constant\nr0=1\nq0=1\n");
    let out = run(&[
        "verify",
        "--spec",
        cfg.to_str().unwrap(),
        "--window",
        "8",
        "--samples",
        "101",
        "--n",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("checks passed"));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["analyze", "--badflag"]);
    assert_eq!(out.status.code(), Some(1));
}
