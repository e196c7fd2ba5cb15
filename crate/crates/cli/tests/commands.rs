use std::fs;
use std::path::Path;
use std::process::Command;

use leastgrad_cli::output::{DensityReport, DualReport, PlanJson, SbvReport, SolutionJson, SolveReport, SuiteReport};
use serde::de::DeserializeOwned;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leastgrad"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn read<T: DeserializeOwned>(p: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["leastgrad"];
    full.extend_from_slice(args);
    leastgrad_cli::run(full)
}

#[test]
fn sharp_solve_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sharp.json", r#"{"preset": "sharp"}"#);
    let out = dir.path().join("out");
    let status = bin()
        .args(["solve", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: SolveReport = read(&out.join("report.json"));
    assert!((report.cost - 2.0).abs() < 1e-12);
    assert!((report.total_variation - 2.0).abs() < 1e-9);
    assert_eq!(report.faces, 2);
    assert_eq!(report.crossings, 0);
    let plan: PlanJson = read(&out.join("plan.json"));
    assert!((plan.cost - 2.0).abs() < 1e-12);
    let sol: SolutionJson = read(&out.join("solution.json"));
    assert_eq!(sol.faces.len(), 2);
    let svg = fs::read_to_string(out.join("solution.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="face""#).count(), 2);
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ not json");
    let out = dir.path().join("out");
    let o = bin()
        .args(["solve", "--config", &cfg, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed config"));

    let cfg = write_config(dir.path(), "range.json", r#"{"preset": "sharp", "grid": 3}"#);
    assert_eq!(run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
    let cfg = write_config(dir.path(), "unknown.json", r#"{"preset": "nope"}"#);
    assert_eq!(run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
    assert_eq!(run(&["solve", "--out", out.to_str().unwrap()]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"preset": "cos2theta", "n_diffuse": 24, "grid": 48}"#);
    let mut dumps = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = out.to_str().unwrap();
        assert_eq!(run(&["solve", "--config", &cfg, "--out", o]), 0);
        assert_eq!(run(&["dual", "--config", &cfg, "--out", o]), 0);
        let mut files: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        dumps.push(files.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    assert!(!dumps[0].is_empty());
    assert_eq!(dumps[0], dumps[1]);
}

#[test]
fn monotone_check_reports_missing_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "top.json", r#"{"preset": "square-top-edge"}"#);
    let out = dir.path().join("out");
    let o = bin()
        .args(["check", "monotone", "--config", &cfg, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no least gradient solution: boundary mass 2.0 on edge l1"), "{err}");
    assert!(out.join("report.json").exists());

    let cfg = write_config(dir.path(), "lin.json", r#"{"preset": "square-linear"}"#);
    assert_eq!(run(&["check", "monotone", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
}

#[test]
fn dual_density_and_sbv_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g2.json",
        r#"{"preset": "brothers-g2", "n_diffuse": 48, "grid": 96, "nodes": 721}"#,
    );
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["dual", "--config", &cfg, "--out", o]), 0);
    let dual: DualReport = read(&out.join("report.json"));
    assert!(dual.duality_gap <= 1e-10 * dual.cost.max(1.0));
    assert!(dual.max_norm <= 2f64.sqrt() + 1e-9);
    assert!(dual.flagged_cells * 10 < 96 * 96);
    let csv = fs::read_to_string(out.join("z.csv")).unwrap();
    assert!(csv.starts_with("x,y,zx,zy\n"));

    assert_eq!(run(&["density", "--config", &cfg, "--out", o]), 0);
    let dens: DensityReport = read(&out.join("report.json"));
    assert!(dens.mass_defect <= 1e-9 * dens.cost);
    assert!(dens.norms.linf.is_finite());

    assert_eq!(run(&["sbv", "--config", &cfg, "--out", o]), 0);
    let sbv: SbvReport = read(&out.join("report.json"));
    assert!((sbv.fragment_sum - sbv.cost).abs() < 1e-9);
    assert!((sbv.fragments.g1 - 4.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn constant_datum_solves_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k.json",
        r#"{"domain": {"kind": "disc", "center": [0, 0], "radius": 1}, "datum": {"kind": "constant", "value": 3}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let report: SolveReport = read(&out.join("report.json"));
    assert_eq!(report.cost, 0.0);
    assert_eq!(report.faces, 1);
}

#[test]
fn small_suite_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", r#"{"suite_count": 12, "grid": 32}"#);
    let out = dir.path().join("out");
    assert_eq!(
        run(&["suite", "--config", &cfg, "--seed", "3", "--out", out.to_str().unwrap()]),
        0
    );
    let r: SuiteReport = read(&out.join("report.json"));
    assert_eq!(r.instances, 12);
    assert_eq!(r.total_crossings, 0);
    assert_eq!(r.tv_bound_violations, 0);
    assert!(r.max_relative_gap < 1e-10);
}
