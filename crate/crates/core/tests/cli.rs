use std::path::{Path, PathBuf};
use std::process::Command;

use permlab::cli::{run, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use serde_json::Value;
use tempfile::TempDir;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("permlab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn uniform_text(n: usize) -> String {
    let row = vec![format!("1/{n}"); n].join(" ");
    format!("{n}\n{}\n", vec![row; n].join("\n"))
}

#[test]
fn permanent_reports_all_three_algorithms() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "j4.txt", &uniform_text(4));
    let (code, out) = call(&["permanent", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    for line in ["naive: 0.09375", "ryser: 0.09375", "laplace: 0.09375", "agree: true"] {
        assert!(out.contains(line), "{out}");
    }
    let (code, out) = call(&["--json", "permanent", "--exact", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "permanent");
    assert_eq!(v["results"]["permanents"]["ryser"], "3/32");
    assert_eq!(v["suite_pass"], true);
    assert!(v.get("timings").is_none());
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.txt", "2\n1 2\n");
    assert_eq!(call(&["permanent", bad.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(call(&["permanent", "/nonexistent/matrix.txt"]).0, EXIT_INPUT);
    assert_eq!(call(&["no-such-command"]).0, EXIT_INPUT);
    assert_eq!(call(&["verify", "--suite", "bogus"]).0, EXIT_INPUT);

    let not_ds = write(dir.path(), "nds.txt", "2\n1 1\n0 0\n");
    let (code, out) = call(&["gap-curve", not_ds.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("domain error"), "{out}");

    let too_big = write(dir.path(), "big.txt", "2\n3 0\n0 3\n");
    assert_eq!(call(&["dittert", "check", too_big.to_str().unwrap()]).0, EXIT_INPUT);
}

#[test]
fn help_is_not_an_error() {
    let (code, out) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("gap-curve"));
}

#[test]
fn gap_curve_csv_for_order_six() {
    let dir = TempDir::new().unwrap();
    let body = "6\n1/2 1/2 0 0 0 0\n0 1/2 1/2 0 0 0\n0 0 1/2 1/2 0 0\n0 0 0 1/2 1/2 0\n0 0 0 0 1/2 1/2\n1/2 0 0 0 0 1/2\n";
    let f = write(dir.path(), "circ.txt", body);
    let csv = dir.path().join("gap.csv");
    let (code, _) = call(&["gap-curve", f.to_str().unwrap(), "--n-points", "11", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,gap,f_value");
    assert_eq!(lines.len(), 12);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (t, g, f) = (cols[0], cols[1], cols[2]);
        assert!((g - t * (1.0 - t) * f).abs() < 1e-12, "{line}");
        // 17 significant digits in scientific notation.
        let mantissa = line.split(',').next().unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
    }

    let (code, out) = call(&["gap-curve", f.to_str().unwrap(), "--n-points", "3", "--exact"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().nth(2).unwrap().starts_with("1/2,"), "{out}");
}

#[test]
fn verify_is_byte_reproducible_and_writes_no_witness_on_success() {
    let dir = TempDir::new().unwrap();
    let args = ["--json", "verify", "--suite", "symf4", "--samples", "6", "--seed", "9", "--dump-dir", dir.path().to_str().unwrap()];
    let (c1, o1) = call(&args);
    let (c2, o2) = call(&args);
    assert_eq!(c1, EXIT_OK);
    assert_eq!(c2, EXIT_OK);
    assert_eq!(o1, o2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    let v: Value = serde_json::from_str(&o1).unwrap();
    assert_eq!(v["results"]["suites"][0]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn timings_are_opt_in() {
    let (code, out) = call(&["--json", "--timings", "verify", "--suite", "symf4", "--samples", "2"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["timings"].is_array());
}

#[test]
fn dittert_check_and_search() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "j4.txt", &uniform_text(4));
    let (code, out) = call(&["--json", "dittert", "check", "--exact", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["phi_report"]["phi"], "61/32");
    assert_eq!(v["results"]["fully_indecomposable"], true);

    let trace = dir.path().join("trace.csv");
    let args = ["dittert", "search", "--restarts", "4", "--seed", "5", "--trace", trace.to_str().unwrap()];
    let (code, first) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert!(first.contains("restarts within 1e-4 of J_4"));
    let t1 = std::fs::read_to_string(&trace).unwrap();
    assert!(t1.starts_with("restart,eval,value\n"));
    let (_, second) = call(&args);
    assert_eq!(first, second);
    assert_eq!(t1, std::fs::read_to_string(&trace).unwrap());
}

#[test]
fn table1_reports_mismatches_with_exit_one() {
    let (code, out) = call(&["table1", "--restarts", "2", "--max-evals", "2000"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.starts_with("interval\tpaper_alpha\tpaper_min\tfound_alpha\tfound_min\ttrue_gap_min"));
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_permlab");
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "j3.txt", &uniform_text(3));
    let ok = Command::new(exe).args(["permanent", f.to_str().unwrap()]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("ryser: 0.22222222222222"));
    let bad = Command::new(exe).args(["permanent", "/nonexistent"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
}
