use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_septensor"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn relerr(o: &Output) -> f64 {
    let s = stdout(o);
    let v = s.trim().rsplit("relerr=").next().unwrap();
    v.parse().unwrap()
}

#[test]
fn oversized_truncation_exits_with_config_error() {
    let o = run(&["decompose", "--K", "99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K exceeds min(m,n)"));
}

#[test]
fn ragged_table_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    fs::write(&path, "x\\y,0,1\n0,1,2\n1,3\n").unwrap();
    let o = run(&["decompose", "--tabulated", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn syntax_error_exits_with_config_error() {
    let o = run(&["decompose", "--function-expr", "x+*y"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_function_exits_with_dedicated_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["decompose", "--builtin", "zero", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn separable_builtin_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["decompose", "--builtin", "rank1-sep", "--m", "3", "--n", "3", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rank=1 "));
    assert!(relerr(&o) <= 1e-12);
    let points: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("points.json")).unwrap()).unwrap();
    assert_eq!(points["x_points"].as_array().unwrap().len(), 1);
    for name in ["F.csv", "svd.json", "phi_k.csv", "psi_k.csv", "diagnostics.json", "bounds.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn default_run_writes_rank_two_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "decompose", "--builtin", "paper-f", "--m", "10", "--n", "10", "--K", "2", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rank=2 "));
    let e = relerr(&o);
    assert!(e > 0.0 && e < 0.1);
}

#[test]
fn tabulated_input_runs_on_its_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let mut text = String::from("x\\y");
    let ys: Vec<f64> = (0..9).map(|j| j as f64 / 8.0).collect();
    for y in &ys {
        text.push_str(&format!(",{y}"));
    }
    text.push('\n');
    for i in 0..7 {
        let x = i as f64 / 6.0;
        text.push_str(&format!("{x}"));
        for y in &ys {
            text.push_str(&format!(",{}", (x + 1.0) * y.exp() + x * y));
        }
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "decompose", "--tabulated", path.to_str().unwrap(), "--m", "4", "--n", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("rank=2 "));
    assert!(relerr(&o) <= 1e-10);
}

#[test]
fn validate_passes_on_reference_function() {
    let o = run(&["validate", "--m", "6", "--n", "6", "--diag-grid", "201"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verbose_logs_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "decompose", "--m", "3", "--n", "3", "--verbose", "--diag-grid", "101", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("iter 1: pivot="));
}

#[test]
fn builtins_are_listed() {
    let o = run(&["builtins"]);
    let s = stdout(&o);
    for name in ["paper-f", "rank1-sep", "zero"] {
        assert!(s.lines().any(|l| l == name));
    }
}
