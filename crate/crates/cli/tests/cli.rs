//! End-to-end runs of the `nrc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn nrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrc"))
        .args(args)
        .env("NRC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nrc(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn symbol_of_order_two() {
    let v = json(&["symbol", "--a", "0.5", "0", "--order", "2"]);
    assert_eq!(v["map"], "(0.8 - z)/(1 - 0.8z)");
    let m = &v["multiplier"];
    assert!((m[0].as_f64().unwrap() + 1.0).abs() < 1e-15 && m[1].as_f64().unwrap().abs() < 1e-15);
    assert!(v["order_residual"].as_f64().unwrap() < 1e-14);
}

#[test]
fn closed_form_ellipse_vertices() {
    let rows = csv_rows(&stdout(&["closedform", "--a", "0.5", "0", "--order", "2", "--angles", "4"]));
    assert_eq!(rows.len(), 4);
    let near = |x: f64, y: f64| rows.iter().any(|r| (r[2] - x).abs() < 1e-14 && (r[3] - y).abs() < 1e-14);
    assert!(near(5.0 / 3.0, 0.0) && near(0.0, 4.0 / 3.0));
}

#[test]
fn sextic_coefficients_at_unit_constant() {
    let v = json(&["curve", "--L", "1", "--emit", "sextic"]);
    assert_eq!(v["coefficients"]["P"].as_f64(), Some(0.578125));
    assert_eq!(v["coefficients"]["Q"].as_f64(), Some(0.421875));
    let v = json(&["closedform", "--order", "3", "--emit", "sextic"]);
    let c = &v["coefficients"];
    assert!((c["P"].as_f64().unwrap() + c["Q"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn curve_report_runs_structural_checks() {
    let v = json(&["curve", "--L", "2"]);
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["foci"]["values"].as_array().unwrap().len(), 6);
    assert_eq!(v["singularities"]["kappa_detected"], 9);
    assert!(v["printed_point"]["value"].as_f64().unwrap().abs() > 1e-3);
    assert!(v["quarter_turn_point"]["value"].as_f64().unwrap().abs() < 1e-12);
    let rows = csv_rows(&stdout(&["curve", "--L", "2", "--format", "csv", "--angles", "6"]));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].len(), 3);
}

#[test]
fn matrix_export_layout() {
    let v = json(&["matrix", "--a", "0.3", "0.1", "--order", "3", "--n", "6"]);
    assert_eq!(v["n"], 6);
    assert_eq!(v["basis"], "monomial");
    assert_eq!(v["entries"].as_array().unwrap().len(), 36);
    assert_eq!(v["symbol"]["p"], 3);
    // Column 0 holds the constant function 1.
    assert_eq!(v["entries"][0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn range_and_compare() {
    let rows = csv_rows(&stdout(&["range", "--order", "3", "--n", "48", "--angles", "12"]));
    assert_eq!(rows.len(), 12);
    let v = json(&["compare", "--order", "3", "--n", "48", "--angles", "36"]);
    assert_eq!(v["monotonicity_ok"], true);
    assert!(v["upper_bound_excess"].as_f64().unwrap() <= 1e-9);
    let v = json(&["compare", "--order", "4", "--n", "32", "--angles", "40"]);
    assert!(v["hausdorff"].is_null());
    assert!(v["symmetry_defect"].as_f64().unwrap() < 1e-1);
}

#[test]
fn check_suites_report_json() {
    for suite in ["observations", "identities", "order2", "order3"] {
        let v = json(&["check", suite, "--trials", "40", "--angles", "36", "--seed", "3"]);
        assert_eq!(v["pass"], true, "{suite}: {v}");
        assert_eq!(v["seed"], 3);
        for key in ["suite", "trials", "worst_value", "bound"] {
            assert!(v.get(key).is_some(), "{suite} misses {key}");
        }
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["symbol", "--a", "0.5"],
        &["symbol", "--a", "1.5", "0"],
        &["range", "--n", "1"],
        &["check", "order3", "--trials", "0"],
        &["closedform", "--order", "4"],
        &["closedform", "--order", "2", "--emit", "sextic"],
        &["compare", "--order", "3", "--angles", "10"],
        &["curve", "--L", "0.5"],
        &["symbol", "--format", "svg"],
        &["symbol", "--a", "0", "0", "--order", "1"],
    ] {
        let out = nrc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_nrc"))
        .args(["symbol"])
        .env("NRC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_plot_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,oops\n2,3\n").unwrap();
    let out = nrc(&["plot", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.csv");
    assert_eq!(nrc(&["plot", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
}

fn polygon(svg: &str, id: &str) -> Vec<(f64, f64)> {
    let start = svg.find(&format!("id=\"{id}\"")).unwrap();
    let rest = &svg[start..];
    let p = rest.find("points=\"").unwrap() + 8;
    let body = &rest[p..p + rest[p..].find('"').unwrap()];
    body.split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn plot_keeps_every_csv_digit() {
    let dir = tempfile::tempdir().unwrap();
    let numeric = dir.path().join("numeric.csv");
    let closed = dir.path().join("closed.csv");
    let svg = dir.path().join("figure.svg");
    let path = |p: &Path| p.to_str().unwrap().to_owned();
    stdout(&["range", "--order", "3", "--n", "32", "--angles", "24", "--out", &path(&numeric)]);
    stdout(&["closedform", "--order", "3", "--angles", "24", "--out", &path(&closed)]);
    stdout(&["plot", "--order", "3", "--input", &path(&numeric), "--overlay", &path(&closed), "--out", &path(&svg)]);
    let text = std::fs::read_to_string(&svg).unwrap();
    for (id, file) in [("numeric", &numeric), ("closed-form", &closed)] {
        let want: Vec<(f64, f64)> = csv_rows(&std::fs::read_to_string(file).unwrap()).iter().map(|r| (r[2], r[3])).collect();
        assert_eq!(polygon(&text, id), want, "{id}");
    }
    assert_eq!(text.matches("class=\"focus\"").count(), 3);
}

#[test]
fn output_file_is_replaced_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sym.json");
    std::fs::write(&out, "stale contents that are longer than nothing").unwrap();
    stdout(&["symbol", "--out", out.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["p"], 2);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["check", "observations", "--trials", "300", "--seed", "9", "--a", "0.2", "0.6"][..],
        &["range", "--order", "4", "--n", "40", "--angles", "16"],
    ] {
        let a = nrc(args);
        let b = Command::new(env!("CARGO_BIN_EXE_nrc")).args(args).env("NRC_THREADS", "3").output().unwrap();
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
