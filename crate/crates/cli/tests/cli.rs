use std::io::Write;
use std::process::{Command, Output};

use gfn_core::getzler::PolynomialPrepotential;
use serde_json::Value;

fn gfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfn"))
        .args(args)
        .env_remove("GFN_PRECISION")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = gfn(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn g_json_has_required_fields() {
    let v = json(&["--json", "g", "--model", "e6t", "--s", "1/2"]);
    for key in ["value", "precision_digits", "route", "model"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["precision_digits"], 64);
    assert_eq!(v["route"], "closed");
}

#[test]
fn routes_agree_through_the_cli() {
    let value = |route: &str| -> f64 {
        let v = json(&[
            "--json",
            "g",
            "--model",
            "e6t",
            "--s",
            "3/4",
            "--derivative",
            "--route",
            route,
        ]);
        v["value"].as_str().unwrap().parse().unwrap()
    };
    let closed = value("closed");
    for route in ["ring", "symmetric", "fd"] {
        assert!(
            (value(route) - closed).abs() < 1e-14 * closed.abs(),
            "{route}"
        );
    }
}

#[test]
fn precision_flag_and_env_are_honoured() {
    let v = json(&[
        "--json",
        "--precision",
        "40",
        "g",
        "--model",
        "e7t",
        "--s",
        "1/3",
    ]);
    assert_eq!(v["precision_digits"], 40);
    let o = Command::new(env!("CARGO_BIN_EXE_gfn"))
        .args(["--json", "g", "--model", "e7t", "--s", "1/3"])
        .env("GFN_PRECISION", "50")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision_digits"], 50);
}

#[test]
fn verify_output_is_deterministic() {
    let args = ["--json", "verify", "--suite", "getzler-a2", "--seed", "3"];
    assert_eq!(stdout(&gfn(&args)), stdout(&gfn(&args)));
}

#[test]
fn exit_codes() {
    assert_eq!(
        gfn(&["verify", "--suite", "anomalies"]).status.code(),
        Some(0)
    );
    assert_eq!(
        gfn(&["verify", "--suite", "e6-two-route", "--tol", "1e-200"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gfn(&["g", "--model", "e9t", "--s", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gfn(&["verify", "--suite", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gfn(&["--precision", "8", "g", "--s", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn csv_starts_with_header() {
    let out = stdout(&gfn(&["--csv", "verify", "--suite", "coxeter-table"]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("suite,check,value,reference,abs_err,tol,pass")
    );
    assert!(lines.all(|l| l.starts_with("coxeter-table,") && l.ends_with(",true")));
}

#[test]
fn getzler_reads_a_prepotential_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(PolynomialPrepotential::a2().to_json().unwrap().as_bytes())
        .unwrap();
    let path = file.path().to_str().unwrap();
    let residual = |g: &str| -> f64 {
        let v = json(&[
            "--json",
            "getzler",
            "--prepotential",
            path,
            "--g",
            g,
            "--points",
            "3",
        ]);
        assert_eq!(v["samples"].as_array().unwrap().len(), 3);
        v["max_residual"].as_str().unwrap().parse().unwrap()
    };
    assert!(residual("zero") < 1e-30);
    assert!(residual("t2") > 1e-6);
    let missing = gfn(&["getzler", "--prepotential", "/nonexistent/f.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn invert_round_trips() {
    let v = json(&["--json", "invert", "--model", "e8t", "--t", "0.2"]);
    let s = v["s"].as_str().unwrap().to_string();
    let back = json(&["--json", "g", "--model", "e8t", "--s", &s]);
    let t: f64 = back["t"].as_str().unwrap().parse().unwrap();
    assert!((t - 0.2).abs() < 1e-30);
}
