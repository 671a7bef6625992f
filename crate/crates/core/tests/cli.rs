use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hardylab"));
    c.env("HARDYLAB_THREADS", "2");
    c
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, text) = run(args);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let (code, r) = report(&["verify", "harmonic", "--space", "half-line-dirichlet", "--profile", "identity"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["pass"], true);
    assert_eq!(r["config"]["space"]["kind"], "half_line");
    let (code, _) = run(&["verify", "harmonic", "--space", "half-line-dirichlet", "--profile", "constant"]);
    assert_eq!(code, 1);
    let (code, _) = run(&["verify", "harmonic", "--profile", "identity"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["verify", "harmonic", "--space", "no-such-space"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["verify", "nonsense", "--space", "half-line-dirichlet"]);
    assert_eq!(code, 2);
}

#[test]
fn space_as_json_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let json = r#"{"kind":"half_line","params":{"alpha":2.0,"boundary":"neumann"}}"#;
    let path = write(dir.path(), "space.json", json);
    let (code, a) = report(&["verify", "conservative", "--space", json, "--profile", "constant"]);
    assert_eq!(code, 0);
    let (_, b) = report(&["verify", "conservative", "--space", &format!("@{path}"), "--profile", "constant"]);
    assert_eq!(a["config"]["space"], b["config"]["space"]);
}

#[test]
fn reports_are_deterministic_up_to_timestamps() {
    let strip = |mut v: Value| {
        v["timestamp"] = Value::Null;
        v["result"]["timestamp"] = Value::Null;
        v
    };
    let args = ["ap", "--profile", "identity", "--p", "2", "--seed", "7"];
    let (c1, a) = report(&args);
    let (c2, b) = report(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a["config"]["seed"], 7);
    assert_eq!(strip(a), strip(b));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let (code, stdout) = run(&["verify", "doubling", "--space", "half-space:3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["result"]["constants"]["doubling_constant"].as_f64().unwrap() <= 32.0);
}

#[test]
fn atomize_local() {
    let (code, r) = report(&["atomize", "--mode", "local", "--m", "0", "--K", "40"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["sum_abs"], "2199023255551/1099511627776");
    assert_eq!(r["result"]["residual_mass"], "1/1099511627776");
    assert_eq!(r["result"]["reconstruction_error"], "0");
    let (code, _) = run(&["atomize", "--mode", "local"]);
    assert_eq!(code, 2);
}

#[test]
fn atomize_beta_and_classical() {
    let dir = tempfile::tempdir().unwrap();
    let beta = write(
        dir.path(),
        "b.json",
        r#"{"flavor":"mu_h_beta","ball":{"center":"2","radius":"1"},"pieces":[{"from":"1","to":"2","value":"1/2"},{"from":"2","to":"3","value":"-3/10"}]}"#,
    );
    let (code, r) = report(&["atomize", "--mode", "beta", "--atom", &beta]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["taus"][0], "1/10");
    assert_eq!(r["result"]["taus"][1], "1/15");
    let n = r["result"]["coefficients"].as_array().unwrap().len();
    assert_eq!(r["result"]["coefficients"][n - 2], "1/15");
    assert_eq!(r["result"]["coefficients"][n - 1], "2/15");
    let classical = write(
        dir.path(),
        "c.json",
        r#"{"flavor":"classical_alpha1","ball":{"center":"9/8","radius":"1/8"},"pieces":[{"from":"1","to":"9/8","value":"4"},{"from":"9/8","to":"5/4","value":"-4"}]}"#,
    );
    let (code, r) = report(&["atomize", "--mode", "classical", "--atom", &classical]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["atoms_valid_after_normalization"], true);
    let wide = write(
        dir.path(),
        "w.json",
        r#"{"flavor":"classical_alpha1","ball":{"center":"3","radius":"2"},"pieces":[{"from":"1","to":"3","value":"1/4"},{"from":"3","to":"5","value":"-1/4"}]}"#,
    );
    let (code, _) = run(&["atomize", "--mode", "classical", "--atom", &wide]);
    assert_eq!(code, 2);
}

#[test]
fn bmo_of_profile_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv: String = std::iter::once("x,value".to_string()).chain((0..=20).map(|i| format!("{},{}", i as f64 * 0.5, i as f64 * 0.5))).collect::<Vec<_>>().join("\n");
    let g = write(dir.path(), "g.csv", &csv);
    let (code, r) = report(&["norm", "bmo", "--f", &g, "--profile", "identity"]);
    assert_eq!(code, 0);
    assert!(r["result"]["norm"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "x,value\n0,0\n1,oops\n2,2\n");
    let out = bin().args(["norm", "g", "--f", &g]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn pair_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let atom = write(
        dir.path(),
        "a.json",
        r#"{"flavor":"mu_h_beta","ball":{"center":"3/2","radius":"1/2"},"pieces":[{"from":"1","to":"3/2","value":"1/2"},{"from":"3/2","to":"2","value":"-5/14"}]}"#,
    );
    let csv: String = std::iter::once("x,value".to_string()).chain((0..=40).map(|i| format!("{},{}", i as f64 * 0.1, (i as f64 * 0.1).powi(2)))).collect::<Vec<_>>().join("\n");
    let g = write(dir.path(), "g.csv", &csv);
    let (code, r) = report(&["pair", "--atom", &atom, "--g", &g]);
    assert_eq!(code, 0);
    let (v, b) = (r["result"]["value"].as_f64().unwrap(), r["result"]["bound"].as_f64().unwrap());
    assert!(v.abs() <= b);
    // an oversized atom is rejected
    let big = write(
        dir.path(),
        "big.json",
        r#"{"flavor":"mu_h_beta","ball":{"center":"3/2","radius":"1/2"},"pieces":[{"from":"1","to":"3/2","value":"5"},{"from":"3/2","to":"2","value":"-25/7"}]}"#,
    );
    let (code, _) = run(&["pair", "--atom", &big, "--g", &g]);
    assert_eq!(code, 2);
}

#[test]
fn sample_kernel_csv() {
    let (code, text) = run(&["sample-kernel", "--space", "bessel:2", "--time-grid", "1", "--grid-points", "0.5,1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,y,value");
    assert_eq!(lines.len(), 5);
    // symmetric in x and y
    assert_eq!(lines[2].rsplit(',').next(), lines[3].rsplit(',').next());
}
