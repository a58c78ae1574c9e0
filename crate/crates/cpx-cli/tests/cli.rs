//! End-to-end runs of the `cpx` binary: frozen basis tables, output
//! determinism, exit-code contract and the documented torus behaviours.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cpx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpx"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: (u32, u32), degree: u32, extra: &str) -> String {
    let text = format!(
        r#"{{
  "body": {{"a": {}, "b": {}}},
  "set": {{"kind": "torus", "r1": 1.0, "r2": 1.0, "m": 16}},
  "degree": {}{}
}}"#,
        body.0, body.1, degree, extra
    );
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn result_of(dir: &Path, file: &str) -> Value {
    let text = fs::read_to_string(dir.join(file)).unwrap();
    serde_json::from_str::<Value>(&text).unwrap()["result"].clone()
}

#[test]
fn basis_tables_match_known_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let cfg = write_config(dir, "c11.json", (1, 1), 2, "");
    let out = cpx(&["basis", "--config", &cfg, "--out", "o11"], dir);
    assert!(out.status.success(), "{out:?}");
    let r = result_of(&dir.join("o11"), "basis.json");
    assert_eq!(r["dimension"], 6);
    assert_eq!(r["degree_sum"], 8);
    assert_eq!(r["rows"].as_array().unwrap().len(), 6);

    let cfg = write_config(dir, "c23.json", (2, 3), 1, "");
    let out = cpx(&["basis", "--config", &cfg, "--out", "o23"], dir);
    assert!(out.status.success());
    let r = result_of(&dir.join("o23"), "basis.json");
    assert_eq!(r["dimension"], 7);

    let cfg = write_config(dir, "c0.json", (1, 1), 0, "");
    let out = cpx(&["basis", "--config", &cfg, "--out", "o0"], dir);
    assert!(out.status.success());
    let r = result_of(&dir.join("o0"), "basis.json");
    assert_eq!(r["dimension"], 1);
    let csv = fs::read_to_string(dir.join("o0/basis.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn outputs_are_byte_stable_modulo_timestamp() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = write_config(dir, "c.json", (1, 1), 3, r#", "directions": 4"#);
    for out in ["a", "b"] {
        let o = cpx(&["delta", "--config", &cfg, "--out", out], dir);
        assert!(o.status.success(), "{o:?}");
    }
    let strip = |name: &str| {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        text.lines()
            .filter(|l| !l.contains("timestamp_unix"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip("a/delta.json"), strip("b/delta.json"));
    for f in ["delta.csv", "delta_nodes.csv"] {
        assert_eq!(
            fs::read(dir.join("a").join(f)).unwrap(),
            fs::read(dir.join("b").join(f)).unwrap(),
            "{f} differs between runs"
        );
    }
}

#[test]
fn unit_torus_delta_directional_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = write_config(dir, "c.json", (1, 1), 4, r#", "directions": 4"#);
    let out = cpx(&["delta", "--config", &cfg, "--out", "o"], dir);
    assert!(out.status.success());
    let r = result_of(&dir.join("o"), "delta.json");
    let log_dir = r["directional"]["log_delta"].as_f64().unwrap();
    assert!(log_dir.abs() <= 0.1, "directional log delta {log_dir}");
    assert_eq!(r["all_converged"], true);
}

#[test]
fn unit_torus_robin_boundary_vanishes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = write_config(
        dir,
        "c.json",
        (1, 1),
        3,
        r#", "family": "chebyshev", "boundary_m": 8"#,
    );
    let out = cpx(&["robin", "--config", &cfg, "--out", "o"], dir);
    assert!(out.status.success());
    let r = result_of(&dir.join("o"), "robin.json");
    let max_abs = r["boundary"]["max_abs"].as_f64().unwrap();
    assert!(max_abs <= 0.1, "boundary envelope reaches {max_abs}");
    assert!(r["ladder"]["hat_value"].is_number());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    // non-coprime body
    let cfg = write_config(dir, "bad.json", (2, 4), 2, "");
    let out = cpx(&["basis", "--config", &cfg], dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"), "stderr: {err}");

    // family command without a family entry
    let cfg = write_config(dir, "nofam.json", (1, 1), 2, "");
    let out = cpx(&["extremal", "--config", &cfg], dir);
    assert_eq!(out.status.code(), Some(2));

    // missing --config entirely
    let out = cpx(&["basis"], dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_flag_turns_nonconvergence_into_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = dir.join("hard.json");
    fs::write(
        &cfg,
        r#"{
  "body": {"a": 1, "b": 1},
  "set": {"kind": "reinhardt", "profile": [[0.8, 0.9], [1.1, 1.25]], "m": 8},
  "degree": 2,
  "solver": {"tol": 1e-14, "max_iter": 1}
}"#,
    )
    .unwrap();
    let cfg = cfg.to_string_lossy().into_owned();

    let out = cpx(&["cheb", "--config", &cfg, "--out", "o"], dir);
    assert_eq!(out.status.code(), Some(0), "lenient run still writes data");
    let r = result_of(&dir.join("o"), "cheb.json");
    assert_eq!(r["all_converged"], false);

    let out = cpx(&["cheb", "--config", &cfg, "--out", "o", "--strict"], dir);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_suite_filter_runs_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = cpx(&["validate", "--suite", "c09", "--out", "v"], dir);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS] c09"), "stdout: {stdout}");
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("v/validate.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);

    // a config with a broken tolerance fails before any suite runs
    let cfg = write_config(dir, "broken.json", (1, 1), 2, r#", "solver": {"tol": 0.0, "max_iter": 10}"#);
    let out = cpx(&["validate", "--suite", "c09", "--config", &cfg], dir);
    assert_eq!(out.status.code(), Some(2));

    // an unmatched filter runs nothing and does not report success
    let out = cpx(&["validate", "--suite", "no-such-suite"], dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn point_cloud_paths_resolve_against_the_config_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let sub = dir.join("nested");
    fs::create_dir_all(&sub).unwrap();
    // 8 points on a coarse torus, written as re1,im1,re2,im2
    let mut cloud = String::new();
    for i in 0..8 {
        let phi = std::f64::consts::TAU * i as f64 / 8.0;
        cloud.push_str(&format!("{},{},{},{}\n", phi.cos(), phi.sin(), (2.0 * phi).cos(), (2.0 * phi).sin()));
    }
    fs::write(sub.join("cloud.csv"), cloud).unwrap();
    fs::write(
        sub.join("c.json"),
        r#"{
  "body": {"a": 1, "b": 1},
  "set": {"kind": "point_cloud", "path": "cloud.csv"},
  "degree": 1
}"#,
    )
    .unwrap();
    let cfg = sub.join("c.json").to_string_lossy().into_owned();
    let out = cpx(&["fekete", "--config", &cfg, "--out", "o"], dir);
    assert!(out.status.success(), "{out:?}");
    let r = result_of(&dir.join("o"), "fekete.json");
    assert_eq!(r["candidates"], 8);
    assert_eq!(r["basis_size"], 3);
}
