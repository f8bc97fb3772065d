use std::path::Path;
use std::process::{Command, Output};

use radshock_cli::ErrorRecord;
use radshock_core::gas::shock_from_amplitude;
use radshock_core::reduced::build_reduced;
use radshock_core::verify::expansion_coeffs;
use radshock_core::{GasConstants, GasState};
use serde_json::Value;

fn radshock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radshock"))
        .args(args)
        .env_remove("RADSHOCK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn stderr_record(o: &Output) -> ErrorRecord {
    let line = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("{e}: {line}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn profile_is_deterministic_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("one"), dir.path().join("two"));
    for d in [&d1, &d2] {
        let o = radshock(&["profile", "--out", s(d)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let p1 = std::fs::read(d1.join("profile.csv")).unwrap();
    assert_eq!(p1, std::fs::read(d2.join("profile.csv")).unwrap());

    let summary: Value = serde_json::from_slice(&std::fs::read(d1.join("summary.json")).unwrap()).unwrap();
    let o = radshock(&["verify", s(&d1.join("profile.csv"))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout_json(&o);
    assert_eq!(out["passed"], true);
    for key in ["integral", "ode", "q_cross"] {
        let orig = summary["verification"][key]["max"].as_f64().unwrap();
        let again = out["verification"][key]["max"].as_f64().unwrap();
        assert!((orig - again).abs() <= 1e-12, "{key}: {orig} vs {again}");
    }
}

#[test]
fn corrupted_profile_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = radshock(&["profile", "--gamma", "1.6667", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join("profile.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 3;
    let mut cols: Vec<String> = lines[mid].split(',').map(String::from).collect();
    let v: f64 = cols[1].parse().unwrap();
    cols[1] = format!("{:.16e}", v * 1.01);
    lines[mid] = cols.join(",");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = radshock(&["verify", s(&path)]);
    assert_eq!(o.status.code(), Some(3));
    let rec = stderr_record(&o);
    assert_eq!(rec.kind, "gates_failed");
    assert!(rec.failed_gates.iter().any(|g| g == "integral_residual"), "{:?}", rec.failed_gates);
    assert!(rec.failed_gates.iter().any(|g| g == "field_consistency"), "{:?}", rec.failed_gates);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = radshock(&["profile", "--gamma", "2.3", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let rec = stderr_record(&o);
    assert_eq!(rec.class, "refusal");
    assert!(!dir.path().join("profile.csv").exists());

    let o = radshock(&["sweep", "--a-list", ""]);
    assert_eq!(o.status.code(), Some(2));

    let o = radshock(&["sweep", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_record(&o).kind, "usage");

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gamma": 1.4, "amplitude": 1e-3}"#).unwrap();
    let o = radshock(&["profile", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_record(&o).kind, "config");

    let o = radshock(&["verify", s(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn baby_reports_closed_form_node() {
    let dir = tempfile::tempdir().unwrap();
    let o = radshock(&["baby", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let w0 = stdout_json(&o)["w0"].as_f64().unwrap();
    // W^2 + W + a^2/2 = 0 at a = 1/2, larger root
    let oracle = (-1.0 + (1.0f64 - 0.5).sqrt()) / 2.0;
    assert!((w0 - oracle).abs() < 1e-12, "{w0} vs {oracle}");

    let o = radshock(&["baby", "--a", "0.8", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expansion_matches_library() {
    let o = radshock(&["expansion", "-n", "3", "--a", "2e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout_json(&o);
    let left = GasState::new(1.0, 0.0, 1.0).unwrap();
    let shock = shock_from_amplitude(&left, &GasConstants::with_gamma(1.4).unwrap(), 2e-3).unwrap();
    let c = expansion_coeffs(&build_reduced(&shock).unwrap(), 3).unwrap();
    let w: Vec<f64> = serde_json::from_value(out["coefficients"]["w"].clone()).unwrap();
    assert_eq!(w, c.w);
    assert_eq!(out["order"], 3);
}

#[test]
fn sweep_rows_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        let o = Command::new(env!("CARGO_BIN_EXE_radshock"))
            .args(["sweep", "--a-list", "2e-3,1e-2,3e-3", "--gamma-list", "1.4,2.3", "--out", s(&out)])
            .env("RADSHOCK_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let summary = stdout_json(&o);
        assert_eq!(summary["rows"], 6);
        assert_eq!(summary["ok"], 2);
        assert_eq!(summary["refused"], 4);
        tables.push(std::fs::read_to_string(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let rows: Vec<&str> = tables[0].lines().skip(1).collect();
    assert!(rows[0].starts_with("0,1.4,0.002,ok"), "{}", rows[0]);
    assert!(rows[1].starts_with("1,1.4,0.01,refused"), "{}", rows[1]);

    let o = Command::new(env!("CARGO_BIN_EXE_radshock"))
        .args(["sweep", "--a-list", "2e-3", "--out", s(dir.path())])
        .env("RADSHOCK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
