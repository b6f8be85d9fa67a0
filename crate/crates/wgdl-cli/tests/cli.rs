use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_wgdl");

const LINEAR: &str = "
[grid]
euclid_dims = 1
torus_dims = 1
box_half_length = 40
points_euclid = 256
points_torus = 8

[solver]
order = 4nls
p = 2
sign = defocusing
amplitude = 0
dt = 1e-3
t_end = 0.256

[diagnostics]
q_list = 4, 10/3
r_list = 1
morawetz = true
rhs_terms = true
record_every = 8

[output]
checkpoint_every = 64

[initial]
kind = gaussian
width = 3/2
modulation = 0.5, 1
";

const DEFOCUSING: &str = "
[grid]
euclid_dims = 1
torus_dims = 1
box_half_length = 30
points_euclid = 256
points_torus = 8

[solver]
order = 4nls
p = 2
sign = defocusing
dt = 1e-3
t_end = 0.128

[diagnostics]
q_list = 4
r_list = 1
morawetz = true
record_every = 4

[initial]
kind = random_smooth
seed = 3
";

const BLOWUP: &str = "
[grid]
euclid_dims = 1
torus_dims = 1
box_half_length = 20
points_euclid = 256
points_torus = 8

[solver]
order = 4nls
p = 10
sign = focusing
dt = 1e-4
t_end = 1

[initial]
kind = gaussian
width = 1
amplitude = 1e9
";

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn wgdl(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("WGDL_THREADS").output().unwrap()
}

fn simulate(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    wgdl(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn missing_key_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", &LINEAR.replace("dt = 1e-3\n", ""));
    let out = simulate(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("solver.dt"), "{err}");
}

#[test]
fn missing_config_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&dir.path().join("absent.cfg"), &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_literal_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", &LINEAR.replace("p = 2", "p = two"));
    let out = simulate(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 11") && err.contains("solver.p"), "{err}");
}

#[test]
fn linear_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", LINEAR);
    let out_dir = dir.path().join("out");
    let out = simulate(&cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&out);
    assert_eq!(s["status"], "ok");
    assert!(s["mass_drift"].as_f64().unwrap() <= 1e-12);
    assert!(s["c_test"].as_f64().unwrap() > 0.0);
    let ladder = s["scattering_ladder"].as_array().unwrap();
    assert!(ladder.len() >= 3);
    for rung in ladder {
        assert!(rung["residual"].as_f64().unwrap() <= 1e-12, "{rung}");
    }
    for name in ["records.ndjson", "morawetz_rhs.ndjson", "final.wgdl", "summary.json", "checkpoint_00000064.wgdl"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let records = std::fs::read_to_string(out_dir.join("records.ndjson")).unwrap();
    assert_eq!(records.lines().count(), 256 / 8 + 1);
    let first: Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    assert!(first["lq"]["4"].is_number() && first["cube_mass"]["1"].is_number());
}

#[test]
fn csv_output_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", LINEAR);
    let out_dir = dir.path().join("out");
    let out = simulate(&cfg, &out_dir, &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("records.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,mass,energy"));
    let width = header.split(',').count();
    assert!(lines.all(|l| l.split(',').count() == width));
}

#[test]
fn focusing_blowup_exits_two_with_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", BLOWUP);
    let out_dir = dir.path().join("out");
    let out = simulate(&cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "blowup");
    assert!(out_dir.join("final.wgdl").metadata().unwrap().len() > 0);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", DEFOCUSING);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(simulate(&cfg, &a, &["--threads", "1"]).status.code(), Some(0));
    let out = Command::new(BIN)
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()])
        .env("WGDL_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for name in ["records.ndjson", "final.wgdl", "summary.json"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert!(x == y, "{name} differs between thread counts");
    }
}

#[test]
fn seed_flag_changes_random_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", DEFOCUSING);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(simulate(&cfg, &a, &[]).status.code(), Some(0));
    assert_eq!(simulate(&cfg, &b, &["--seed", "4"]).status.code(), Some(0));
    assert_ne!(std::fs::read(a.join("final.wgdl")).unwrap(), std::fs::read(b.join("final.wgdl")).unwrap());
}

#[test]
fn restart_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", DEFOCUSING);
    let first = dir.path().join("first");
    assert_eq!(simulate(&cfg, &first, &[]).status.code(), Some(0));
    let text = DEFOCUSING.replace(
        "kind = random_smooth\nseed = 3",
        &format!("kind = checkpoint\npath = {}", first.join("final.wgdl").display()),
    );
    let cfg2 = write(dir.path(), "restart.cfg", &text);
    // The saved state has dispersed to the box edge, so the resolution check must be overridden.
    assert_eq!(simulate(&cfg2, &dir.path().join("second"), &[]).status.code(), Some(1));
    let out = simulate(&cfg2, &dir.path().join("second"), &["--force"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let wrong = text.replace("points_euclid = 256", "points_euclid = 128");
    let cfg3 = write(dir.path(), "wrong.cfg", &wrong);
    assert_eq!(simulate(&cfg3, &dir.path().join("third"), &["--force"]).status.code(), Some(1));
}

#[test]
fn underresolved_data_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", &LINEAR.replace("box_half_length = 40", "box_half_length = 6"));
    assert_eq!(simulate(&cfg, &dir.path().join("a"), &[]).status.code(), Some(1));
    let out = simulate(&cfg, &dir.path().join("b"), &["--force"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json(&out)["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn exponents_intermediate_window() {
    let out = wgdl(&["exponents", "5", "1", "4nls", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["criticality"]["class"], "intermediate");
    assert_eq!(v["criticality"]["range"], serde_json::json!(["8/5", "4"]));
    assert_eq!(v["index1"]["verified"], true);
    assert!(v["index2"]["infeasible"]["reason"].as_str().unwrap().contains("s = d/2 - 4/p"));
}

#[test]
fn exponents_empty_range_for_four_torus_dims() {
    let out = wgdl(&["exponents", "5", "4", "4nls", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["criticality"]["class"], "empty_range");
    assert!(v["criticality"]["range"].is_null());
    assert!(v.get("index1").is_none());
}

#[test]
fn exponents_second_order_window() {
    let out = wgdl(&["exponents", "3", "0", "nls", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["criticality"]["range"], serde_json::json!(["0", "4"]));
}

#[test]
fn exponents_rejects_bad_numerics() {
    assert_eq!(wgdl(&["exponents", "5", "1", "4nls", "two"]).status.code(), Some(1));
    assert_eq!(wgdl(&["exponents", "0", "1", "4nls", "2"]).status.code(), Some(1));
    assert_eq!(wgdl(&["exponents", "5", "1", "4nls", "-1"]).status.code(), Some(1));
    assert_eq!(wgdl(&["exponents", "5", "1", "6nls", "2"]).status.code(), Some(1));
}

#[test]
fn verify_oracle_passes() {
    let out = wgdl(&["verify", "--suite", "oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn verify_algebra_passes() {
    let out = wgdl(&["verify", "--suite", "algebra"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_exponents_names_failing_claims() {
    let out = wgdl(&["verify", "--suite", "exponents"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["failed"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(failed.len(), 4);
    assert!(failed.iter().all(|f| f.starts_with("exponents::index2::")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED: exponents::index2::d5_n1_p2"));
}
