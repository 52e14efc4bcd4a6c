use std::process::Command;

use mvlab::cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use mvlab::report::SuiteReport;

fn mvlab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mvlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

struct Row {
    parameter: f64,
    value: f64,
    monotone_ok: bool,
}

fn rows(csv_text: &str) -> Vec<Row> {
    let mut lines = csv_text.lines();
    assert_eq!(lines.next(), Some("parameter,value,error_estimate,monotone_ok"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 4);
            Row { parameter: f[0].parse().unwrap(), value: f[1].parse().unwrap(), monotone_ok: f[3].parse().unwrap() }
        })
        .collect()
}

#[test]
fn harmonic_quadratic_sweep_is_zero() {
    let (code, out, _) = mvlab(&["sweep", "--quantity", "J", "--geometry", "euclidean3", "--field", "harmonic-quadratic"]);
    assert_eq!(code, EXIT_PASS);
    let rows = rows(&out);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.value.abs() < 1e-9 && r.monotone_ok));
}

#[test]
fn soliton_jhat_sweep_has_seven_unit_rows() {
    let (code, out, _) = mvlab(&["sweep", "--quantity", "jhat", "--geometry", "gaussian", "--rmin", "0.2", "--rmax", "0.8", "--steps", "7"]);
    assert_eq!(code, EXIT_PASS);
    let rows = rows(&out);
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0].parameter, 0.2);
    assert_eq!(rows[6].parameter, 0.8);
    assert!(rows.iter().all(|r| (r.value - 1.0).abs() < 1e-4));
}

#[test]
fn sphere_theta_sweep_is_non_increasing() {
    let (code, out, _) = mvlab(&["sweep", "--quantity", "theta", "--geometry", "shrinking-s3", "--taumin", "0.05", "--taumax", "0.3", "--steps", "6"]);
    assert_eq!(code, EXIT_PASS);
    let rows = rows(&out);
    assert_eq!(rows.len(), 6);
    assert!(rows.windows(2).all(|w| w[1].value <= w[0].value + 1e-5));
    assert!(rows.iter().all(|r| r.monotone_ok));
}

#[test]
fn sweep_json_format() {
    let (code, out, _) = mvlab(&["sweep", "--quantity", "jbar", "--steps", "3", "--format", "json"]);
    assert_eq!(code, EXIT_PASS);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["quantity"], "jbar");
    assert_eq!(v["values"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mcf.json");
    let path_str = path.to_str().unwrap();
    let (code, _, err) = mvlab(&["verify", "--suite", "mcf", "--deterministic", "--out", path_str]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let first = std::fs::read_to_string(&path).unwrap();
    let (_, second, _) = mvlab(&["verify", "--suite", "mcf", "--deterministic"]);
    assert_eq!(first, second);

    let report = SuiteReport::from_json(&first).unwrap();
    assert_eq!(report.suite, "mcf");
    assert_eq!(report.wall_ms, 0);
    assert!(report.pass);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    for key in ["name", "value", "expected", "tol", "pass", "err"] {
        assert!(v["checks"][0].get(key).is_some(), "missing {key}");
    }

    let (code, out, _) = mvlab(&["report", path_str]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("suite mcf: PASS"));

    std::fs::write(&path, first.replacen("\"pass\": true", "\"pass\": false", 1)).unwrap();
    let (code, _, _) = mvlab(&["report", path_str]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn tight_tolerances_fail_with_exit_one() {
    let (code, out, _) = mvlab(&["verify", "--suite", "mcf", "--tol-scale", "1e-12"]);
    assert_eq!(code, EXIT_FAIL);
    let report = SuiteReport::from_json(&out).unwrap();
    assert!(!report.pass);
    assert!(report.failures().count() > 0);
}

#[test]
fn geometry_filter_selects_tagged_checks() {
    let (code, out, _) = mvlab(&["verify", "--suite", "elliptic", "--geometry", "hyperbolic3", "--format", "csv"]);
    assert_eq!(code, EXIT_PASS);
    let names: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert!(!names.is_empty());
    assert!(names.iter().all(|n| n.contains("hyperbolic3")), "{names:?}");
    let (code, _, _) = mvlab(&["verify", "--suite", "mcf", "--geometry", "gaussian"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# sweep settings\nquantity = J\ngeometry = euclidean3\nfield = superharmonic\nsteps = 3\nrmin = 0.5\nrmax = 1.5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, _) = mvlab(&["sweep", "--config", cfg]);
    assert_eq!(code, EXIT_PASS);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert!(r.windows(2).all(|w| w[1].value < w[0].value));
    let (code, out, _) = mvlab(&["sweep", "--config", cfg, "--steps", "5"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(rows(&out).len(), 5);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(mvlab(&["sweep", "--config", bad.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mvlab(&["sweep"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["sweep", "--quantity", "K"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["sweep", "--quantity", "J", "--field", "exp-radial"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["sweep", "--quantity", "jbar", "--geometry", "euclidean3"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["sweep", "--quantity", "ihat", "--a", "0.5", "--rmin", "0.3"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["verify", "--suite", "everything"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["verify", "--tol-scale", "-1"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(mvlab(&["report", "/nonexistent/report.json"]).0, EXIT_USAGE);
}

#[test]
fn binary_honours_jobs_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mvlab"))
        .args(["sweep", "--quantity", "jbar", "--steps", "2"])
        .env("MVLAB_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
    let help = Command::new(env!("CARGO_BIN_EXE_mvlab")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_mvlab")).args(["sweep", "--quantity", "jbar"]).env("MVLAB_JOBS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
