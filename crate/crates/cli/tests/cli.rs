//! End-to-end runs of the `periodlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn periodlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodlab"))
        .current_dir(dir)
        .args(args)
        .env_clear()
        .output()
        .expect("spawn periodlab")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn max_entry(matrix: &serde_json::Value) -> f64 {
    matrix["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z[0].as_f64().unwrap().hypot(z[1].as_f64().unwrap()))
        .fold(0.0, f64::max)
}

#[test]
fn identity_spec_writes_zero_matrix_and_diagnostics() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "id.json", r#"{"kind":"fourier","coeffs":[]}"#);
    let out = periodlab(
        dir.path(),
        &[
            "period",
            "id.json",
            "--modes",
            "16",
            "--samples",
            "512",
            "--interior",
            "8",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let z: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("period_z.json")).unwrap())
            .unwrap();
    assert_eq!(z["n"], 16);
    assert_eq!(z["data"].as_array().unwrap().len(), 256);
    assert!(max_entry(&z) < 1e-14);
    let diag: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("period_z.diagnostics.json")).unwrap(),
    )
    .unwrap();
    for key in ["cond_A", "sym_residual", "min_eig"] {
        assert!(diag[key].is_number(), "{key}");
    }
}

#[test]
fn mobius_spec_reports_vanishing_period() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"kind":"mobius","a_re":0.3,"a_im":0.0,"beta":0.0}"#,
    );
    let out = periodlab(
        dir.path(),
        &["period", "m.json", "--out", "z.csv", "--format", "csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert!(summary["z_max"].as_f64().unwrap() <= 1e-8);
    assert!(summary["b_hs_norm"].as_f64().unwrap() <= 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("z.csv")).unwrap();
    assert!(csv.starts_with("p,q,re,im\n1,1,"));
    assert_eq!(csv.lines().count(), 1 + 32 * 32);
    assert!(dir.path().join("z.diagnostics.json").exists());
}

#[test]
fn input_errors_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "big.json",
        r#"{"kind":"fourier","coeffs":[{"m":1,"re":0.0,"im":-1.5},{"m":-1,"re":0.0,"im":1.5}]}"#,
    );
    let out = periodlab(dir.path(), &["period", "big.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a diffeomorphism"));

    write(dir.path(), "bad.json", r#"{"kind":"spiral"}"#);
    assert_eq!(
        periodlab(dir.path(), &["period", "bad.json"]).status.code(),
        Some(1)
    );
    assert_eq!(
        periodlab(dir.path(), &["period", "missing.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        periodlab(dir.path(), &["verify", "--samples", "64"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        periodlab(dir.path(), &["frobnicate"]).status.code(),
        Some(1)
    );
    assert_eq!(periodlab(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn conditioning_failures_exit_with_code_two() {
    // min φ′ = 0.05: cond(A) at N = 64 is far beyond the guard.
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "deg.json",
        r#"{"kind":"fourier","coeffs":[{"m":2,"re":0.2375,"im":0},{"m":-2,"re":0.2375,"im":0}]}"#,
    );
    let out = periodlab(
        dir.path(),
        &["period", "deg.json", "--modes", "64", "--samples", "4096"],
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("ill-conditioned"));
}

#[test]
fn verify_passes_deterministically_and_fails_at_zero_tolerance() {
    let dir = TempDir::new().unwrap();
    let first = periodlab(dir.path(), &["verify", "--out", "a.json"]);
    assert_eq!(first.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&first.stderr);
    assert_eq!(
        stderr
            .lines()
            .filter(|l| l.starts_with("PASS criterion"))
            .count(),
        10
    );
    assert_eq!(
        periodlab(dir.path(), &["verify", "--out", "b.json"])
            .status
            .code(),
        Some(0)
    );
    let (a, b) = (
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap(),
    );
    assert_eq!(a, b);

    let strict = periodlab(dir.path(), &["verify", "--tol", "0", "--format", "csv"]);
    assert_eq!(strict.status.code(), Some(3));
    let csv = String::from_utf8_lossy(&strict.stdout);
    assert!(csv.starts_with("criterion,name,value,relation,threshold,pass\n"));
    assert!(csv.contains(",false\n"));
}

#[test]
fn environment_overrides_flags_defaults() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "id.json", r#"{"kind":"fourier","coeffs":[]}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_periodlab"))
        .current_dir(dir.path())
        .args(["period", "id.json"])
        .env_clear()
        .env("PERIODLAB_MODES", "8")
        .env("PERIODLAB_SAMPLES", "256")
        .env("PERIODLAB_INTERIOR", "4")
        .env("PERIODLAB_OUT", "env_z.json")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let z: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("env_z.json")).unwrap())
            .unwrap();
    assert_eq!(z["n"], 8);
}

#[test]
fn sweep_emits_one_csv_row_per_resolution() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "an.json",
        r#"{"kind":"fourier","coeffs":[{"m":2,"re":0.0,"im":-0.05},{"m":-2,"re":0.0,"im":0.05}]}"#,
    );
    let out = periodlab(
        dir.path(),
        &[
            "sweep",
            "an.json",
            "--n-list",
            "8,16,32",
            "--m-list",
            "256,512,1024",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n_modes,samples,interior,symplectic_residual,symmetry_residual,z_delta,cond_a"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("8,256,4,"));
    assert!(lines[3].starts_with("32,1024,16,"));

    let bad = periodlab(dir.path(), &["sweep", "an.json", "--n-list", "16,8"]);
    assert_eq!(bad.status.code(), Some(1));
    let mismatch = periodlab(
        dir.path(),
        &["sweep", "an.json", "--n-list", "8,16", "--m-list", "256"],
    );
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn variation_of_zbar_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "mu.json", r#"{"kind":"zbar_pow","k":1}"#);
    let out = periodlab(
        dir.path(),
        &["variation", "mu.json", "--t", "0.01", "--modes", "4"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    let data = report["variation"]["data"].as_array().unwrap();
    assert_eq!(report["variation"]["n"], 4);
    // Row-major (1,2) entry.
    assert!((data[1][0].as_f64().unwrap() - 0.01 * 2f64.sqrt() / 2.0).abs() < 1e-12);
    let m3 = &report["moments"][1];
    assert_eq!(m3["n"], 3);
    assert!((m3["re"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let a3 = &report["schottky_params"][1];
    assert!((a3["im"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert!(report["schottky_residual"].as_f64().unwrap() < 1e-15);
}
