//! End-to-end CLI tests: exit codes, report files, and byte-level
//! determinism of verify-all across runs and thread counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hopf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hopf-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn list_prints_the_catalog() {
    let out = hopf(&["list"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for name in ["circle", "torus", "genus2_mesh", "tube_s1xs2"] {
        assert!(stdout.contains(name), "missing {name} in listing");
    }
}

#[test]
fn unknown_shape_is_an_input_error() {
    let out = hopf(&["degree", "klein_bottle"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("unknown shape"));
}

#[test]
fn transgression_needs_even_ambient_dimension() {
    let out = hopf(&["transgress", "sphere"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_grid_is_an_input_error() {
    let out = hopf(&["degree", "sphere", "--grid", "64"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hopf(&["degree", "sphere", "--grid", "banana"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn torus_preimage_degree_is_zero() {
    let out = hopf(&["degree", "torus", "--estimator", "preimage", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("expected degree 0"), "{stdout}");
    assert!(stdout.contains("[pass]"), "{stdout}");
}

#[test]
fn circle_transgression_integral_is_minus_one() {
    let out = hopf(&["transgress", "circle", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("integral    -1.000000000000e0"), "{stdout}");
}

#[test]
fn failing_verification_still_writes_the_report() {
    let dir = scratch_dir("fail");
    let report = dir.join("report.json");
    // An unreachable tolerance turns a correct coarse estimate into a
    // verification failure; the report must be written anyway.
    let out = hopf(&[
        "degree",
        "ellipsoid",
        "--estimator",
        "gk",
        "--grid",
        "8x8",
        "--tol",
        "1e-14",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let payload = std::fs::read_to_string(&report).unwrap();
    assert!(payload.contains("\"verdict\":\"fail\""), "{payload}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_all_is_byte_deterministic_across_runs_and_threads() {
    let dir = scratch_dir("determinism");
    let config = dir.join("corpus.json");
    // One shape per estimator family, at reduced resolutions.
    std::fs::write(
        &config,
        r#"[
            {"name": "circle", "resolution": [64]},
            {"name": "ellipsoid", "resolution": [16, 32]},
            {"name": "torus", "resolution": [16, 16]},
            {"name": "sphere3", "resolution": [8, 16, 16]},
            {"name": "genus2_mesh"},
            {"name": "icosphere"}
        ]"#,
    )
    .unwrap();

    let run = |tag: &str, extra: &[&str]| -> (Vec<u8>, Vec<u8>) {
        let json = dir.join(format!("report-{tag}.json"));
        let csv = dir.join(format!("report-{tag}.csv"));
        let mut args = vec![
            "verify-all",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "42",
            "--report",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let out = hopf(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        (std::fs::read(&json).unwrap(), std::fs::read(&csv).unwrap())
    };

    let (json_a, csv_a) = run("a", &[]);
    let (json_b, csv_b) = run("b", &[]);
    let (json_c, csv_c) = run("c", &["--threads", "2"]);
    assert_eq!(json_a, json_b, "JSON differs between identical runs");
    assert_eq!(json_a, json_c, "JSON differs across thread counts");
    assert_eq!(csv_a, csv_b, "CSV differs between identical runs");
    assert_eq!(csv_a, csv_c, "CSV differs across thread counts");
    let text = String::from_utf8(json_a).unwrap();
    assert!(text.contains("\"schema\":1"));
    assert!(text.contains("\"theorem_verdict\":\"pass\""));
    println!("ACCEPTANCE 10: PASS — byte-identical reports across runs and thread counts");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn thread_env_variable_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_hopf"))
        .args(["degree", "circle", "--estimator", "winding"])
        .env("HOPF_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_hopf"))
        .args(["list"])
        .env("HOPF_THREADS", "zebra")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
