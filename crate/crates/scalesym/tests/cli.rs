//! End-to-end tests of the `scalesym` binary: subcommands, flags, exit
//! codes (0 pass / 1 check failure / 2 config error / 3 other), and the
//! artifact contracts.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_scalesym");

fn scalesym(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const WRONG_LAW_CONFIG: &str = r#"
name = "wrong-law"
t_end = 3.0
tol = 1e-9
checks = ["charge"]

[system]
potential = "kepler"
coupling = 1.0

[ic]
q = [1.0, 0.0]
qdot = [0.0, 1.2]

[law]
a = 1.0
b = 1.0
"#;

#[test]
fn list_prints_the_catalog_with_laws() {
    let out = scalesym(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in [
        "free-dilation",
        "inverse-square",
        "kepler-rescale",
        "galilei-drop",
        "oscillator-rescale",
        "oscillator-1d-homothety",
        "brdicka-wave",
        "isotropic-ppwave",
    ] {
        assert!(text.contains(name), "listing misses {name}:\n{text}");
    }
    assert!(text.contains("law (a,b,c) = (2, 3, 1)"));
    assert!(text.contains("traceless"));
}

#[test]
fn passing_builtin_exits_zero_and_writes_artifacts() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = scalesym(&[
        "run",
        "--builtin",
        "galilei-drop",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS] charge"));
    assert!(text.contains("result: PASS (4/4 checks passed)"));

    for file in ["trajectory.csv", "charge.csv", "report.json"] {
        assert!(out_dir.join(file).exists(), "{file} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));
    assert_eq!(report["name"], serde_json::json!("galilei-drop"));

    // Column contract of the trajectory table.
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,q1,qd1,S"));
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempdir().unwrap();
    let config = write_config(dir.path(), "wrong-law.toml", WRONG_LAW_CONFIG);
    let out_dir = dir.path().join("out");
    let out = scalesym(&["run", &config, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("[FAIL] charge"));

    // The run completed: artifacts exist and record the failure.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::json!(false));
}

#[test]
fn config_problems_exit_two() {
    let dir = tempdir().unwrap();

    // Rejected value, with the documented message.
    let bad_lambda = WRONG_LAW_CONFIG.replace(
        "checks = [\"charge\"]",
        "checks = [\"charge\"]\nlambda_values = [-1.0]",
    );
    let config = write_config(dir.path(), "bad-lambda.toml", &bad_lambda);
    let out = scalesym(&["run", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lambda must be positive"));

    // Unknown built-in name.
    let out = scalesym(&["run", "--builtin", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown built-in scenario"));

    // Unreadable config path.
    let missing = dir.path().join("missing.toml");
    let out = scalesym(&["run", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed TOML reports a position.
    let config = write_config(dir.path(), "broken.toml", "name = [unclosed");
    let out = scalesym(&["run", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"));

    // Bad tolerance overrides.
    for tol in ["--tol=-1e-9", "--tol=0"] {
        let out = scalesym(&["run", "--builtin", "galilei-drop", tol]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("--tol must be positive"));
    }

    // Missing both config and --builtin is a usage error (clap exits 2).
    let out = scalesym(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failures_exit_three() {
    let dir = tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out_dir = blocker.join("sub");
    let out = scalesym(&[
        "run",
        "--builtin",
        "galilei-drop",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

#[test]
fn json_format_swaps_the_table_artifacts() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = scalesym(&[
        "run",
        "--builtin",
        "galilei-drop",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(out_dir.join("trajectory.json").exists());
    assert!(!out_dir.join("trajectory.csv").exists());

    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("trajectory.json")).unwrap())
            .unwrap();
    assert_eq!(table["columns"], serde_json::json!(["t", "q1", "qd1", "S"]));
    assert!(table["rows"].as_array().unwrap().len() > 100);

    let out = scalesym(&["run", "--builtin", "galilei-drop", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let dir = tempdir().unwrap();
    let dir_a = dir.path().join("a");
    let dir_b = dir.path().join("b");
    for out_dir in [&dir_a, &dir_b] {
        let out = scalesym(&[
            "run",
            "--builtin",
            "free-dilation",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    for file in ["trajectory.csv", "charge.csv"] {
        let a = std::fs::read(dir_a.join(file)).unwrap();
        let b = std::fs::read(dir_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}
