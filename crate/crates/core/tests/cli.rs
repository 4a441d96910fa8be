//! End-to-end runs of the `monolab` binary.

use std::process::Command;

fn monolab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_monolab"))
        .args(args)
        .env("MONOLAB_WORKERS", "2")
        .output()
        .unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn oracle_reports_parity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "parity.json", r#"{"kind":"table","n":2,"hex":"6"}"#);
    let out = monolab(&["oracle", &f, "--stable"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["report"]["distance"], "1/4");
    assert_eq!(json["report"]["v"], "1/2");
    assert!(json.get("wall_clock_ms").is_none());
}

#[test]
fn stable_output_is_byte_identical() {
    let args = [
        "scaling", "--n", "6,8", "--trials", "2e4", "--seed", "9", "--stable",
    ];
    let (a, b) = (monolab(&args), monolab(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn worker_count_does_not_change_results() {
    let args = [
        "lowerbound",
        "--n-list",
        "50,100",
        "--samples",
        "2e4",
        "--draws",
        "3",
        "--certify-samples",
        "4096",
        "--seed",
        "4",
        "--stable",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_monolab"))
        .args(args)
        .args(["--workers", "1"])
        .output()
        .unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_monolab"))
        .args(args)
        .args(["--workers", "3"])
        .output()
        .unwrap();
    assert!(
        one.status.success(),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    let strip = |v: &[u8]| {
        let mut j: serde_json::Value = serde_json::from_slice(v).unwrap();
        j["config"]["workers"] = serde_json::Value::Null;
        j
    };
    assert_eq!(strip(&one.stdout), strip(&three.stdout));
    assert_eq!(one.stderr, three.stderr);
}

#[test]
fn csv_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = monolab(&[
        "scaling",
        "--n",
        "6,8",
        "--trials",
        "1000",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(
        text.starts_with("n,trials,violations,rate,stderr"),
        "{text}"
    );
}

#[test]
fn hypergrid_and_test_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "anti.json",
        r#"{"kind":"ltf","n":2,"weights":[-1,0],"theta":0}"#,
    );
    let out = monolab(&["hypergrid", "--m", "3", "--input", &f]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = monolab(&[
        "test", &f, "--tester", "edge", "--trials", "1000", "--seed", "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn selftest_and_errors() {
    assert!(monolab(&["selftest"]).status.success());
    let out = monolab(&["oracle", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scaling_needs_two_dimensions() {
    assert_eq!(
        monolab(&["scaling", "--n", "6", "--trials", "1000"])
            .status
            .code(),
        Some(2)
    );
}
