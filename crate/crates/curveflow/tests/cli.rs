//! End-to-end checks of the `curveflow` binary: exit codes and artifacts.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curveflow"))
}

const FAST_SCENARIO: &str = "
[curve]
name = smoke
initial = cos_star(1, 0.2, 3)
n = 64

[solver]
law = gapf
t_end = 0.05
record_count = 5

[outputs]
report = smoke_report.json
";

#[test]
fn run_succeeds_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("smoke.ini");
    std::fs::write(&ini, FAST_SCENARIO).unwrap();
    let out = bin()
        .args(["run".as_ref(), ini.as_os_str()])
        .args(["--out-dir".as_ref(), dir.path().as_os_str()])
        .arg("--quiet")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("smoke.csv").exists());
    assert!(dir.path().join("smoke_report.json").exists());
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("bad.ini");
    std::fs::write(&ini, "[solver]\nlaw = osmosis\n").unwrap();
    let out = bin().args(["run".as_ref(), ini.as_os_str()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_scenario_file_exits_1() {
    let out = bin().args(["run", "/nonexistent/path.ini"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_produces_one_dir_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("smoke.ini");
    std::fs::write(&ini, FAST_SCENARIO).unwrap();
    let out = bin()
        .args(["sweep".as_ref(), ini.as_os_str()])
        .args(["--param", "n=32,64"])
        .args(["--out-dir".as_ref(), dir.path().as_os_str()])
        .arg("--quiet")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("n_32/smoke.csv").exists());
    assert!(dir.path().join("n_64/smoke.csv").exists());
}

#[test]
fn malformed_sweep_param_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("smoke.ini");
    std::fs::write(&ini, FAST_SCENARIO).unwrap();
    let out = bin()
        .args(["sweep".as_ref(), ini.as_os_str()])
        .args(["--param", "n"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
