//! The binary's verbs, exit codes and output locations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const COMPLETES: &str = "name = calm\n[grid]\npoints = 256\n[potential]\nsignature = harmonic\nomega = 1\n[nonlinearity]\nlambda = 1\n[initial]\n[time]\nt_end = 0.5\n[output]\ndir = runs\n";
const COLLAPSES: &str = "name = collapse\n[grid]\npoints = 2048\nhalf_width = 16\n[potential]\n[nonlinearity]\nlambda = -1\nsigma = 2\n[initial]\namplitude = 3\n[time]\nt_end = 0.1\ncadence = 0.01\n";

fn nlsp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsp")).args(args).current_dir(cwd).output().unwrap()
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn completed_run_exits_zero_and_writes_under_the_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "calm.scn", COMPLETES);
    let out = nlsp(&["run", &file, "--out", "results"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status=completed"));
    let base = tmp.path().join("results").join("runs");
    for f in ["calm.csv", "calm.verdicts", "calm.scenario"] {
        assert!(base.join(f).exists(), "{f}");
    }
}

#[test]
fn default_output_dir_lands_in_out() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "calm.scn", &COMPLETES.replace("dir = runs", "dir = ."));
    let out = nlsp(&["run", &file, "--out", "fresh"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("fresh").join("calm.csv").exists());
}

#[test]
fn blow_up_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "collapse.scn", COLLAPSES);
    let out = nlsp(&["run", &file], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status=blow_up_detected"));
}

#[test]
fn malformed_file_exits_one_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "bad.scn", &COMPLETES.replace("lambda = 1", "lambda = one"));
    let out = nlsp(&["run", &file], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 8"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_writes_one_directory_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "calm.scn", COMPLETES);
    let out = nlsp(&["sweep", &file, "--param", "nonlinearity.lambda=0,1", "--param", "potential.omega=1,2", "--out", "grid"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(tmp.path().join("grid").join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(tmp.path().join("grid").join("calm_003").join("calm_003.csv").exists());
}

#[test]
fn criteria_prints_without_integrating() {
    let tmp = tempfile::tempdir().unwrap();
    let file = scenario(tmp.path(), "collapse.scn", COLLAPSES);
    let out = nlsp(&["criteria", &file], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
    assert!(!tmp.path().join("collapse.csv").exists());
}
