//! End-to-end tests of the `hardy-lab` binary: exit codes, error
//! messages, report files, and determinism of the written artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hardy-lab"));
    // Keep the ambient environment from redirecting report output.
    cmd.env_remove("HARDY_LAB_OUTDIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    lab().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn report_json(dir: &Path) -> serde_json::Value {
    let raw = fs::read_to_string(dir.join("report.json")).expect("report.json exists");
    serde_json::from_str(&raw).expect("report.json parses")
}

#[test]
fn list_scenarios_prints_six_ids() {
    let out = run(&["list-scenarios"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    for id in [
        "sweep-alpha",
        "theorem1",
        "lemma-hss",
        "example-s4",
        "complement-s5",
        "theorem2-witness",
    ] {
        assert!(
            lines.iter().any(|l| l.starts_with(id)),
            "missing scenario {id} in listing:\n{text}"
        );
    }

    let machine = run(&["list-scenarios", "--machine"]);
    assert!(machine.status.success());
    let machine_text = stdout_of(&machine);
    let ids: Vec<&str> = machine_text.lines().map(str::trim).collect();
    assert_eq!(
        ids,
        vec![
            "sweep-alpha",
            "theorem1",
            "lemma-hss",
            "example-s4",
            "complement-s5",
            "theorem2-witness"
        ]
    );
}

#[test]
fn guarded_exponents_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for alpha in ["0.5", "1.5", "-0.3"] {
        // `=` form so a leading minus is not read as a flag.
        let alphas = format!("--alphas={alpha}");
        let out = run(&[
            "sweep-alpha",
            &alphas,
            "--outdir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(2), "alpha = {alpha}");
        let err = stderr_of(&out);
        assert!(
            err.contains("half-integer") || err.contains("nonnegative"),
            "unexpected stderr for alpha = {alpha}: {err}"
        );
        assert!(
            !dir.path().join("report.json").exists(),
            "config errors must not write reports"
        );
    }
}

#[test]
fn unknown_scenario_suggests_nearest() {
    let out = run(&["run", "sweeep-alpha"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("nearest match"), "stderr: {err}");
    assert!(err.contains("sweep-alpha"), "stderr: {err}");
}

#[test]
fn invalid_grid_size_is_rejected() {
    let out = run(&["lemma-hss", "--n", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("power of two"));
}

#[test]
fn excessive_blaschke_depth_is_rejected() {
    for depth in ["5", "7"] {
        let out = run(&["example-s4", "--blaschke", depth]);
        assert_eq!(out.status.code(), Some(2), "depth = {depth}");
        assert!(stderr_of(&out).contains("maximum 4"));
    }
}

#[test]
fn passing_scenario_writes_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "example-s4",
        "--blaschke",
        "1",
        "--outdir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let report = report_json(dir.path());
    assert_eq!(report["schema"], "hardy-lab/1");
    assert_eq!(report["passed"], true);
    assert_eq!(report["scenarios"][0]["scenario"], "example-s4");
    assert_eq!(report["config"]["blaschke"], "1");

    assert!(dir.path().join("summary.txt").exists());
    let csv = fs::read_to_string(dir.path().join("example-s4-kernel.csv"))
        .expect("spectrum sidecar exists");
    assert!(csv.starts_with("index,sigma\n"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn failing_scenario_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "example-s4",
        "--blaschke",
        "2",
        "--outdir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let report = report_json(dir.path());
    assert_eq!(report["passed"], false);
    let checks = report["scenarios"][0]["checks"].as_array().expect("checks array");
    let failed: Vec<&str> = checks
        .iter()
        .filter(|ch| ch["verdict"] == "fail")
        .map(|ch| ch["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"kernel-identity"), "failed set: {failed:?}");
    // The membership bound itself still holds at even depth.
    let membership = checks
        .iter()
        .find(|ch| ch["id"] == "membership-residual")
        .expect("membership check present");
    assert_eq!(membership["verdict"], "pass");
}

#[test]
fn reports_are_byte_stable_across_runs() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    for dir in [&one, &two] {
        let out = run(&["lemma-hss", "--outdir", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(one.path().join("report.json")).unwrap();
    let b = fs::read(two.path().join("report.json")).unwrap();
    assert_eq!(a, b, "report.json must not depend on the run");
}

#[test]
fn outdir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab()
        .args(["lemma-hss"])
        .env("HARDY_LAB_OUTDIR", dir.path())
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn sweep_subset_away_from_jumps_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep-alpha",
        "--alphas",
        "0.3,1.0,1.4",
        "--outdir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report = report_json(dir.path());
    assert_eq!(report["passed"], true);
}

#[test]
fn run_subcommand_accepts_known_id() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "lemma-hss", "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
}
