use std::path::Path;
use std::process::{Command, Output};

use netsir::scenario::Axis;
use netsir::{Scenario, SweepSpec};

fn netsir(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netsir"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn reproduce_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = netsir(&["reproduce", "example1", "--svg"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("observed: Bimodal"));
    assert!(stdout.contains("result: PASS"));
    for f in [
        "example1.csv",
        "example1_report.txt",
        "example1_y.svg",
        "example1_ybar.svg",
    ] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
}

#[test]
fn dense_network_reports_the_rank_notice() {
    let dir = tempfile::tempdir().unwrap();
    let out = netsir(&["reproduce", "fig5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("not rank-1"));
    assert!(stdout.contains("Multimodal(minima=2, peaks=3)"));
    assert!(!dir.path().join("fig5_ybar.svg").exists());
}

#[test]
fn csv_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fig2.toml");
    std::fs::write(&file, Scenario::fig2().to_toml().unwrap()).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = netsir(&["simulate", file.to_str().unwrap()], d);
        assert_eq!(out.status.code(), Some(0));
    }
    let ca = std::fs::read(a.join("fig2.csv")).unwrap();
    let cb = std::fs::read(b.join("fig2.csv")).unwrap();
    assert_eq!(ca, cb);
    assert!(ca.starts_with(b"t,x_1,x_2,x_3,x_4,x_5,y_1,y_2,y_3,y_4,y_5,xbar,xtilde,ybar\n"));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ex.toml");
    std::fs::write(&file, Scenario::example1().to_toml().unwrap()).unwrap();
    let out = netsir(
        &["simulate", file.to_str().unwrap(), "--horizon", "2", "--tol-rel", "1e-9"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("t_end = 2,"), "{stdout}");
}

#[test]
fn classify_and_limit_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ex.toml");
    std::fs::write(&file, Scenario::example1().to_toml().unwrap()).unwrap();
    let path = file.to_str().unwrap();

    let out = netsir(&["classify", path], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("predicted: Undetermined{MonotoneDecreasing,Bimodal}"));
    assert!(!stdout.contains("observed"));

    let out = netsir(&["classify", path, "--resolve-undetermined"], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("resolved: Bimodal"));
    assert!(stdout.contains("verdict: PASS"));

    let out = netsir(&["limit", path], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("limit_stability: Stable"));
    assert!(stdout.contains("phi: 0.35822758855"));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, "name = 1").unwrap();
    let out = netsir(&["simulate", file.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
    let missing = netsir(&["simulate", "/nonexistent.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn sweep_subcommand_respects_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        base: Scenario::example1(),
        axis: Axis::InitialY(0),
        values: vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
        preserve_total: true,
    };
    let file = dir.path().join("sweep.toml");
    std::fs::write(&file, spec.to_toml().unwrap()).unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_netsir"))
            .args(["sweep", file.to_str().unwrap(), "--out-dir"])
            .arg(dir.path())
            .env("NETSIR_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let csv = String::from_utf8(one.stdout).unwrap();
    assert!(csv.starts_with("value,shape_1,shape_2,t_hat,peak_1,peak_2,xtilde_star,phi,error\n"));
    assert_eq!(csv.lines().count(), 7);
    assert!(dir.path().join("example1_sweep.csv").exists());
}

#[test]
fn failed_theory_checks_exit_with_two() {
    // the run ends before node 1 reaches its minimum
    let dir = tempfile::tempdir().unwrap();
    let out = netsir(&["reproduce", "example1", "--horizon", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("bimodality guaranteed, observed MonotoneDecreasing"));
    assert!(stdout.contains("result: FAIL"));
}
