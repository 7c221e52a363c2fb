use std::path::Path;
use std::process::{Command, Output};

use nirb_core::harness::{read_study_csv, CSV_HEADER};

fn nirb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nirb"))
        .args(args)
        .env_remove("NIRB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("study.json");
    std::fs::write(
        &path,
        r#"{
  "mesh_kind": "uniform",
  "fine_resolutions": [16, 36],
  "snapshot_count": 3,
  "seed": 42,
  "problem": "paper",
  "target_mu": [0.99, 0.8, 0.2, 0.78],
  "solver_kind": "tpfa",
  "reference_factor": 2
}"#,
    )
    .unwrap();
    path
}

#[test]
fn help_exits_zero() {
    for sub in [None, Some("mesh-info"), Some("solve"), Some("offline"), Some("online"), Some("study"), Some("superconv")] {
        let mut args: Vec<&str> = sub.into_iter().collect();
        args.push("--help");
        let out = nirb(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(stdout(&out).contains("Usage"));
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["mesh-info", "--kind", "hexagonal", "--n", "4"],
        vec!["mesh-info", "--kind", "uniform"],
        vec!["solve", "--kind", "uniform", "--n", "4", "--mu", "0.5,x"],
        vec!["frobnicate"],
        vec!["solve", "--kind", "uniform", "--n", "4", "--problem", "unknown"],
    ] {
        assert_eq!(nirb(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn non_positive_diffusion_exits_two() {
    let out = nirb(&["solve", "--kind", "uniform", "--n", "4", "--mu", "-0.5,0,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive"));
}

#[test]
fn mesh_info_reports_counts() {
    let out = nirb(&["mesh-info", "--kind", "uniform", "--n", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(value(&text, "cells"), "4");
    assert_eq!(value(&text, "faces"), "12");
    assert_eq!(value(&text, "interior_faces"), "4");
    assert_eq!(value(&text, "superadmissible"), "true");

    let out = nirb(&["mesh-info", "--kind", "triangular", "--n", "1"]);
    assert_eq!(value(&stdout(&out), "cells"), "14");
}

#[test]
fn solve_is_deterministic_and_converges() {
    let args = ["solve", "--kind", "uniform", "--n", "16", "--problem", "sine", "--scheme", "hmm"];
    let first = nirb(&args);
    let second = nirb(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let err: f64 = value(&stdout(&first), "rel_gradient_error").parse().unwrap();
    assert!(err < 0.1, "{err}");
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let run = |threads: &str, path: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_nirb"))
            .args(["offline", "--config", config.to_str().unwrap(), "--n", "16", "--out", path.to_str().unwrap()])
            .env("NIRB_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let one = run("1", &dir.path().join("a.bin"));
    let three = run("3", &dir.path().join("b.bin"));
    assert_eq!(one, three);
}

#[test]
fn offline_then_online() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let basis = dir.path().join("basis.bin");
    let out = nirb(&["offline", "--config", config.to_str().unwrap(), "--n", "16", "--out", basis.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(value(&stdout(&out), "basis_size"), "3");

    let field = dir.path().join("u.bin");
    let csv = dir.path().join("online.csv");
    let out = nirb(&[
        "online",
        "--basis",
        basis.to_str().unwrap(),
        "--n-coarse",
        "4",
        "--mu",
        "0.99,0.8,0.2,0.78",
        "--out",
        field.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let err_nirb: f64 = value(&text, "err_nirb").parse().unwrap();
    let err_coarse: f64 = value(&text, "err_fv_coarse").parse().unwrap();
    assert!(err_nirb < err_coarse);
    assert!(field.exists());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("n_fine,n_coarse,N,err_nirb,err_fv_coarse\n16,4,3,"));

    let out = nirb(&["online", "--basis", dir.path().join("missing.bin").to_str().unwrap(), "--n-coarse", "4", "--mu", "1,1,1,1", "--out", field.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn study_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = nirb(&["study", "--config", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    let rows = read_study_csv(&dir.path().join("study.csv")).unwrap().rows;
    assert_eq!(rows.iter().map(|r| r.n_fine).collect::<Vec<_>>(), vec![16, 36]);
    assert!(dir.path().join("plot.gp").exists());
}
