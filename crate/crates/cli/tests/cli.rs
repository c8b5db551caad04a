use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cellhodge::Cochain;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellhodge")).args(args).env_remove("CELLHODGE_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn build_reports_counts() {
    let o = run(&["build", fixture("torus.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "N=(4,8,4)");
    let o = run(&["build", "sioux_falls"]);
    assert_eq!(stdout(&o).trim(), "N=(24,38,15)");
}

#[test]
fn betti_of_torus() {
    let o = run(&["betti", fixture("torus.json").to_str().unwrap(), "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1,2,1");
}

#[test]
fn open_cell_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("open.json");
    fs::write(&path, r#"{"nodes": 4, "edges": [[0,1],[1,2],[2,3],[3,0]], "two_cells": [[[0,1],[1,1],[2,1]]]}"#).unwrap();
    let o = run(&["build", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("2-cell 0"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["build"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // randomized commands insist on a seed
    assert_eq!(run(&["nn-gradcheck", "--layer", "eq5"]).status.code(), Some(2));
    assert_eq!(run(&["denoise-bench", "--complex", "sioux_falls", "--out", "x.csv"]).status.code(), Some(2));
    assert_eq!(run(&["filter", "c4", "--flow", "f.csv", "--operator", "nope", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn fixture_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("c4.json"), dir.path().join("torus.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cellhodge"))
        .args(["build", "torus"])
        .env("CELLHODGE_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "N=(4,4,0)");
}

#[test]
fn fixtures_emit_matches_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixtures", "emit", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["torus.json", "filled_square.json", "c4.json", "sioux_falls.json"] {
        assert_eq!(fs::read_to_string(dir.path().join(name)).unwrap(), fs::read_to_string(fixture(name)).unwrap(), "{name}");
    }
    let list = stdout(&run(&["fixtures", "list"]));
    assert!(list.contains("torus_cc,torus.json,4,8,4"));
}

#[test]
fn laplacian_and_boundary_csv() {
    let o = run(&["laplacian", "c4", "-k", "0"]);
    let text = stdout(&o);
    assert!(text.starts_with("row,col,value\n"));
    assert!(text.contains("0,0,2\n") && text.contains("1,0,-1\n"));
    let o = run(&["laplacian", "c4", "--boundary", "-k", "1"]);
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = run(&["laplacian", "torus", "-k", "1", "--spectrum"]);
    let zeros = stdout(&o).lines().skip(1).filter(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap().abs() < 1e-9).count();
    assert_eq!(zeros, 2);
    assert_eq!(run(&["laplacian", "c4", "-k", "3"]).status.code(), Some(1));
}

fn write_flow(dir: &Path, values: &[f64]) -> PathBuf {
    let path = dir.join("flow.csv");
    fs::write(&path, Cochain::new(1, values.to_vec()).to_csv()).unwrap();
    path
}

#[test]
fn filter_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let flow = write_flow(dir.path(), &[1.0, 2.0, -1.0, 0.5, 0.0, 3.0, 1.0, -2.0]);
    let out = dir.path().join("out.csv");
    let resp = dir.path().join("resp.csv");
    let o = run(&[
        "filter", "torus", "--flow", flow.to_str().unwrap(), "--operator", "cellular", "--filter-order", "3", "--seed", "4",
        "--out", out.to_str().unwrap(), "--response", resp.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# seed=4"));
    assert_eq!(Cochain::parse_csv(&text).unwrap().len(), 8);
    assert!(fs::read_to_string(&resp).unwrap().starts_with("lambda,response\n"));

    let o = run(&["decompose", "torus", "--flow", flow.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("edge_index,gradient,curl,harmonic\n"));
    assert_eq!(stdout(&o).lines().count(), 9);

    let o = run(&["decompose", "c4", "--flow", flow.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "4")] {
        let o = run(&[
            "denoise-bench", "--complex", "sioux_falls", "--trials", "30", "--sigmas", "auto", "--seed", "9", "--jobs", jobs,
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("# master_seed=9"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 33);
}

#[test]
fn bench_ordering_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let out = out.to_str().unwrap();
    let base = ["denoise-bench", "--complex", "sioux_falls", "--trials", "50", "--seed", "3", "--out", out, "--assert-ordering"];
    let mut args = base.to_vec();
    args.extend(["--operator", "cellular,simplicial,edge"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // with the line graph included the edge-vs-linegraph claim fails at high noise
    let o = run(&base);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ordering violated"));
}

#[test]
fn bench_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"sources": [0], "sinks": [2], "num_walks": 20, "seed": 1, "sigma_grid": [0.1, 1.0]}"#).unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&[
        "denoise-bench", "--complex", "filled_square", "--config", cfg.to_str().unwrap(), "--trials", "5", "--seed", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 9);
    let o = run(&["denoise-bench", "--complex", "filled_square", "--seed", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gradcheck_reports_small_error() {
    for layer in ["eq5", "eq6", "eq7"] {
        let o = run(&["nn-gradcheck", "--layer", layer, "--seed", "1", "--instances", "3"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.contains("# seed=1"));
        let err: f64 = text.lines().last().unwrap().strip_prefix("max_rel_error=").unwrap().parse().unwrap();
        assert!(err < 1e-5, "{layer}: {err}");
    }
}

#[test]
fn help_lists_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        ("build", &[]),
        ("laplacian", &["--k", "--part", "--spectrum", "--boundary", "--out"]),
        ("decompose", &["--flow", "--out"]),
        ("filter", &["--flow", "--operator", "--filter-order", "--seed", "--response", "--out"]),
        (
            "denoise-bench",
            &["--complex", "--config", "--trials", "--sigmas", "--operator", "--filter-order", "--seed", "--jobs", "--out", "--assert-ordering"],
        ),
        ("nn-gradcheck", &["--layer", "--seed", "--activation", "--instances"]),
        ("fixtures", &[]),
        ("betti", &["--check"]),
    ];
    let top = stdout(&run(&["--help"]));
    for (sub, flags) in expected {
        assert!(top.contains(sub), "top-level help lacks {sub}");
        let help = stdout(&run(&[sub, "--help"]));
        for flag in *flags {
            assert!(help.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}
