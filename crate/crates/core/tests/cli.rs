use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn gridpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = gridpart(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

/// Drops the named columns, which hold measured wall-clock time.
fn without_columns(lines: &[String], names: &[&str]) -> Vec<String> {
    let header: Vec<&str> = lines[0].split(',').collect();
    let skip: Vec<usize> = names
        .iter()
        .map(|n| header.iter().position(|h| h == n).expect("column present"))
        .collect();
    lines
        .iter()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, v)| v)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[test]
fn compare_writes_one_row_per_method_and_seed() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cmp");
    ok(&[
        "compare",
        "--grid",
        "8x8x4",
        "--k",
        "8",
        "--methods",
        "graph-ml,hg-ml",
        "--seeds",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let lines = data_lines(&out.join("compare.csv"));
    assert_eq!(lines.len(), 11);
    assert!(lines[0].ends_with("partition_ms"));
    let methods: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(methods.iter().filter(|m| **m == "graph-ml").count(), 5);
    assert_eq!(methods.iter().filter(|m| **m == "hg-ml").count(), 5);
    assert!(out.join("summary.txt").exists());
}

#[test]
fn weak_scaling_grows_the_grid_with_k() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("weak");
    ok(&[
        "weak",
        "--k",
        "1,8,64",
        "--methods",
        "block,sfc",
        "--out",
        out.to_str().unwrap(),
    ]);
    let lines = data_lines(&out.join("scaling.csv"));
    let cells_col = lines[0].split(',').position(|h| h == "cells").unwrap();
    let k_col = lines[0].split(',').position(|h| h == "k").unwrap();
    assert_eq!(lines.len(), 1 + 3 * 2);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        let k: usize = f[k_col].parse().unwrap();
        assert_eq!(f[cells_col].parse::<usize>().unwrap(), 8 * k);
    }
    for name in ["fig1_weak.dat", "fig2_weak.dat", "fig3_weak.dat"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn malformed_k_exits_with_usage_code_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bad");
    let res = gridpart(&[
        "compare",
        "--grid",
        "4x4x4",
        "--k",
        "eight",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&res.stderr).is_empty());
    assert!(!out.exists());

    let res = gridpart(&[
        "partition",
        "--grid",
        "2x2x1",
        "--k",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(gridpart(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        gridpart(&["partition", "--no-such-flag"]).status.code(),
        Some(2)
    );
    assert_eq!(gridpart(&["--help"]).status.code(), Some(0));
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "compare",
            "--grid",
            "10x8x6",
            "--k",
            "4,16",
            "--seeds",
            "3",
            "--periodic",
            "x",
            "--scenario",
            "gaussian:3,4,3,2,8,1",
            "--out",
            out.to_str().unwrap(),
        ]);
        without_columns(&data_lines(&out.join("compare.csv")), &["partition_ms"])
    };
    assert_eq!(run("a"), run("b"));

    let part = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "partition",
            "--grid",
            "9x7x5",
            "--k",
            "6",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        fs::read(out.join("partition.txt")).unwrap()
    };
    assert_eq!(part("p1"), part("p2"));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small dynamic run\ngrid = 6x4x2\nk = 4\nmethod = rcb\nsteps = 6\nrepartition_every = 2\n",
    )
    .unwrap();
    let out = dir.path().join("dyn");
    ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "dynamic",
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let lines = data_lines(&out.join("dynamic.csv"));
    assert_eq!(lines.len(), 1 + 4);
    let rep = lines[0]
        .split(',')
        .position(|h| h == "repartitioned")
        .unwrap();
    let flags: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(rep).unwrap())
        .collect();
    assert_eq!(flags, ["0", "0", "1", "0"]);

    fs::write(&cfg, "grid = 4x4x4\nbogus = 1\n").unwrap();
    let res = gridpart(&[
        "--config",
        cfg.to_str().unwrap(),
        "partition",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("json");
    ok(&[
        "compare",
        "--grid",
        "6x6x2",
        "--k",
        "4",
        "--methods",
        "block,rcb",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("compare.json")).unwrap()).unwrap();
    let rows = v
        .as_array()
        .or_else(|| v["rows"].as_array())
        .expect("rows array");
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.get("partition_ms").is_some()));
}

#[test]
fn evaluate_reproduces_partition_metrics() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("p");
    let e = dir.path().join("e");
    ok(&[
        "partition",
        "--grid",
        "6x5x4",
        "--k",
        "5",
        "--method",
        "graph-ml",
        "--out",
        p.to_str().unwrap(),
    ]);
    let file = p.join("partition.txt");
    let header = fs::read_to_string(&file).unwrap();
    assert!(header.starts_with("120 5\n"));
    ok(&[
        "evaluate",
        "--grid",
        "6x5x4",
        "--partition",
        file.to_str().unwrap(),
        "--out",
        e.to_str().unwrap(),
    ]);
    let quality = data_lines(&e.join("quality.csv"));
    assert_eq!(
        quality[0],
        "k,imbalance,edge_cut,comm_volume,comm_imbalance,messages"
    );
    let summary = fs::read_to_string(p.join("summary.txt")).unwrap();
    let cut = quality[1].split(',').nth(2).unwrap();
    assert!(summary
        .lines()
        .any(|l| l.starts_with("edge cut") && l.trim_end().ends_with(cut)));

    let res = gridpart(&[
        "evaluate",
        "--grid",
        "6x5x3",
        "--partition",
        file.to_str().unwrap(),
        "--out",
        e.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
}
