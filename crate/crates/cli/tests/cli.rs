use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qubo_tabu::bench::random_qubo;
use qubo_tabu::qubo::orlib::{read_orlib_file, write_orlib};

fn qts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qts"))
        .args(args)
        .output()
        .expect("qts runs")
}

fn instances(dir: &Path) -> String {
    let path = dir.join("bqp.txt");
    let qs: Vec<_> = (0..2).map(|s| random_qubo(24, 0.3, 20, s)).collect();
    fs::write(&path, write_orlib(&qs)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let trace = dir.path().join("t.csv");
    let out = qts(&[
        "solve",
        "--file",
        &file,
        "--instance",
        "1",
        "--tenure",
        "3",
        "--max-iters",
        "40",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["iterations"], 40);
    assert_eq!(v["best"].as_str().unwrap().len(), 24);
    let text = fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("iteration,f_ts,f_best,n_flipped,accepted"));
    assert_eq!(text.lines().count(), 42);
}

#[test]
fn solve_with_brute_force_sampler() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let out = qts(&[
        "solve",
        "--file",
        &file,
        "--algorithm",
        "brute-force",
        "--k",
        "8",
        "--tenure",
        "2",
        "--max-iters",
        "10",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let missing_k = qts(&["solve", "--file", &file, "--algorithm", "sa"]);
    assert_eq!(missing_k.status.code(), Some(2));
}

#[test]
fn bench_then_ecdf() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let results = dir.path().join("res");
    let out = qts(&[
        "bench",
        "--instance",
        &format!("{file}:0"),
        "--instance",
        &format!("{file}:1"),
        "--tenures",
        "2,4",
        "--runs",
        "2",
        "--max-iters",
        "30",
        "--out",
        results.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(results.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 8);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(results.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["spec"]["seeds"], serde_json::json!([0, 1]));

    // rerunning the manifest's spec reproduces the summary byte for byte
    let spec_path = dir.path().join("spec.json");
    fs::write(&spec_path, manifest["spec"].to_string()).unwrap();
    let again = dir.path().join("again");
    let out = qts(&[
        "bench",
        "--spec",
        spec_path.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        fs::read(results.join("summary.json")).unwrap(),
        fs::read(again.join("summary.json")).unwrap()
    );

    let curve = dir.path().join("curve.csv");
    let out = qts(&[
        "ecdf",
        "--results",
        results.to_str().unwrap(),
        "--targets",
        "5",
        "--out",
        curve.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&curve).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 31);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(curve.with_extension("json").exists());
}

#[test]
fn bench_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let results = dir.path().join("res");
    let missing = dir.path().join("nope.txt");
    let out = qts(&[
        "bench",
        "--instance",
        &format!("{file}:0"),
        "--instance",
        &format!("{}:0", missing.display()),
        "--max-iters",
        "5",
        "--out",
        results.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(results.join("summary.json").exists());

    let out = qts(&[
        "bench",
        "--instance",
        &format!("{file}:0"),
        "--runs",
        "0",
        "--out",
        results.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = qts(&["bench", "--out", results.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_writes_suite() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let out_path = dir.path().join("reduced.txt");
    let out = qts(&[
        "reduce",
        "--file",
        &file,
        "--per-instance",
        "3",
        "--size",
        "10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reduced = read_orlib_file(&out_path).unwrap();
    assert_eq!(reduced.len(), 6);
    assert!(reduced.iter().all(|q| q.n() == 10));
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_path.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(prov["instances"].as_array().unwrap().len(), 6);

    let out = qts(&[
        "reduce",
        "--file",
        &file,
        "--size",
        "30",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn energy_dist_exports() {
    let dir = tempfile::tempdir().unwrap();
    let file = instances(dir.path());
    let out_dir = dir.path().join("energy");
    let out = qts(&[
        "energy-dist",
        "--file",
        &file,
        "--k",
        "5",
        "--penalties",
        "0,2",
        "--draws",
        "100",
        "--max-evals",
        "20",
        "--shots",
        "20",
        "--sa-restarts",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let samples = fs::read_to_string(out_dir.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 200 + 4);
    let exact = fs::read_to_string(out_dir.join("exact.csv")).unwrap();
    assert_eq!(exact.lines().count(), 1 + 64);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("subproblem.json")).unwrap())
            .unwrap();
    assert_eq!(meta["selected"].as_array().unwrap().len(), 5);
}
