use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gradcompass"));
    cmd.env_remove("GRADCOMPASS_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert_eq!(code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("run.json")).unwrap()).unwrap()
}

fn outputs(dir: &Path) -> Vec<String> {
    manifest(dir)["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

fn assert_outputs_exist(dir: &Path) {
    for f in outputs(dir) {
        assert!(dir.join(&f).is_file(), "missing {f}");
    }
}

fn assert_same_files(a: &Path, b: &Path, files: &[&str]) {
    for f in files {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn idx_images(pixels: &[u8], count: u32, side: u32) -> Vec<u8> {
    let mut v = Vec::new();
    for x in [0x0803u32, count, side, side] {
        v.extend_from_slice(&x.to_be_bytes());
    }
    v.extend_from_slice(pixels);
    v
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut v = Vec::new();
    v.extend_from_slice(&0x0801u32.to_be_bytes());
    v.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    v.extend_from_slice(labels);
    v
}

/// 4x4 images whose label is marked by one bright pixel over fixed noise.
fn write_toy_mnist(dir: &Path, n_train: usize, n_valid: usize) -> PathBuf {
    let make = |n: usize| {
        let labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
        let px: Vec<u8> = (0..n)
            .flat_map(|i| (0..16).map(move |p| if p == i % 10 { 255 } else { ((i * 7 + p * 13) % 40) as u8 }))
            .collect();
        (idx_images(&px, n as u32, 4), idx_labels(&labels))
    };
    let (ti, tl) = make(n_train);
    let (vi, vl) = make(n_valid);
    std::fs::write(dir.join("train-images-idx3-ubyte"), ti).unwrap();
    std::fs::write(dir.join("train-labels-idx1-ubyte"), tl).unwrap();
    std::fs::write(dir.join("t10k-images-idx3-ubyte"), vi).unwrap();
    std::fs::write(dir.join("t10k-labels-idx1-ubyte"), vl).unwrap();
    dir.to_path_buf()
}

#[test]
fn vmf_bias_is_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["vmf-bias", "--dims", "50,400", "--samples", "20,60", "--trials", "3", "--seed", "5", "--out", path_str(dir)]);
    }
    assert_same_files(&a, &b, &["trials.csv", "summary.csv"]);
    assert_outputs_exist(&a);
    let m = manifest(&a);
    assert_eq!(m["subcommand"], "vmf-bias");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["flags"]["trials"], 3);
    let trials = std::fs::read_to_string(a.join("trials.csv")).unwrap();
    assert!(trials.starts_with("d,n,trial,kappa_hat\n"));
    assert_eq!(trials.lines().count(), 1 + 2 * 2 * 3);
    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(summary.starts_with("d,n,mean,std\n"));
}

#[test]
fn different_seeds_give_different_draws() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["vmf-bias", "--dims", "50", "--samples", "20", "--trials", "2", "--seed", "1", "--out", path_str(&a)]);
    ok(&["vmf-bias", "--dims", "50", "--samples", "20", "--trials", "2", "--seed", "2", "--out", path_str(&b)]);
    assert_ne!(std::fs::read(a.join("trials.csv")).unwrap(), std::fs::read(b.join("trials.csv")).unwrap());
}

#[test]
fn angle_output_ignores_thread_count() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = bin()
            .args(["angle-asymptotics", "--dim", "300", "--pairs", "500", "--seed", "9", "--out", path_str(dir)])
            .env("GRADCOMPASS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
    }
    assert_same_files(&a, &b, &["angles.csv", "summary.json"]);
    assert_outputs_exist(&a);
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert!((s["mean_deg"].as_f64().unwrap() - 90.0).abs() < 1.0);
}

#[test]
fn exact_norm_mode_reports_no_violations() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["norm-stochasticity", "--mode", "exact", "--instances", "5", "--max-n", "7", "--max-d", "4", "--out", path_str(dir)]);
    }
    assert_same_files(&a, &b, &["exact.csv"]);
    let m = manifest(&a);
    assert_eq!(m["summary"]["violations"], 0);
    assert!(m["summary"]["worst_closed_form_rel_err"].as_f64().unwrap() < 1e-12);
}

#[test]
fn fnn_norm_mode_sweeps_batch_sizes() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    std::fs::create_dir(&data).unwrap();
    write_toy_mnist(&data, 60, 20);
    let out = tmp.path().join("out");
    ok(&[
        "norm-stochasticity", "--mode", "fnn", "--mnist-dir", path_str(&data), "--batch-sizes", "4,16", "--n-s", "6",
        "--inits", "2", "--out", path_str(&out),
    ]);
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("init,m,gs,gns,kappa_hat,flags\n"));
    assert_eq!(sweep.lines().count(), 1 + 2 * 2);
    assert_eq!(manifest(&out)["summary"]["slopes"].as_array().unwrap().len(), 2);
}

#[test]
fn geometry_suites_write_their_tables() {
    let tmp = TempDir::new().unwrap();
    for (suite, file) in [("lemma2", "lemma2.csv"), ("theorem3", "theorem3.csv"), ("corollary1", "sgd_trace.csv")] {
        let (a, b) = (tmp.path().join(format!("{suite}-a")), tmp.path().join(format!("{suite}-b")));
        for dir in [&a, &b] {
            ok(&["geometry", "--suite", suite, "--trials", "10", "--epochs", "5", "--out", path_str(dir)]);
        }
        assert_same_files(&a, &b, &[file]);
        assert_outputs_exist(&a);
    }
    let m = manifest(&tmp.path().join("theorem3-a"));
    assert_eq!(m["summary"]["decreased"].as_u64().unwrap() + m["summary"]["skipped_colinear"].as_u64().unwrap(), 10);
    let c = manifest(&tmp.path().join("corollary1-a"));
    assert_eq!(c["summary"]["alignment_violations"], 0);
    assert!(c["outputs"].as_array().unwrap().iter().any(|v| v == "sgd_manifest.json"));
}

#[test]
fn train_then_report_round_trip() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    std::fs::create_dir(&data).unwrap();
    write_toy_mnist(&data, 80, 20);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&[
            "train", "--mnist-dir", path_str(&data), "--epochs", "12", "--batch-size", "8", "--lr", "0.05",
            "--train-subset", "80", "--n-s", "6", "--angle-epochs", "0,12", "--out", path_str(dir),
        ]);
    }
    assert_same_files(&a, &b, &["metrics.csv", "angles_epoch0.csv", "angles_epoch12.csv"]);
    assert_outputs_exist(&a);
    let metrics = std::fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("epoch,train_loss,valid_loss,gs,gns,kappa_hat,flags\n"));
    assert_eq!(metrics.lines().count(), 1 + 13);

    let rep = tmp.path().join("report");
    ok(&["report", "--metrics", path_str(&a.join("metrics.csv")), "--out", path_str(&rep)]);
    assert_outputs_exist(&rep);
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(rep.join("correlation.json")).unwrap()).unwrap();
    assert_eq!(r["rows"], 13);
    assert!(manifest(&rep)["seed"].is_null());
}

#[test]
fn usage_errors_exit_with_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let o = path_str(&out);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["vmf-bias", "--trials", "abc"])), 2);
    assert_eq!(code(&run(&["angle-asymptotics", "--pairs", "50", "--out", o])), 2);
    assert_eq!(code(&run(&["geometry", "--suite", "theorem3", "--xi-fraction", "1.5", "--out", o])), 2);
    assert_eq!(code(&run(&["norm-stochasticity", "--max-n", "40", "--instances", "50", "--out", o])), 2);
    let threads = bin().args(["vmf-bias", "--out", o]).env("GRADCOMPASS_THREADS", "0").output().unwrap();
    assert_eq!(code(&threads), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn data_errors_exit_with_3() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let o = path_str(&out);
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&run(&["train", "--mnist-dir", path_str(&empty), "--out", o])), 3);

    let bad = tmp.path().join("bad");
    std::fs::create_dir(&bad).unwrap();
    write_toy_mnist(&bad, 40, 10);
    std::fs::write(bad.join("train-images-idx3-ubyte"), [0u8, 0, 8, 1, 0, 0, 0, 1]).unwrap();
    assert_eq!(code(&run(&["train", "--mnist-dir", path_str(&bad), "--out", o])), 3);

    let short = tmp.path().join("short.csv");
    std::fs::write(&short, "epoch,train_loss,valid_loss,gs,gns,kappa_hat,flags\n0,1.0,,0.5,2.0,10.0,\n").unwrap();
    assert_eq!(code(&run(&["report", "--metrics", path_str(&short), "--out", o])), 3);
    assert_eq!(code(&run(&["report", "--metrics", path_str(&tmp.path().join("none.csv")), "--out", o])), 3);
}
