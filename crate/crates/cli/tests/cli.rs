use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_config(out: &Path) -> String {
    format!(
        r#"{{
            "id": "cli",
            "framework": "aol",
            "predictor": {{"arch_id": "linear"}},
            "script": {{"segments": [{{"kind": "stable", "n_samples": 15}}, {{"kind": "abrupt", "n_samples": 15}}]}},
            "pretrain": {{"epochs": 5}},
            "repeats": 2,
            "output_dir": {:?}
        }}"#,
        out.to_str().unwrap()
    )
}

#[test]
fn gen_stream_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let o = aol(&[
        "gen-stream",
        "--preset",
        "regime_revisit",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 300);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["sample_id"], 0);
    assert_eq!(first["observed"].as_array().unwrap().len(), 10);
}

#[test]
fn run_writes_results_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &small_config(&out));
    let o = aol(&["run", "--config", &cfg]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["overall"]["count"], 60);
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
    assert!(out.join("summary.json").exists());
}

#[test]
fn sweep_prints_one_line_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &small_config(&out));
    let o = aol(&[
        "sweep", "--config", &cfg, "--axis", "n_slaves", "--values", "1,2,5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 4);
    assert_eq!(
        fs::read_to_string(out.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );
}

#[test]
fn pretrain_writes_a_weight_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config(&dir.path().join("out")));
    let w = dir.path().join("w.aolw");
    let o = aol(&["pretrain", "--config", &cfg, "--out", w.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bytes = fs::read(&w).unwrap();
    assert_eq!(&bytes[..5], b"AOLW1");
    // header: 5 + 1 + "linear" + 3 * 4 + 8 + 8, then 380 parameters
    assert_eq!(bytes.len(), 5 + 1 + 6 + 12 + 8 + 8 + 380 * 8);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write_config(dir.path(), "{ nope");
    assert_eq!(aol(&["run", "--config", &bad_json]).status.code(), Some(2));

    let bad_arch = write_config(
        dir.path(),
        r#"{"framework": "aol", "predictor": {"arch_id": "gru"}, "script": "stationary"}"#,
    );
    assert_eq!(aol(&["run", "--config", &bad_arch]).status.code(), Some(2));

    let ok = write_config(dir.path(), &small_config(&dir.path().join("out")));
    let o = aol(&["sweep", "--config", &ok, "--axis", "depth", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let out = dir.path().join("s.jsonl");
    let o = aol(&[
        "gen-stream",
        "--preset",
        "nowhere",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(aol(&["run"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        aol(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let out = dir.path().join("no").join("such").join("s.jsonl");
    let o = aol(&[
        "gen-stream",
        "--preset",
        "stationary",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
