use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_overlap-bound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn close(v: &Value, expected: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() < 1e-12
}

#[test]
fn bound_on_identical_and_worked_files() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "x,y\n1,0\n0.5,0.5\n-1,2\n");
    let report = ok_json(&["bound", s(&a), s(&a)]);
    assert_eq!(report["clampedBound"], 1.0);

    let pos = write(&dir, "pos.csv", "0.2\n1.0\n");
    let neg = write(&dir, "neg.csv", "1.0\n");
    let report = ok_json(&["bound", s(&pos), s(&neg)]);
    assert!(close(&report["rawBound"], 0.6));
    assert_eq!(report["perG"].as_array().unwrap().len(), 50);
    let best = report["bestG"].as_u64().unwrap() as usize;
    assert!(close(&report["perG"][best]["rA"], 0.2));
    let report = ok_json(&["bound", s(&pos), s(&neg), "--k", "2", "--norm", "l1"]);
    assert!(close(&report["rawBound"], 0.6));
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.csv", "1,2\n3,4\n");
    let bad = write(&dir, "bad.csv", "1,2\n3,x\n");
    let out = run(&["bound", s(&good), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.csv:2:2"), "{msg}");

    let other = write(&dir, "other.csv", "1\n2\n");
    let out = run(&["bound", s(&good), s(&other)]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("good.csv") && msg.contains("other.csv"),
        "{msg}"
    );

    assert_eq!(
        run(&["bound", s(&good), s(&good), "--k", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["bound", s(&good), s(&good), "--norm", "l7"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fit_score_classify_round_trip() {
    let dir = TempDir::new().unwrap();
    let train = write(&dir, "train.csv", "0,0\n1,0\n1,0\n0,2\n-1,-1\n");
    let model = dir.path().join("model.json");
    let out = run(&["fit", s(&train), "--k", "10", "--out", s(&model)]);
    assert!(out.status.success());

    let scores_path = dir.path().join("scores.csv");
    let summary = ok_json(&["score", s(&model), s(&train), "--out", s(&scores_path)]);
    assert_eq!(summary["n"], 5);
    let csv = fs::read_to_string(&scores_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("row_index,score,clamped"));
    let scores: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(scores.len(), 5);
    assert!(scores.iter().all(|&x| x <= 1.0));
    // The duplicated point (1, 0) scores the maximum.
    let max = scores.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(scores[1], max);
    assert_eq!(scores[2], max);

    let out = run(&["classify", s(&model), s(&train)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", s(&model), s(&train), "--threshold", "0.7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("row_index,score,clamped,verdict\n"));
    assert!(text.contains("in-class") || text.contains("out-class"));
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(
        summary["nInClass"].as_u64().unwrap() + summary["nOutClass"].as_u64().unwrap(),
        5
    );

    let out = run(&[
        "score",
        s(&model),
        s(&train),
        "--iterative",
        "--train",
        s(&train),
        "--k2",
        "20",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("row_index,score,clamped,iterative\n"));
    assert_eq!(text.lines().count(), 6);

    let wrong_dim = write(&dir, "q.csv", "1,2,3\n");
    assert_eq!(
        run(&["score", s(&model), s(&wrong_dim)]).status.code(),
        Some(3)
    );
}

#[test]
fn missing_model_field_is_a_format_error() {
    let dir = TempDir::new().unwrap();
    let model = write(
        &dir,
        "model.json",
        r#"{"version": 1, "norm": "l2", "k": 1, "dimension": 1, "mean": [0.0], "rFit": 1.0, "gMaxNorms": [1.0], "degenerate": false}"#,
    );
    let q = write(&dir, "q.csv", "0.5\n");
    let out = run(&["score", s(&model), s(&q)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("model format v1") && msg.contains("gMeans"),
        "{msg}"
    );
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for round in 0..2 {
        let data = dir.path().join(format!("data{round}.csv"));
        let model = dir.path().join(format!("model{round}.json"));
        assert!(run(&[
            "synth",
            "--n",
            "200",
            "--dim",
            "3",
            "--seed",
            "99",
            "--out",
            s(&data)
        ])
        .status
        .success());
        assert!(run(&["fit", s(&data), "--out", s(&model)]).status.success());
        let scored = run(&["score", s(&model), s(&data)]);
        assert!(scored.status.success());
        outputs.push((
            fs::read(&data).unwrap(),
            fs::read(&model).unwrap(),
            scored.stdout,
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn model_file_size_is_independent_of_n() {
    let dir = TempDir::new().unwrap();
    let mut sizes = Vec::new();
    for n in ["10", "100000"] {
        let data = dir.path().join(format!("d{n}.bin"));
        let model = dir.path().join(format!("m{n}.json"));
        assert!(run(&[
            "synth",
            "--n",
            n,
            "--dim",
            "16",
            "--seed",
            "1",
            "--format",
            "bin",
            "--out",
            s(&data)
        ])
        .status
        .success());
        assert!(run(&["fit", s(&data), "--out", s(&model)]).status.success());
        sizes.push(fs::metadata(&model).unwrap().len());
    }
    assert_eq!(sizes[0], sizes[1]);
}

#[test]
fn shift_sweep_on_worked_mixture() {
    let dir = TempDir::new().unwrap();
    let clean = write(&dir, "clean.csv", "0.2\n1.0\n");
    let poisoned = write(&dir, "poisoned.csv", "1.0\n");
    let doc = ok_json(&["shift", s(&clean), s(&poisoned), "--p", "0.9"]);
    let sigma = doc["sigma"].as_array().unwrap();
    let ceiling = doc["ceiling"].as_array().unwrap();
    assert_eq!(sigma.len(), 11);
    assert_eq!(sigma[0], 0.0);
    assert_eq!(sigma[10], 1.0);
    assert!(close(&ceiling[0], 0.54));
    assert!(close(&ceiling[10], 0.9));
    assert_eq!(doc["norm"], "l2");
    assert_eq!(doc["k"], 50);
    assert!(doc.get("measured").is_none());

    let doc = ok_json(&[
        "shift",
        s(&clean),
        s(&poisoned),
        "--p",
        "0.9",
        "--sigma",
        "1,0.5",
        "--simulate",
    ]);
    assert_eq!(doc["sigma"], serde_json::json!([0.5, 1.0]));
    assert_eq!(doc["measured"].as_array().unwrap().len(), 2);
    assert_eq!(
        run(&["shift", s(&clean), s(&poisoned), "--sigma", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_metrics_and_single_class() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "scores.csv",
        "score,label\n0.9,-\n0.2,-\n0.8,+\n0.1,+\n",
    );
    let doc = ok_json(&["eval", s(&data)]);
    assert_eq!(doc["auroc"], 0.25);
    assert_eq!(doc["aupr"], 0.5);
    assert_eq!(doc["n_pos"], 2);
    assert_eq!(doc["n_neg"], 2);
    assert!(doc.get("tpr95").is_some());

    let scores = write(&dir, "s.csv", "0.1\n0.2\n0.8\n0.9\n");
    let labels = write(&dir, "l.csv", "0\n0\n1\n1\n");
    let doc = ok_json(&["eval", s(&scores), s(&labels)]);
    assert_eq!(doc["auroc"], 1.0);
    assert_eq!(doc["tpr95"], 1.0);

    let single = write(&dir, "one.csv", "0.1,1\n0.3,1\n");
    assert_eq!(run(&["eval", s(&single)]).status.code(), Some(4));
}

#[test]
fn oracle_on_identical_and_worked_distributions() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "p.json",
        r#"{"dimension": 1, "points": [[0.2], [1.0]], "masses": [0.5, 0.5]}"#,
    );
    let q = write(
        &dir,
        "q.json",
        r#"{"dimension": 1, "points": [[1.0]], "masses": [1.0]}"#,
    );
    let doc = ok_json(&["oracle", s(&p), s(&p)]);
    assert_eq!(doc["eta"], 1.0);
    assert_eq!(doc["delta"], 0.0);
    let doc = ok_json(&["oracle", s(&p), s(&q)]);
    assert_eq!(doc["eta"], 0.5);
    assert_eq!(doc["delta"], 0.5);
    assert!(close(&doc["corollaryRhsExact"], 0.6));
    assert_eq!(doc["deltaA"], 0.25);
    assert!(close(&doc["theoremRhsDomain"], 0.6));

    let bad = write(
        &dir,
        "bad.json",
        r#"{"dimension": 1, "points": [[1.0]], "masses": [0.4]}"#,
    );
    assert_eq!(run(&["oracle", s(&bad), s(&q)]).status.code(), Some(2));
}
