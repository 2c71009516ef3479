use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use mtgat::model::AttentionExport;

fn mtgat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtgat"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn mtgat")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Ten regression samples whose text carries the sign of the label, plus a
/// one-step sample in every modality.
fn separable_dataset(dir: &Path) -> PathBuf {
    let mut samples = Vec::new();
    for i in 0..10 {
        let y: f64 = if i % 2 == 0 { 1.5 } else { -1.5 };
        let s = y.signum();
        samples.push(json!({
            "id": format!("s{i}"),
            "split": if i < 8 { "train" } else { "val" },
            "label": y,
            "audio": [[0.1 * i as f64, 0.0], [0.0, 0.2]],
            "video": [[0.3, -0.1]],
            "text": [[s, 0.5 * s, 0.0], [s, -0.5, 1.0], [0.2, s, s]],
        }));
    }
    samples.push(json!({
        "id": "tiny",
        "split": "test",
        "label": 0.5,
        "audio": [[1.0, 2.0]],
        "video": [[0.0, 1.0]],
        "text": [[1.0, 0.0, -1.0]],
    }));
    let path = dir.join("sep.json");
    let doc = json!({
        "task": "regression",
        "dims": {"audio": 2, "video": 2, "text": 3},
        "samples": samples,
    });
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

const SMALL: &[&str] = &["--d-emb", "8", "--heads", "2", "--layers", "2", "--head-hidden", "8"];

fn train_small(dir: &Path, data: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("run");
    let mut args = vec!["train", "--dataset", p(data), "--out", p(&out), "--seed", "3"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    let o = mtgat(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for f in [&a, &b] {
        assert_eq!(code(&mtgat(&["gen", "--samples", "30", "--seed", "5", "--out", p(f)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    mtgat(&["gen", "--samples", "30", "--seed", "6", "--out", p(&c)]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn gen_rejects_bad_specs() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("x.json");
    assert_eq!(code(&mtgat(&["gen", "--samples", "0", "--out", p(&f)])), 1);
    assert_eq!(code(&mtgat(&["gen", "--fractions", "0.5,0.5,0.5", "--out", p(&f)])), 1);
    assert_eq!(code(&mtgat(&["gen", "--dims", "4,4", "--out", p(&f)])), 1);
    assert!(!f.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&mtgat(&[])), 1);
    assert_eq!(code(&mtgat(&["frobnicate"])), 1);
    assert_eq!(code(&mtgat(&["train", "--epochs", "many"])), 1);
    assert_eq!(code(&mtgat(&["--help"])), 0);
}

#[test]
fn inspect_graph_of_single_step_sample() {
    let dir = TempDir::new().unwrap();
    let data = separable_dataset(dir.path());
    let o = mtgat(&["inspect-graph", "--dataset", p(&data), "--sample-id", "tiny"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 9);
    assert!(edges.iter().all(|e| e["tau"] == "present"));

    let o = mtgat(&["inspect-graph", "--dataset", p(&data), "--sample-id", "s0"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 36);

    let o = mtgat(&["inspect-graph", "--dataset", p(&data), "--sample-id", "nope"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}

#[test]
fn missing_and_malformed_datasets_are_data_errors() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let o = mtgat(&["train", "--dataset", p(&missing), "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"task":"regression","dims":{"audio":1,"video":1,"text":1},
            "samples":[{"id":"a","split":"train","label":1.0,"audio":[[1.0]],"video":[],"text":[[1.0]]}]}"#,
    )
    .unwrap();
    let o = mtgat(&["inspect-graph", "--dataset", p(&bad), "--sample-id", "a"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn train_writes_artifacts_and_eval_overfits() {
    let dir = TempDir::new().unwrap();
    let data = separable_dataset(dir.path());
    let out = train_small(dir.path(), &data, &["--epochs", "60", "--batch-size", "2", "--lr", "0.01"]);
    for f in ["config.json", "params.json", "history.csv", "metrics.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let history = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_loss,val_loss,lr,halved\n"));
    assert_eq!(history.lines().count(), 61);
    let metrics: Value = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["split"], "val");
    assert_eq!(metrics["task"], "regression");

    let params = out.join("params.json");
    let o = mtgat(&["eval", "--params", p(&params), "--dataset", p(&data), "--split", "train"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m["samples"], 8);
    assert_eq!(m["acc2"], 1.0, "{m}");
}

#[test]
fn eval_rejects_corrupt_params_and_empty_splits() {
    let dir = TempDir::new().unwrap();
    let data = separable_dataset(dir.path());
    let out = train_small(dir.path(), &data, &["--epochs", "1"]);
    let params = out.join("params.json");

    let o = mtgat(&["eval", "--params", p(&params), "--dataset", p(&data), "--split", "test"]);
    assert_eq!(code(&o), 0);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    for s in doc["samples"].as_array_mut().unwrap() {
        s["split"] = json!("train");
    }
    let train_only = dir.path().join("train-only.json");
    std::fs::write(&train_only, doc.to_string()).unwrap();
    let o = mtgat(&["eval", "--params", p(&params), "--dataset", p(&train_only), "--split", "val"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("val"));

    let text = std::fs::read_to_string(&params).unwrap();
    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, &text[..text.len() / 2]).unwrap();
    let o = mtgat(&["eval", "--params", p(&corrupt), "--dataset", p(&data)]);
    assert_eq!(code(&o), 2);

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["params"]["head"]["out"]["weight"]["shape"] = json!([3, 1]);
    std::fs::write(&corrupt, v.to_string()).unwrap();
    let o = mtgat(&["eval", "--params", p(&corrupt), "--dataset", p(&data)]);
    assert_ne!(code(&o), 0);
}

#[test]
fn params_prints_breakdown() {
    let dir = TempDir::new().unwrap();
    let json_out = dir.path().join("p.json");
    let o = mtgat(&["params", "--out", p(&json_out)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with("125057"), "{text}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(v["total"], 125057);
    assert_eq!(v["ffn"], 26368);
    assert_eq!(v["transforms"], 73728);
    assert_eq!(v["attention"], 20736);
    assert_eq!(v["head"], 4225);

    let o = mtgat(&[
        "params", "--input-dims", "2,2,2", "--d-emb", "4", "--heads", "2", "--layers", "1",
        "--head-hidden", "0", "--edge-type-mode", "untyped1",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    // ffn 3 * (2*4 + 4), transforms 3 * 4*4, attention 2 heads * 2*2, head 4 + 1
    assert!(text.lines().last().unwrap().ends_with(&(36 + 48 + 8 + 5).to_string()), "{text}");

    let o = mtgat(&["params", "--heads", "3"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn export_attention_is_normalized_and_nested() {
    let dir = TempDir::new().unwrap();
    let data = separable_dataset(dir.path());
    let out = train_small(dir.path(), &data, &["--epochs", "2", "--keep-percent", "70"]);
    let params = out.join("params.json");
    let o = mtgat(&["export-attn", "--params", p(&params), "--dataset", p(&data), "--sample-id", "s3"]);
    assert_eq!(code(&o), 0);
    let export: AttentionExport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(export.sample_id, "s3");
    assert_eq!(export.layers.len(), 2);
    assert_eq!(export.layers[0].edges.len(), 36);
    assert_eq!(export.layers[1].edges.len(), 36 - 10);
    for layer in &export.layers {
        let mut sums = std::collections::BTreeMap::<(usize, usize), f64>::new();
        for e in &layer.edges {
            for (h, a) in e.alpha.iter().enumerate() {
                *sums.entry((e.dst, h)).or_default() += a;
            }
        }
        assert!(sums.values().all(|s| (s - 1.0).abs() < 1e-9));
    }
    let next: Vec<(usize, usize)> = export.layers[1].edges.iter().map(|e| (e.src, e.dst)).collect();
    let first: Vec<(usize, usize)> = export.layers[0].edges.iter().map(|e| (e.src, e.dst)).collect();
    assert!(next.iter().all(|e| first.contains(e)));

    let dot = dir.path().join("a.dot");
    let o = mtgat(&[
        "export-attn", "--params", p(&params), "--dataset", p(&data), "--sample-id", "s3",
        "--format", "dot", "--out", p(&dot),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph attention {"));
    assert!(text.trim_end().ends_with('}'));
    assert_eq!(text.matches("->").count(), 36 + 26);
    assert_eq!(text.matches("subgraph cluster_layer").count(), 2);
}

#[test]
fn ablate_writes_one_row_per_setting_and_seed() {
    let dir = TempDir::new().unwrap();
    let data = separable_dataset(dir.path());
    let out = dir.path().join("abl");
    let mut args = vec![
        "ablate", "--dataset", p(&data), "--out", p(&out), "--families", "edge_types",
        "--modes", "full27,untyped1", "--seed", "1,2", "--epochs", "1",
    ];
    args.extend_from_slice(SMALL);
    let o = mtgat(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("ablation.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[0].starts_with("family,setting,seed"));
    assert!(out.join("config.json").is_file());

    let out = dir.path().join("abl-mod");
    let mut args = vec![
        "ablate", "--dataset", p(&data), "--out", p(&out), "--families", "modalities",
        "--modes", "A,AT,AVT", "--seed", "1", "--epochs", "1",
    ];
    args.extend_from_slice(SMALL);
    assert_eq!(code(&mtgat(&args)), 0);
    let csv = std::fs::read_to_string(out.join("ablation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);

    let args = ["ablate", "--dataset", p(&data), "--out", p(&out), "--modes", "bogus"];
    assert_eq!(code(&mtgat(&args)), 1);
}
