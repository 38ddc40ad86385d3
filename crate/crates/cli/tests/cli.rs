use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy").join(name)
}

fn amrgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amrgen"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TINY: &str = r#"{"embedding_dim": 8, "hidden_dim": 8, "decoder_embedding_dim": 8,
"decoder_hidden_dim": 8, "attention_dim": 8, "batch_size": 5, "tgt_min_freq": 1, "beam": 2}"#;

#[test]
fn help_lists_every_command() {
    let out = amrgen(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["preprocess", "train", "generate", "evaluate", "analyze", "contrastive"] {
        assert!(text.contains(cmd), "{cmd}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = amrgen(&["preprocess", path(&toy("train.amr")), "--out", path(&d.join("train.jsonl"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["examples"], 10);

    let empty = d.join("empty");
    fs::create_dir(&empty).unwrap();
    let out = amrgen(&["preprocess", path(&empty), "--out", path(&d.join("x.jsonl"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let bad = d.join("bad.json");
    fs::write(&bad, r#"{"lr_decay": 1.5}"#).unwrap();
    let (train, dev) = (toy("train.amr"), toy("dev.amr"));
    let args = ["train", "--train", path(&train), "--dev", path(&dev), "--out", path(d), "--config", path(&bad)];
    assert_eq!(amrgen(&args).status.code(), Some(2));

    let out = amrgen(&["train", "--model", "Transformer", "--train", "a", "--dev", "b", "--out", "c"]);
    assert_eq!(out.status.code(), Some(2));

    let junk = d.join("junk.ckpt");
    fs::write(&junk, b"not a checkpoint").unwrap();
    let out = amrgen(&["generate", "--checkpoint", path(&junk), path(&toy("dev.amr"))]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn train_generate_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = d.join("tiny.json");
    fs::write(&config, TINY).unwrap();
    let run = d.join("run");
    let out = amrgen(&[
        "train", "--train", path(&toy("train.amr")), "--dev", path(&toy("dev.amr")), "--out", path(&run),
        "--config", path(&config), "--model", "GCNSeq", "--epochs", "1", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["epochs"], 1);
    let ckpt = run.join("model.ckpt");

    let out = amrgen(&["generate", "--checkpoint", path(&ckpt), path(&toy("dev.amr"))]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 10);

    let hyps = d.join("dev.txt");
    let out = amrgen(&["generate", "--checkpoint", path(&ckpt), path(&toy("dev.amr")), "--out", path(&hyps), "--beam", "1"]);
    assert!(out.status.success());
    let out = amrgen(&["evaluate", "--hypotheses", path(&hyps), "--references", path(&toy("dev.amr"))]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("BLEU"));

    let out = amrgen(&[
        "analyze", path(&hyps), path(&hyps), "--references", path(&toy("dev.amr")), "--names", "Seq,GCNSeq",
        "--buckets", "reentrancies=0,1-5,6-20",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = amrgen(&[
        "contrastive", "--checkpoint", path(&ckpt), "--references", path(&toy("train.amr")), "--annotations",
        path(&toy("train.annotations.jsonl")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
