mod common;

use amrgen::amr::FIGURE_ONE_PENMAN;
use amrgen::corpus::read_records;
use amrgen::encoders::EncoderKind;
use amrgen::eval::Bucketing;
use amrgen::pipeline::{
    self, AnalyzeArgs, ContrastiveArgs, EvaluateArgs, GenerateArgs, PipelineError, PreprocessArgs, TrainArgs,
};
use amrgen::seq2seq::TrainConfig;
use rand::seq::index::sample;
use rand::Rng;
use std::fs;
use std::path::{Path, PathBuf};

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy").join(name)
}

fn tiny(model: EncoderKind) -> TrainConfig {
    TrainConfig {
        model,
        embedding_dim: 8,
        hidden_dim: 8,
        decoder_embedding_dim: 8,
        decoder_hidden_dim: 8,
        attention_dim: 8,
        batch_size: 5,
        epochs: 2,
        tgt_min_freq: 1,
        beam: 2,
        ..TrainConfig::default()
    }
}

fn both_buckets() -> Vec<(Bucketing, Vec<(usize, usize)>)> {
    [Bucketing::Reentrancies, Bucketing::MaxDependencyLength]
        .into_iter()
        .map(|b| (b, b.default_edges()))
        .collect()
}

#[test]
fn preprocess_figure_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fig.amr");
    fs::write(&input, format!("# ::id fig.1\n# ::snt He ate the pizza with his fingers.\n{FIGURE_ONE_PENMAN}\n")).unwrap();
    let out = dir.path().join("fig.jsonl");
    let stats = pipeline::preprocess(&PreprocessArgs {
        input: input.clone(),
        out: out.clone(),
        anonymize: true,
    })
    .unwrap();
    assert_eq!((stats.examples, stats.skipped), (1, 0));
    let records = read_records(&out).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r.id, "fig.1");
    assert_eq!((r.stats.reentrancy_count, r.stats.max_dependency_length), (1, 5));
    assert_eq!(r.tokens.len(), 9);
    assert_eq!(r.levi.nodes.len(), 8);
    assert_eq!(r.tree.nodes.iter().filter(|t| *t == "he").count(), 2);
    for suffix in ["vocab.src.tsv", "vocab.tgt.tsv", "stats.jsonl", "stats.json", "manifest.json"] {
        assert!(pipeline::sidecar(&out, suffix).exists(), "{suffix}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(pipeline::sidecar(&out, "manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn empty_directory_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = pipeline::preprocess(&PreprocessArgs {
        input: dir.path().to_path_buf(),
        out: dir.path().join("out.jsonl"),
        anonymize: true,
    })
    .unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}

#[test]
fn corrupted_blocks_are_counted() {
    let text = fs::read_to_string(toy("test.amr")).unwrap();
    let blocks: Vec<&str> = text.split("\n\n").filter(|b| b.contains('(')).collect();
    for seed in 0..5u64 {
        let mut r = common::rng(seed);
        let k = r.gen_range(1..blocks.len());
        let bad = sample(&mut r, blocks.len(), k).into_vec();
        let corrupted: Vec<String> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if !bad.contains(&i) {
                    b.to_string()
                } else if r.gen_bool(0.5) {
                    b.replace(')', "")
                } else {
                    b.lines().filter(|l| !l.starts_with("# ::snt")).collect::<Vec<_>>().join("\n")
                }
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.amr");
        fs::write(&input, corrupted.join("\n\n")).unwrap();
        let stats = pipeline::preprocess(&PreprocessArgs {
            input,
            out: dir.path().join("c.jsonl"),
            anonymize: true,
        })
        .unwrap();
        assert_eq!(stats.skipped, k, "seed {seed}");
        assert_eq!(stats.examples, blocks.len() - k, "seed {seed}");
    }
}

#[test]
fn analyze_identical_outputs_gives_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let refs = pipeline::references(&amrgen::corpus::load_examples(&toy("test.amr"), true).unwrap().0);
    let text: String = refs.iter().map(|r| format!("{}\n", r[..r.len() / 2].join(" "))).collect();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, &text).unwrap();
    fs::write(&b, &text).unwrap();
    let report = pipeline::analyze(&AnalyzeArgs {
        outputs: vec![a.clone(), b],
        names: Some(vec!["Seq".into(), "GCNSeq".into()]),
        references: toy("test.amr"),
        baseline: None,
        buckets: both_buckets(),
        anonymize: true,
        out: Some(dir.path().join("report.json")),
    })
    .unwrap();
    assert_eq!(report.systems.len(), 2);
    assert_eq!(report.systems[0].bleu, report.systems[1].bleu);
    assert_eq!(report.buckets.len(), 2);
    for table in &report.buckets {
        assert_eq!(table.baseline, "Seq");
        for row in &table.rows {
            for (name, delta) in &row.deltas {
                assert_eq!(name, "GCNSeq");
                assert!(delta.is_none_or(|d| d == 0.0), "{row:?}");
            }
        }
    }
    assert!(dir.path().join("report.json").exists());

    let err = pipeline::analyze(&AnalyzeArgs {
        outputs: vec![a],
        names: None,
        references: toy("test.amr"),
        baseline: None,
        buckets: both_buckets(),
        anonymize: true,
        out: None,
    })
    .unwrap_err();
    assert!(matches!(err, PipelineError::Config(_)), "{err}");
}

#[test]
fn every_model_name_trains() {
    for kind in EncoderKind::ALL {
        let config: TrainConfig = serde_json::from_value(serde_json::json!({ "model": kind.name() })).unwrap();
        assert_eq!(config.model, kind);
        let dir = tempfile::tempdir().unwrap();
        let summary = pipeline::train(&TrainArgs {
            config: TrainConfig { epochs: 1, ..tiny(kind) },
            train: toy("train.amr"),
            dev: toy("dev.amr"),
            out_dir: dir.path().to_path_buf(),
        })
        .unwrap_or_else(|e| panic!("{kind}: {e}"));
        assert_eq!(summary.epochs, 1);
        assert!(summary.checkpoint.exists());
    }
}

/// Preprocess, train two systems, decode, evaluate, analyze and run the
/// contrastive evaluation on the 50 dev and test examples.
#[test]
fn end_to_end_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let eval_dir = d.join("eval");
    fs::create_dir(&eval_dir).unwrap();
    fs::copy(toy("dev.amr"), eval_dir.join("dev.amr")).unwrap();
    fs::copy(toy("test.amr"), eval_dir.join("test.amr")).unwrap();
    let eval = d.join("eval.jsonl");
    let stats = pipeline::preprocess(&PreprocessArgs {
        input: eval_dir,
        out: eval.clone(),
        anonymize: true,
    })
    .unwrap();
    assert_eq!((stats.examples, stats.skipped), (50, 0));

    let mut outputs = Vec::new();
    for kind in [EncoderKind::Seq, EncoderKind::GCNSeq] {
        let run = d.join(kind.name());
        let summary = pipeline::train(&TrainArgs {
            config: tiny(kind),
            train: toy("train.amr"),
            dev: toy("dev.amr"),
            out_dir: run.clone(),
        })
        .unwrap();
        for f in ["train_log.jsonl", "train_timing.jsonl", "model.ckpt", "manifest.json"] {
            assert!(run.join(f).exists(), "{f}");
        }
        let out = run.join("test.txt");
        let gens = pipeline::generate(&GenerateArgs {
            model: summary.checkpoint.clone(),
            input: eval.clone(),
            out: Some(out.clone()),
            beam: None,
        })
        .unwrap();
        assert_eq!(gens.len(), 50);
        assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 50);

        let from_model = pipeline::evaluate(&EvaluateArgs {
            model: Some(summary.checkpoint.clone()),
            hypotheses: None,
            references: eval.clone(),
            beam: None,
            out: None,
        })
        .unwrap();
        let from_file = pipeline::evaluate(&EvaluateArgs {
            model: None,
            hypotheses: Some(out.clone()),
            references: eval.clone(),
            beam: None,
            out: Some(run.join("eval.json")),
        })
        .unwrap();
        assert_eq!(from_model.systems[0].bleu, from_file.systems[0].bleu);
        assert!((0.0..=100.0).contains(&from_file.systems[0].bleu));

        let result = pipeline::contrastive(&ContrastiveArgs {
            model: summary.checkpoint,
            references: toy("train.amr"),
            pairs: None,
            annotations: Some(toy("train.annotations.jsonl")),
            write_pairs: Some(run.join("pairs.jsonl")),
            out: None,
        })
        .unwrap();
        assert!(result.total > 0);
        assert_eq!(fs::read_to_string(run.join("pairs.jsonl")).unwrap().lines().count(), result.total + result.skipped);
        outputs.push(out);
    }

    let report = pipeline::analyze(&AnalyzeArgs {
        outputs,
        names: None,
        references: eval,
        baseline: None,
        buckets: both_buckets(),
        anonymize: true,
        out: Some(d.join("analysis.json")),
    })
    .unwrap();
    let reent = &report.buckets[0];
    assert_eq!(reent.total() + reent.unbucketed, 50);
    assert!(report.render().contains("Number of reentrancies"));
}
