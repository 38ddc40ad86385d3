//! The end-to-end commands behind the CLI. Every command that writes output
//! also writes a run manifest next to it.

use crate::amr::{compute_stats, GraphStats};
use crate::corpus::{self, corpus_files, load_examples, read_corpus, CorpusError, Record};
use crate::encoders::EncodeError;
use crate::eval::{
    bucket_label, bucket_report, contrastive_eval, corpus_bleu, make_contrastive_pairs, sentence_bleu, Annotation,
    Bucketing, ContrastivePair, ContrastiveResult, EvalError, EvalReport, SystemScores, SystemSummary,
};
use crate::seq2seq::{self, Checkpoint, Example, Model, Seq2SeqError, StopReason, TrainConfig, TrainingMeta};
use crate::transforms::{anonymize_sentence, deanonymize, AnonymizationPolicy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SENTENCE_METRIC: &str = "sBLEU";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Data(_) => 3,
            PipelineError::Numeric(_) => 4,
        }
    }
}

impl From<CorpusError> for PipelineError {
    fn from(e: CorpusError) -> Self {
        PipelineError::Data(e.to_string())
    }
}

impl From<Seq2SeqError> for PipelineError {
    fn from(e: Seq2SeqError) -> Self {
        let msg = e.to_string();
        match e {
            Seq2SeqError::Config(_) => PipelineError::Config(msg),
            Seq2SeqError::Divergent { .. } | Seq2SeqError::Tensor(_) => PipelineError::Numeric(msg),
            Seq2SeqError::Encode(EncodeError::Tensor(_)) => PipelineError::Numeric(msg),
            Seq2SeqError::Encode(EncodeError::Config(_) | EncodeError::ReprMismatch { .. }) => PipelineError::Config(msg),
            _ => PipelineError::Data(msg),
        }
    }
}

impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> Self {
        let msg = e.to_string();
        match e {
            EvalError::TooFewSystems(_) | EvalError::UnknownSystem(_) => PipelineError::Config(msg),
            _ => PipelineError::Data(msg),
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Data(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    fs::write(path, contents).map_err(io(path))
}

fn jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("serializable");
        out.push(b'\n');
    }
    out
}

/// Reads a JSON run configuration; unknown fields are rejected.
pub fn load_config(path: &Path) -> Result<TrainConfig, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Reproducibility record of one command run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<String>,
    pub versions: BTreeMap<String, String>,
}

/// sha256 of every file under each input path, in path order.
pub fn hash_inputs(paths: &[&Path]) -> Result<Vec<InputHash>, PipelineError> {
    let mut out = Vec::new();
    for p in paths {
        for file in corpus_files(p)? {
            let bytes = fs::read(&file).map_err(io(&file))?;
            out.push(InputHash {
                path: file.display().to_string(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            });
        }
    }
    Ok(out)
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        inputs: &[&Path],
        outputs: &[&Path],
    ) -> Result<Self, PipelineError> {
        let mut versions = BTreeMap::new();
        versions.insert("amrgen".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("checkpoint_format".to_string(), seq2seq::CHECKPOINT_FORMAT_VERSION.to_string());
        Ok(RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs: hash_inputs(inputs)?,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            versions,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}

/// `train.jsonl` → `train.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketCount {
    pub bucket: String,
    pub count: usize,
}

/// Reentrancy and dependency-length histograms of a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub examples: usize,
    pub skipped: usize,
    pub reentrancies: Vec<BucketCount>,
    pub max_dep_len: Vec<BucketCount>,
    /// Dependency lengths over reentrancy-free examples only.
    pub max_dep_len_reentrancy_free: Vec<BucketCount>,
}

fn histogram(values: impl Iterator<Item = usize>, edges: &[(usize, usize)]) -> Vec<BucketCount> {
    let mut counts = vec![0; edges.len() + 1];
    for v in values {
        let b = edges.iter().position(|&(lo, hi)| lo <= v && v <= hi).unwrap_or(edges.len());
        counts[b] += 1;
    }
    let mut out: Vec<BucketCount> = edges
        .iter()
        .zip(&counts)
        .map(|(&e, &count)| BucketCount {
            bucket: bucket_label(e),
            count,
        })
        .collect();
    out.push(BucketCount {
        bucket: "other".into(),
        count: counts[edges.len()],
    });
    out
}

impl CorpusStats {
    pub fn new(stats: &[GraphStats], skipped: usize) -> Self {
        let r = Bucketing::Reentrancies.default_edges();
        let d = Bucketing::MaxDependencyLength.default_edges();
        CorpusStats {
            examples: stats.len(),
            skipped,
            reentrancies: histogram(stats.iter().map(|s| s.reentrancy_count), &r),
            max_dep_len: histogram(stats.iter().map(|s| s.max_dependency_length), &d),
            max_dep_len_reentrancy_free: histogram(
                stats.iter().filter(|s| s.reentrancy_count == 0).map(|s| s.max_dependency_length),
                &d,
            ),
        }
    }
}

/// Per-example stats line `{id, reentrancies, max_dep_len, nodes, edges}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsLine {
    pub id: String,
    pub reentrancies: usize,
    pub max_dep_len: usize,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone)]
pub struct PreprocessArgs {
    pub input: PathBuf,
    /// Preprocessed JSONL path; vocabularies, stats and the manifest are
    /// written next to it.
    pub out: PathBuf,
    pub anonymize: bool,
}

fn vocab_tsv<'a>(tokens: impl Iterator<Item = &'a String>) -> Vec<u8> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut entries: Vec<(&str, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut out = Vec::new();
    for (t, c) in entries {
        let _ = writeln!(out, "{t}\t{c}");
    }
    out
}

/// Parses a PENMAN file or directory into the preprocessed JSONL format
/// plus source/target vocabularies and corpus statistics.
pub fn preprocess(args: &PreprocessArgs) -> Result<CorpusStats, PipelineError> {
    let corpus = read_corpus(&args.input)?;
    if corpus.entries.is_empty() {
        return Err(PipelineError::Data(format!(
            "{}: no usable examples ({} blocks skipped)",
            args.input.display(),
            corpus.skipped.len()
        )));
    }
    let policy = AnonymizationPolicy::default();
    let records: Vec<Record> = corpus
        .entries
        .iter()
        .map(|e| Record::new(e, args.anonymize.then_some(&policy)))
        .collect();
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    corpus::write_records(&args.out, &records)?;

    let src = sidecar(&args.out, "vocab.src.tsv");
    let tgt = sidecar(&args.out, "vocab.tgt.tsv");
    write_file(&src, &vocab_tsv(records.iter().flat_map(|r| &r.tokens)))?;
    write_file(&tgt, &vocab_tsv(records.iter().flat_map(|r| &r.sentence)))?;

    let lines: Vec<StatsLine> = records
        .iter()
        .map(|r| StatsLine {
            id: r.id.clone(),
            reentrancies: r.stats.reentrancy_count,
            max_dep_len: r.stats.max_dependency_length,
            nodes: r.stats.node_count,
            edges: r.stats.edge_count,
        })
        .collect();
    let stats_lines = sidecar(&args.out, "stats.jsonl");
    write_file(&stats_lines, &jsonl(&lines))?;
    let all: Vec<GraphStats> = records.iter().map(|r| r.stats).collect();
    let stats = CorpusStats::new(&all, corpus.skipped.len());
    let summary = sidecar(&args.out, "stats.json");
    write_file(&summary, serde_json::to_string_pretty(&stats).expect("stats serialize").as_bytes())?;

    RunManifest::new(
        "preprocess",
        serde_json::json!({ "anonymize": args.anonymize }),
        None,
        &[&args.input],
        &[&args.out, &src, &tgt, &stats_lines, &summary],
    )?
    .write(&sidecar(&args.out, "manifest.json"))?;
    log::info!(
        "preprocessed {} examples, skipped {} blocks",
        stats.examples,
        stats.skipped
    );
    Ok(stats)
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub config: TrainConfig,
    pub train: PathBuf,
    pub dev: PathBuf,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub epochs: usize,
    pub best_epoch: usize,
    pub best_dev_bleu: f64,
    pub best_dev_loss: f64,
    pub stop: String,
    pub checkpoint: PathBuf,
    pub log: PathBuf,
}

fn load(path: &Path, anonymize: bool, what: &str) -> Result<Vec<Example>, PipelineError> {
    let (examples, skipped) = load_examples(path, anonymize)?;
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} malformed blocks", path.display());
    }
    if examples.is_empty() {
        return Err(PipelineError::Data(format!("{what} corpus {} is empty", path.display())));
    }
    Ok(examples)
}

/// Trains a model and writes `train_log.jsonl`, `train_timing.jsonl`,
/// `model.ckpt` and `manifest.json` into the output directory.
pub fn train(args: &TrainArgs) -> Result<TrainSummary, PipelineError> {
    let config = &args.config;
    config.validate().map_err(PipelineError::Config)?;
    let train = load(&args.train, config.anonymize, "training")?;
    let dev = load(&args.dev, config.anonymize, "dev")?;
    let outcome = seq2seq::train(&train, &dev, config)?;

    fs::create_dir_all(&args.out_dir).map_err(io(&args.out_dir))?;
    let log_path = args.out_dir.join("train_log.jsonl");
    write_file(&log_path, &jsonl(&outcome.log))?;
    let timing: Vec<_> = outcome
        .seconds
        .iter()
        .enumerate()
        .map(|(i, s)| serde_json::json!({ "epoch": i + 1, "seconds": s }))
        .collect();
    let timing_path = args.out_dir.join("train_timing.jsonl");
    write_file(&timing_path, &jsonl(&timing))?;

    let meta = TrainingMeta {
        seed: config.seed,
        epoch: outcome.best_epoch,
        dev_bleu: outcome.best_dev_bleu,
        dev_loss: outcome.best_dev_loss,
    };
    let ckpt_path = args.out_dir.join("model.ckpt");
    write_file(&ckpt_path, &Checkpoint::from_model(&outcome.model, meta).to_bytes())?;
    RunManifest::new(
        "train",
        serde_json::to_value(config).expect("config serializes"),
        Some(config.seed),
        &[&args.train, &args.dev],
        &[&log_path, &ckpt_path],
    )?
    .write(&args.out_dir.join("manifest.json"))?;

    let stop = match outcome.stop {
        StopReason::MaxEpochs => "max_epochs",
        StopReason::Patience => "patience",
        StopReason::TargetReached => "target_reached",
    };
    Ok(TrainSummary {
        epochs: outcome.log.len(),
        best_epoch: outcome.best_epoch,
        best_dev_bleu: outcome.best_dev_bleu,
        best_dev_loss: outcome.best_dev_loss,
        stop: stop.to_string(),
        checkpoint: ckpt_path,
        log: log_path,
    })
}

pub fn load_model(path: &Path) -> Result<Model, PipelineError> {
    Ok(Checkpoint::load(path)?.to_model()?)
}

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub model: PathBuf,
    pub input: PathBuf,
    pub out: Option<PathBuf>,
    /// Overrides the beam size stored in the model configuration.
    pub beam: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub id: String,
    pub sentence: String,
    pub truncated: bool,
}

fn generate_all(model: &Model, examples: &[Example], beam: usize) -> Result<Vec<Generated>, PipelineError> {
    examples
        .iter()
        .map(|ex| {
            let g = model.generate(&ex.graph, beam, &ex.anon_map)?;
            Ok(Generated {
                id: ex.id.clone(),
                sentence: g.surface.join(" "),
                truncated: g.truncated,
            })
        })
        .collect()
}

/// Decodes every graph in the input corpus; writes one sentence per line,
/// in corpus order.
pub fn generate(args: &GenerateArgs) -> Result<Vec<Generated>, PipelineError> {
    let model = load_model(&args.model)?;
    let beam = args.beam.unwrap_or(model.config.beam);
    if beam == 0 {
        return Err(PipelineError::Config("beam size must be at least 1".into()));
    }
    let examples = load(&args.input, model.config.anonymize, "input")?;
    let out = generate_all(&model, &examples, beam)?;
    if let Some(path) = &args.out {
        let mut text = String::new();
        for g in &out {
            text.push_str(&g.sentence);
            text.push('\n');
        }
        write_file(path, text.as_bytes())?;
        RunManifest::new(
            "generate",
            serde_json::json!({ "beam": beam }),
            Some(model.config.seed),
            &[&args.model, &args.input],
            &[path],
        )?
        .write(&sidecar(path, "manifest.json"))?;
    }
    Ok(out)
}

/// Reference sentences of a corpus, with placeholders restored.
pub fn references(examples: &[Example]) -> Vec<Vec<String>> {
    examples
        .iter()
        .map(|ex| corpus::tokenize(&deanonymize(&ex.target, &ex.anon_map).join(" ")))
        .collect()
}

/// One tokenized hypothesis per line.
pub fn read_hypotheses(path: &Path) -> Result<Vec<Vec<String>>, PipelineError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    Ok(text.lines().map(corpus::tokenize).collect())
}

fn summarize(name: &str, hyps: &[Vec<String>], refs: &[Vec<String>]) -> Result<(SystemSummary, Vec<f64>), PipelineError> {
    let bleu = corpus_bleu(hyps, refs)?;
    let scores: Vec<f64> = hyps.iter().zip(refs).map(|(h, r)| sentence_bleu(h, r)).collect();
    let mean = if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    };
    Ok((
        SystemSummary {
            name: name.to_string(),
            bleu,
            sentence_mean: mean,
            examples: hyps.len(),
        },
        scores,
    ))
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("system").to_string()
}

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    /// Either a checkpoint to decode with or a file of generated sentences.
    pub model: Option<PathBuf>,
    pub hypotheses: Option<PathBuf>,
    pub references: PathBuf,
    pub beam: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Corpus BLEU and mean sentence BLEU of one system.
pub fn evaluate(args: &EvaluateArgs) -> Result<EvalReport, PipelineError> {
    let (hyps, name, anonymize) = match (&args.model, &args.hypotheses) {
        (Some(m), None) => {
            let model = load_model(m)?;
            let examples = load(&args.references, model.config.anonymize, "reference")?;
            let beam = args.beam.unwrap_or(model.config.beam);
            let gens = generate_all(&model, &examples, beam)?;
            (
                gens.iter().map(|g| corpus::tokenize(&g.sentence)).collect(),
                model.config.model.to_string(),
                model.config.anonymize,
            )
        }
        (None, Some(h)) => (read_hypotheses(h)?, stem(h), true),
        _ => {
            return Err(PipelineError::Config(
                "evaluate needs exactly one of a model checkpoint or a hypotheses file".into(),
            ))
        }
    };
    let refs = references(&load(&args.references, anonymize, "reference")?);
    let (summary, _) = summarize(&name, &hyps, &refs)?;
    let report = EvalReport {
        metric: SENTENCE_METRIC.into(),
        systems: vec![summary],
        ..Default::default()
    };
    write_report(&report, args.out.as_deref(), "evaluate", &inputs(&[args.model.as_deref(), args.hypotheses.as_deref(), Some(&args.references)]))?;
    Ok(report)
}

fn inputs<'a>(paths: &[Option<&'a Path>]) -> Vec<&'a Path> {
    paths.iter().flatten().copied().collect()
}

fn write_report(report: &EvalReport, out: Option<&Path>, command: &str, inputs: &[&Path]) -> Result<(), PipelineError> {
    if let Some(path) = out {
        write_file(path, report.to_json().as_bytes())?;
        let text = sidecar(path, "txt");
        write_file(&text, report.render().as_bytes())?;
        RunManifest::new(command, serde_json::Value::Null, None, inputs, &[path, &text])?
            .write(&sidecar(path, "manifest.json"))?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct AnalyzeArgs {
    /// Generated sentence files, one per system.
    pub outputs: Vec<PathBuf>,
    /// System names; file stems when absent.
    pub names: Option<Vec<String>>,
    pub references: PathBuf,
    /// Defaults to the first system.
    pub baseline: Option<String>,
    pub buckets: Vec<(Bucketing, Vec<(usize, usize)>)>,
    pub anonymize: bool,
    pub out: Option<PathBuf>,
}

/// Overall scores plus bucketed sentence-BLEU deltas against the baseline.
pub fn analyze(args: &AnalyzeArgs) -> Result<EvalReport, PipelineError> {
    let mut names: Vec<String> = match &args.names {
        Some(n) if n.len() != args.outputs.len() => {
            return Err(PipelineError::Config(format!(
                "{} names for {} output files",
                n.len(),
                args.outputs.len()
            )))
        }
        Some(n) => n.clone(),
        None => args.outputs.iter().map(|p| stem(p)).collect(),
    };
    for i in 1..names.len() {
        if names[..i].contains(&names[i]) {
            names[i] = format!("{}#{}", names[i], i + 1);
        }
    }
    let examples = load(&args.references, args.anonymize, "reference")?;
    let refs = references(&examples);
    let stats: Vec<GraphStats> = examples.iter().map(|e| compute_stats(&e.graph)).collect();

    let mut report = EvalReport {
        metric: SENTENCE_METRIC.into(),
        ..Default::default()
    };
    let mut systems = Vec::new();
    for (name, path) in names.iter().zip(&args.outputs) {
        let (summary, scores) = summarize(name, &read_hypotheses(path)?, &refs)?;
        report.systems.push(summary);
        systems.push(SystemScores {
            name: name.clone(),
            scores,
        });
    }
    let baseline = args.baseline.clone().or_else(|| names.first().cloned()).unwrap_or_default();
    for (bucketing, edges) in &args.buckets {
        report
            .buckets
            .push(bucket_report(&stats, &systems, &baseline, *bucketing, edges, SENTENCE_METRIC)?);
    }
    let mut ins: Vec<&Path> = args.outputs.iter().map(PathBuf::as_path).collect();
    ins.push(&args.references);
    write_report(&report, args.out.as_deref(), "analyze", &ins)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ContrastiveArgs {
    pub model: PathBuf,
    pub references: PathBuf,
    /// Pairs JSONL `{id, reference, contrastive, category}`.
    pub pairs: Option<PathBuf>,
    /// Pronoun annotations to build pairs from instead.
    pub annotations: Option<PathBuf>,
    pub write_pairs: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Builds the contrastive pairs for every annotated example.
pub fn pairs_from_annotations(examples: &[Example], annotations: &[Annotation]) -> Result<Vec<ContrastivePair>, PipelineError> {
    let refs = references(examples);
    let by_id: HashMap<&str, usize> = examples.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let mut pairs = Vec::new();
    for a in annotations {
        let Some(&i) = by_id.get(a.id.as_str()) else {
            log::warn!("annotation for unknown example {}", a.id);
            continue;
        };
        pairs.extend(make_contrastive_pairs(&a.id, &refs[i], &a.mentions)?);
    }
    Ok(pairs)
}

/// Scores both sentences of every pair under the model. Sentences are
/// anonymized with the example's map before scoring.
pub fn score_pairs(model: &Model, examples: &[Example], pairs: &[ContrastivePair]) -> Result<ContrastiveResult, PipelineError> {
    let by_id: HashMap<&str, &Example> = examples.iter().map(|e| (e.id.as_str(), e)).collect();
    contrastive_eval(pairs, |pair, tokens| {
        let Some(ex) = by_id.get(pair.id.as_str()) else {
            return Ok(None);
        };
        let tokens = anonymize_sentence(tokens, &ex.anon_map);
        Ok::<_, PipelineError>(Some(model.score_sentence(&ex.graph, &tokens)?))
    })
}

pub fn contrastive(args: &ContrastiveArgs) -> Result<ContrastiveResult, PipelineError> {
    let model = load_model(&args.model)?;
    let examples = load(&args.references, model.config.anonymize, "reference")?;
    let pairs: Vec<ContrastivePair> = match (&args.pairs, &args.annotations) {
        (Some(p), None) => corpus::read_jsonl(p)?,
        (None, Some(a)) => pairs_from_annotations(&examples, &corpus::read_jsonl(a)?)?,
        _ => {
            return Err(PipelineError::Config(
                "contrastive needs exactly one of a pairs file or an annotation file".into(),
            ))
        }
    };
    if let Some(path) = &args.write_pairs {
        write_file(path, &jsonl(&pairs))?;
    }
    let result = score_pairs(&model, &examples, &pairs)?;
    if let Some(path) = &args.out {
        let report = EvalReport {
            metric: SENTENCE_METRIC.into(),
            contrastive: vec![(model.config.model.to_string(), result.clone())],
            ..Default::default()
        };
        let ins = inputs(&[Some(&args.model), Some(&args.references), args.pairs.as_deref(), args.annotations.as_deref()]);
        write_report(&report, Some(path), "contrastive", &ins)?;
    }
    Ok(result)
}
