//! PENMAN corpus files and the preprocessed JSONL format.

use crate::amr::{compute_stats, parse_penman, serialize_penman, AmrGraph, GraphStats};
use crate::seq2seq::Example;
use crate::transforms::{anonymize, anonymize_sentence, linearize, to_levi, to_tree, AnonymizationMap, AnonymizationPolicy};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: no corpus files found")]
    NoFiles(PathBuf),
    #[error("{path}:{line}: {message}")]
    Record { path: PathBuf, line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One parsed block: graph, tokenized sentence and the other `# ::` fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub graph: AmrGraph,
    pub sentence: Vec<String>,
    pub metadata: Vec<(String, String)>,
}

/// A block that could not be used, with the line it starts on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedBlock {
    pub source: String,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub skipped: Vec<SkippedBlock>,
}

/// Lowercased whitespace tokens.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_lowercase).collect()
}

fn parse_metadata(comment: &str, out: &mut Vec<(String, String)>) {
    let rest = comment.trim_start_matches('#').trim();
    if let Some(snt) = rest.strip_prefix("::snt") {
        if snt.is_empty() || snt.starts_with(char::is_whitespace) {
            out.push(("snt".into(), snt.trim().to_string()));
            return;
        }
    }
    for field in rest.split("::").skip(1) {
        let field = field.trim();
        let (key, value) = field.split_once(char::is_whitespace).unwrap_or((field, ""));
        if !key.is_empty() {
            out.push((key.to_string(), value.trim().to_string()));
        }
    }
}

/// Splits `text` into blank-line separated blocks. Blocks without a graph
/// (file headers) are ignored; blocks whose graph does not parse, is invalid
/// or lacks a `# ::snt` line are skipped and recorded.
pub fn parse_corpus(text: &str, source: &str) -> Corpus {
    let mut corpus = Corpus::default();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let mut index = 0;
    for (n, line) in text.lines().enumerate().chain(std::iter::once((usize::MAX, ""))) {
        if !line.trim().is_empty() {
            block.push((n + 1, line));
            continue;
        }
        if block.is_empty() {
            continue;
        }
        let start = block[0].0;
        let mut metadata = Vec::new();
        let mut body = Vec::new();
        let mut body_start = start;
        for &(ln, l) in &block {
            if l.trim_start().starts_with('#') {
                parse_metadata(l, &mut metadata);
            } else {
                if body.is_empty() {
                    body_start = ln;
                }
                body.push(l);
            }
        }
        block.clear();
        if body.is_empty() {
            continue;
        }
        index += 1;
        let skip = |reason: String| SkippedBlock {
            source: source.to_string(),
            line: start,
            reason,
        };
        let graph = match parse_penman(&body.join("\n")) {
            Ok(g) => g,
            Err(e) => {
                let at = body_start + e.line - 1;
                corpus.skipped.push(skip(format!("line {at}, column {}: {}", e.column, e.kind)));
                continue;
            }
        };
        if let Some(v) = graph.validate().first() {
            corpus.skipped.push(skip(v.to_string()));
            continue;
        }
        let Some(snt) = metadata.iter().find(|(k, _)| k == "snt").map(|(_, v)| v.clone()) else {
            corpus.skipped.push(skip("missing `# ::snt` line".into()));
            continue;
        };
        let id = metadata
            .iter()
            .find(|(k, _)| k == "id")
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| format!("{source}.{index}"));
        metadata.retain(|(k, _)| k != "snt" && k != "id");
        corpus.entries.push(CorpusEntry {
            id,
            graph,
            sentence: tokenize(&snt),
            metadata,
        });
    }
    for s in &corpus.skipped {
        log::warn!("{}:{}: skipped block: {}", s.source, s.line, s.reason);
    }
    corpus
}

/// Corpus files under `path`: the file itself, or every regular file in the
/// directory in name order.
pub fn corpus_files(path: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let meta = fs::metadata(path).map_err(io_err(path))?;
    let files = if meta.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io_err(path))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(CorpusError::NoFiles(path.to_path_buf()));
    }
    Ok(files)
}

pub fn read_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for file in corpus_files(path)? {
        let text = fs::read_to_string(&file).map_err(io_err(&file))?;
        let source = file.file_stem().and_then(|s| s.to_str()).unwrap_or("corpus").to_string();
        let part = parse_corpus(&text, &source);
        corpus.entries.extend(part.entries);
        corpus.skipped.extend(part.skipped);
    }
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeviRecord {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, String, usize)>,
}

/// One preprocessed example. `penman`, `tokens` and `sentence` are the
/// (possibly anonymized) model input and target; `anon_map` restores the
/// surface strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub penman: String,
    pub tokens: Vec<String>,
    pub levi: LeviRecord,
    pub tree: TreeRecord,
    pub sentence: Vec<String>,
    pub anon_map: AnonymizationMap,
    pub stats: GraphStats,
}

/// The model-side example: anonymized graph and sentence when a policy is given.
pub fn prepare(entry: &CorpusEntry, policy: Option<&AnonymizationPolicy>) -> Example {
    let (graph, anon_map) = match policy {
        Some(p) => anonymize(&entry.graph, p),
        None => (entry.graph.clone(), AnonymizationMap::default()),
    };
    Example {
        id: entry.id.clone(),
        target: anonymize_sentence(&entry.sentence, &anon_map),
        graph,
        anon_map,
    }
}

impl Record {
    pub fn new(entry: &CorpusEntry, policy: Option<&AnonymizationPolicy>) -> Record {
        Record::from_example(&prepare(entry, policy))
    }

    pub fn from_example(ex: &Example) -> Record {
        let graph = &ex.graph;
        let levi = to_levi(graph);
        let tree = to_tree(graph).graph;
        Record {
            id: ex.id.clone(),
            penman: serialize_penman(graph),
            tokens: linearize(graph).tokens,
            levi: LeviRecord {
                nodes: levi.nodes.into_iter().map(|n| n.token).collect(),
                edges: levi.edges,
            },
            tree: TreeRecord {
                nodes: tree.nodes.iter().map(|n| n.label.clone()).collect(),
                edges: tree
                    .edges
                    .iter()
                    .map(|e| (e.source, e.role.clone(), e.target))
                    .collect(),
            },
            sentence: ex.target.clone(),
            anon_map: ex.anon_map.clone(),
            stats: compute_stats(graph),
        }
    }

    pub fn to_example(&self) -> Result<Example, String> {
        let graph = parse_penman(&self.penman).map_err(|e| format!("example {}: {e}", self.id))?;
        Ok(Example {
            id: self.id.clone(),
            graph,
            target: self.sentence.clone(),
            anon_map: self.anon_map.clone(),
        })
    }
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<(), CorpusError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_records(path: &Path) -> Result<Vec<Record>, CorpusError> {
    read_jsonl(path)
}

/// Reads one JSON value per non-empty line.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| CorpusError::Record {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn is_jsonl(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

/// Loads training examples from a preprocessed `.jsonl` file or from raw
/// PENMAN (anonymized with the default policy when `anonymize` is set).
/// Returns the examples and the number of skipped blocks.
pub fn load_examples(path: &Path, anonymize: bool) -> Result<(Vec<Example>, usize), CorpusError> {
    if is_jsonl(path) {
        let records = read_records(path)?;
        let examples = records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.to_example().map_err(|message| CorpusError::Record {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((examples, 0));
    }
    let corpus = read_corpus(path)?;
    let policy = AnonymizationPolicy::default();
    let examples = corpus
        .entries
        .iter()
        .map(|e| prepare(e, anonymize.then_some(&policy)))
        .collect();
    Ok((examples, corpus.skipped.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::FIGURE_ONE_PENMAN;

    #[test]
    fn blocks_metadata_and_skips() {
        let text = format!(
            "# AMR release header\n\n# ::id fig1 ::date 2017\n# ::snt He ate the pizza with his fingers\n{FIGURE_ONE_PENMAN}\n\n\
             # ::snt broken\n(a / alpha :arg0 (b / beta)\n\n\
             # ::id nosnt\n(a / alpha)\n\n\
             # ::snt Alpha\n(a / alpha)\n"
        );
        let c = parse_corpus(&text, "toy");
        assert_eq!(c.entries.len(), 2);
        assert_eq!(c.skipped.len(), 2);
        assert_eq!(c.skipped[0].line, 7);
        assert_eq!(c.entries[0].id, "fig1");
        assert_eq!(c.entries[0].metadata, vec![("date".to_string(), "2017".to_string())]);
        assert_eq!(c.entries[0].sentence, tokenize("he ate the pizza with his fingers"));
        assert_eq!(c.entries[1].id, "toy.4");
    }

    #[test]
    fn figure_one_record() {
        let c = parse_corpus(&format!("# ::snt He ate the pizza with his fingers\n{FIGURE_ONE_PENMAN}\n"), "f");
        let r = Record::new(&c.entries[0], Some(&AnonymizationPolicy::default()));
        assert_eq!(r.stats.reentrancy_count, 1);
        assert_eq!(r.stats.max_dependency_length, 5);
        assert_eq!(r.tokens.len(), 9);
        assert_eq!(r.levi.nodes.len(), 8);
        assert_eq!(r.tree.nodes.len(), 5);
        let json = serde_json::to_string(&r).unwrap();
        let back: Record = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let ex = back.to_example().unwrap();
        assert_eq!(ex.graph.node_count(), 4);
    }

    #[test]
    fn names_are_anonymized_in_both_sides() {
        let text = "# ::snt John Smith slept\n(s / sleep-01 :arg0 (p / person :name (n / name :op1 \"John\" :op2 \"Smith\")))\n";
        let c = parse_corpus(text, "x");
        let r = Record::new(&c.entries[0], Some(&AnonymizationPolicy::default()));
        assert_eq!(r.sentence, vec!["person_name_0", "slept"]);
        assert!(r.tokens.contains(&"person_name_0".to_string()));
    }
}
