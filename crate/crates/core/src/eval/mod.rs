//! Corpus and sentence BLEU, bucketed comparisons against a baseline and
//! contrastive-pair accuracy.

mod bleu;
mod buckets;
mod contrastive;
mod report;

pub use bleu::{bleu_from_stats, corpus_bleu, sentence_bleu, NgramStats, MAX_ORDER};
pub use buckets::{bucket_label, bucket_report, parse_edges, BucketRow, BucketTable, Bucketing, SystemScores};
pub use contrastive::{
    contrastive_eval, lookup_pronoun, make_contrastive_pairs, swap_gender, swap_number, swap_type, Annotation, Case,
    Category, CategoryScore, ContrastivePair, ContrastiveResult, Gender, Mention, Pronoun, PRONOUNS,
};
pub use report::{render_bucket_table, render_contrastive, render_scores, EvalReport, SystemSummary};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("bucket analysis needs at least two systems, got {0}")]
    TooFewSystems(usize),
    #[error("no system named `{0}`")]
    UnknownSystem(String),
    #[error("example {id}: span {span:?} is out of range for {len} tokens")]
    BadSpan { id: String, span: (usize, usize), len: usize },
}
