use super::{BucketTable, Category, ContrastiveResult};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Corpus-level scores of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub name: String,
    pub bleu: f64,
    /// Mean sentence-level metric over the corpus.
    pub sentence_mean: f64,
    pub examples: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: String,
    pub systems: Vec<SystemSummary>,
    pub buckets: Vec<BucketTable>,
    pub contrastive: Vec<(String, ContrastiveResult)>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.systems.is_empty() {
            out.push_str(&render_scores(&self.systems, &self.metric));
        }
        for t in &self.buckets {
            out.push('\n');
            out.push_str(&render_bucket_table(t));
        }
        for (name, r) in &self.contrastive {
            out.push('\n');
            out.push_str(&render_contrastive(name, r));
        }
        out
    }
}

pub fn render_scores(systems: &[SystemSummary], metric: &str) -> String {
    let mut out = String::new();
    let w = systems.iter().map(|s| s.name.len()).max().unwrap_or(0).max(6);
    let _ = writeln!(out, "{:<w$}  {:>7}  {:>7}  {:>6}", "System", "BLEU", metric, "N");
    for s in systems {
        let _ = writeln!(out, "{:<w$}  {:>7.2}  {:>7.2}  {:>6}", s.name, s.bleu, s.sentence_mean, s.examples);
    }
    out
}

fn signed(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:+.2}"),
        None => "-".to_string(),
    }
}

pub fn render_bucket_table(t: &BucketTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({}; deltas against {})", t.bucketing.title(), t.metric, t.baseline);
    let names: Vec<&str> = t.rows.first().map(|r| r.deltas.iter().map(|(n, _)| n.as_str()).collect()).unwrap_or_default();
    let _ = write!(out, "{:<10}  {:>6}  {:>9}", "Bucket", "N", t.baseline);
    for n in &names {
        let _ = write!(out, "  {:>9}", n);
    }
    out.push('\n');
    for r in &t.rows {
        let base = r.baseline.map_or("-".to_string(), |b| format!("{b:.2}"));
        let _ = write!(out, "{:<10}  {:>6}  {:>9}", r.label, r.count, base);
        for (_, d) in &r.deltas {
            let _ = write!(out, "  {:>9}", signed(*d));
        }
        out.push('\n');
    }
    if t.unbucketed > 0 {
        let _ = writeln!(out, "unbucketed: {}", t.unbucketed);
    }
    if t.excluded > 0 {
        let _ = writeln!(out, "excluded (reentrant): {}", t.excluded);
    }
    out
}

pub fn render_contrastive(name: &str, r: &ContrastiveResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Contrastive accuracy: {name}");
    for c in Category::ALL {
        if let Some(s) = r.categories.get(&c) {
            let _ = writeln!(out, "{:<12}  {:>6.2}  ({}/{})", c.to_string(), s.accuracy, s.wins, s.total);
        }
    }
    let _ = writeln!(out, "{:<12}  {:>6.2}  ({}/{})", "overall", r.accuracy(), r.wins, r.total);
    if r.skipped > 0 {
        let _ = writeln!(out, "skipped: {}", r.skipped);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{BucketRow, Bucketing, CategoryScore};

    #[test]
    fn renders_and_round_trips() {
        let mut r = ContrastiveResult::default();
        r.categories.insert(Category::Gender, CategoryScore { wins: 3, total: 4, accuracy: 75.0 });
        r.total = 4;
        r.wins = 3;
        let report = EvalReport {
            metric: "sBLEU".into(),
            systems: vec![SystemSummary { name: "Seq".into(), bleu: 21.5, sentence_mean: 30.0, examples: 4 }],
            buckets: vec![BucketTable {
                bucketing: Bucketing::Reentrancies,
                metric: "sBLEU".into(),
                baseline: "Seq".into(),
                rows: vec![BucketRow {
                    label: "1-5".into(),
                    lo: 1,
                    hi: 5,
                    count: 0,
                    baseline: None,
                    deltas: vec![("GCNSeq".into(), None)],
                }],
                unbucketed: 1,
                excluded: 0,
            }],
            contrastive: vec![("Seq".into(), r)],
        };
        let text = report.render();
        assert!(text.contains("21.50"));
        assert!(text.contains("GCNSeq"));
        assert!(text.contains("gender"));
        assert!(text.contains("unbucketed: 1"));
        let back: EvalReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
