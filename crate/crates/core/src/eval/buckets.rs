use super::EvalError;
use crate::amr::GraphStats;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucketing {
    Reentrancies,
    MaxDependencyLength,
}

impl Bucketing {
    /// `0 / 1–5 / 6–20` reentrancies; `0–10 / 11–50 / 51–250` dependency length.
    pub fn default_edges(self) -> Vec<(usize, usize)> {
        match self {
            Bucketing::Reentrancies => vec![(0, 0), (1, 5), (6, 20)],
            Bucketing::MaxDependencyLength => vec![(0, 10), (11, 50), (51, 250)],
        }
    }

    fn key(self, s: &GraphStats) -> usize {
        match self {
            Bucketing::Reentrancies => s.reentrancy_count,
            Bucketing::MaxDependencyLength => s.max_dependency_length,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Bucketing::Reentrancies => "Number of reentrancies",
            Bucketing::MaxDependencyLength => "Max dependency length",
        }
    }
}

impl fmt::Display for Bucketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bucketing::Reentrancies => "reentrancies",
            Bucketing::MaxDependencyLength => "max_dep_len",
        })
    }
}

impl FromStr for Bucketing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reentrancies" | "reentrancy" => Ok(Bucketing::Reentrancies),
            "max_dep_len" | "dependency" | "dep_len" => Ok(Bucketing::MaxDependencyLength),
            _ => Err(format!("unknown bucketing `{s}` (expected reentrancies or max_dep_len)")),
        }
    }
}

/// Parses `"0,1-5,6-20"` into inclusive ranges.
pub fn parse_edges(spec: &str) -> Result<Vec<(usize, usize)>, String> {
    spec.split(',')
        .map(|part| {
            let part = part.trim();
            let (lo, hi) = match part.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, part),
            };
            let lo: usize = lo.parse().map_err(|_| format!("bad bucket `{part}`"))?;
            let hi: usize = hi.parse().map_err(|_| format!("bad bucket `{part}`"))?;
            if lo > hi {
                return Err(format!("empty bucket `{part}`"));
            }
            Ok((lo, hi))
        })
        .collect()
}

pub fn bucket_label((lo, hi): (usize, usize)) -> String {
    if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}-{hi}")
    }
}

/// Per-example scores of one system, aligned with the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScores {
    pub name: String,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub label: String,
    pub lo: usize,
    pub hi: usize,
    pub count: usize,
    /// Mean baseline score; `None` for an empty bucket.
    pub baseline: Option<f64>,
    /// Mean score difference of each other system against the baseline.
    pub deltas: Vec<(String, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketTable {
    pub bucketing: Bucketing,
    pub metric: String,
    pub baseline: String,
    pub rows: Vec<BucketRow>,
    /// Examples whose value falls outside every bucket.
    pub unbucketed: usize,
    /// Examples filtered out before bucketing (reentrant graphs in the
    /// dependency-length analysis).
    pub excluded: usize,
}

impl BucketTable {
    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum::<usize>() + self.unbucketed + self.excluded
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Groups examples by graph statistic and reports, per bucket, the mean
/// baseline score and every other system's mean difference from it. The
/// dependency-length analysis drops examples with reentrancies first.
pub fn bucket_report(
    stats: &[GraphStats],
    systems: &[SystemScores],
    baseline: &str,
    bucketing: Bucketing,
    edges: &[(usize, usize)],
    metric: &str,
) -> Result<BucketTable, EvalError> {
    if systems.len() < 2 {
        return Err(EvalError::TooFewSystems(systems.len()));
    }
    for s in systems {
        if s.scores.len() != stats.len() {
            return Err(EvalError::LengthMismatch {
                hypotheses: s.scores.len(),
                references: stats.len(),
            });
        }
    }
    let base = systems
        .iter()
        .find(|s| s.name == baseline)
        .ok_or_else(|| EvalError::UnknownSystem(baseline.to_string()))?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    let mut unbucketed = 0;
    let mut excluded = 0;
    for (i, s) in stats.iter().enumerate() {
        if bucketing == Bucketing::MaxDependencyLength && s.reentrancy_count > 0 {
            excluded += 1;
            continue;
        }
        let key = bucketing.key(s);
        match edges.iter().position(|&(lo, hi)| lo <= key && key <= hi) {
            Some(b) => members[b].push(i),
            None => unbucketed += 1,
        }
    }

    let rows = edges
        .iter()
        .zip(&members)
        .map(|(&(lo, hi), idx)| {
            let base_mean = mean(idx.iter().map(|&i| base.scores[i]));
            let deltas = systems
                .iter()
                .filter(|s| s.name != baseline)
                .map(|s| {
                    let d = mean(idx.iter().map(|&i| s.scores[i] - base.scores[i]));
                    (s.name.clone(), d)
                })
                .collect();
            BucketRow {
                label: bucket_label((lo, hi)),
                lo,
                hi,
                count: idx.len(),
                baseline: base_mean,
                deltas,
            }
        })
        .collect();
    Ok(BucketTable {
        bucketing,
        metric: metric.to_string(),
        baseline: baseline.to_string(),
        rows,
        unbucketed,
        excluded,
    })
}
