use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const UNK: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
pub const SPECIALS: [&str; 3] = ["<unk>", "<s>", "</s>"];

/// Token ↔ id table. Ids 0–2 are the specials; the rest are ordered by
/// descending training frequency, ties broken alphabetically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct Vocab {
    tokens: Vec<String>,
    counts: Vec<usize>,
    index: HashMap<String, usize>,
}

impl From<Vec<(String, usize)>> for Vocab {
    fn from(entries: Vec<(String, usize)>) -> Self {
        let index = entries.iter().enumerate().map(|(i, (t, _))| (t.clone(), i)).collect();
        let (tokens, counts) = entries.into_iter().unzip();
        Vocab { tokens, counts, index }
    }
}

impl From<Vocab> for Vec<(String, usize)> {
    fn from(v: Vocab) -> Self {
        v.tokens.into_iter().zip(v.counts).collect()
    }
}

impl Vocab {
    /// Keeps tokens seen at least `min_freq` times.
    pub fn build<'a>(tokens: impl IntoIterator<Item = &'a str>, min_freq: usize) -> Self {
        let mut freq: HashMap<&str, usize> = HashMap::new();
        for t in tokens {
            *freq.entry(t).or_insert(0) += 1;
        }
        let mut kept: Vec<(&str, usize)> = freq
            .into_iter()
            .filter(|(t, c)| *c >= min_freq.max(1) && !SPECIALS.contains(t))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let entries = SPECIALS
            .iter()
            .map(|s| (s.to_string(), 0))
            .chain(kept.into_iter().map(|(t, c)| (t.to_string(), c)))
            .collect::<Vec<_>>();
        Vocab::from(entries)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= SPECIALS.len()
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn count(&self, id: usize) -> usize {
        self.counts[id]
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.tokens[i].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, usize)> {
        self.tokens.iter().map(String::as_str).zip(self.counts.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_order_and_threshold() {
        let v = Vocab::build("b a b c a b".split(' '), 2);
        assert_eq!(v.len(), 5);
        assert_eq!(v.token(3), "b");
        assert_eq!(v.token(4), "a");
        assert_eq!(v.id("c"), UNK);
        assert_eq!(v.encode(&["a", "zzz"]), vec![4, UNK]);
        assert_eq!(v.decode(&[BOS, 3, EOS]), vec!["<s>", "b", "</s>"]);
    }

    #[test]
    fn serde_round_trip() {
        let v = Vocab::build("x y y".split(' '), 1);
        let json = serde_json::to_string(&v).unwrap();
        let back: Vocab = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);
        assert_eq!(back.id("y"), 3);
    }
}
