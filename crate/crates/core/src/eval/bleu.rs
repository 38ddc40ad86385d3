use super::EvalError;
use std::collections::HashMap;

pub const MAX_ORDER: usize = 4;

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped matches and hypothesis n-gram totals for orders 1..=4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NgramStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl NgramStats {
    pub fn of<S: AsRef<str>, T: AsRef<str>>(hypothesis: &[S], reference: &[T]) -> Self {
        let mut s = NgramStats {
            hyp_len: hypothesis.len(),
            ref_len: reference.len(),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp = ngram_counts(hypothesis, n);
            let rf = ngram_counts(reference, n);
            s.totals[n - 1] = hypothesis.len().saturating_sub(n - 1);
            s.matches[n - 1] = hyp.iter().map(|(g, &c)| c.min(rf.get(g).copied().unwrap_or(0))).sum();
        }
        s
    }

    pub fn add(&mut self, other: &NgramStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    fn brevity_penalty(&self) -> f64 {
        if self.hyp_len == 0 {
            0.0
        } else if self.hyp_len > self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        }
    }
}

/// Corpus BLEU (percentage) with one reference per hypothesis: clipped
/// n-gram counts are summed over the corpus before taking precisions.
pub fn corpus_bleu<H, R, S, T>(hypotheses: &[H], references: &[R]) -> Result<f64, EvalError>
where
    H: AsRef<[S]>,
    R: AsRef<[T]>,
    S: AsRef<str>,
    T: AsRef<str>,
{
    if hypotheses.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    let mut total = NgramStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        total.add(&NgramStats::of(h.as_ref(), r.as_ref()));
    }
    Ok(bleu_from_stats(&total))
}

pub fn bleu_from_stats(s: &NgramStats) -> f64 {
    let mut log_sum = 0.0;
    for n in 0..MAX_ORDER {
        if s.matches[n] == 0 || s.totals[n] == 0 {
            return 0.0;
        }
        log_sum += (s.matches[n] as f64 / s.totals[n] as f64).ln();
    }
    100.0 * s.brevity_penalty() * (log_sum / MAX_ORDER as f64).exp()
}

/// Smoothed sentence-level BLEU (percentage), reported as sBLEU. Orders
/// n ≥ 2 use add-one smoothing; zero unigram precision gives 0.
pub fn sentence_bleu<S: AsRef<str>, T: AsRef<str>>(hypothesis: &[S], reference: &[T]) -> f64 {
    let s = NgramStats::of(hypothesis, reference);
    if s.matches[0] == 0 {
        return 0.0;
    }
    let mut log_sum = (s.matches[0] as f64 / s.totals[0] as f64).ln();
    for n in 1..MAX_ORDER {
        log_sum += ((s.matches[n] + 1) as f64 / (s.totals[n] + 1) as f64).ln();
    }
    100.0 * s.brevity_penalty() * (log_sum / MAX_ORDER as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn hand_counted_fixture() {
        let hyps = [toks("the cat sat on the mat"), toks("a dog barks"), toks("he ate the pizza")];
        let refs = [toks("the cat sat on a mat"), toks("the dog barks loudly"), toks("he ate the pizza")];
        let mut total = NgramStats::default();
        for (h, r) in hyps.iter().zip(&refs) {
            total.add(&NgramStats::of(h, r));
        }
        assert_eq!(total.matches, [11, 7, 4, 2]);
        assert_eq!(total.totals, [13, 10, 7, 4]);
        assert_eq!((total.hyp_len, total.ref_len), (13, 14));
        // exp(1 - 14/13) * (11/13 * 7/10 * 4/7 * 2/4)^(1/4)
        let bleu = corpus_bleu(&hyps, &refs).unwrap();
        assert!((bleu - 59.3899).abs() < 5e-5, "{bleu}");
    }

    #[test]
    fn identity_is_100() {
        let c = vec![toks("the boy wants to go home now"), toks("a b c d")];
        assert!((corpus_bleu(&c, &c).unwrap() - 100.0).abs() < 1e-9);
        assert!((sentence_bleu(&c[0], &c[0]) - 100.0).abs() < 1e-9);
        assert!((sentence_bleu(&toks("hi"), &toks("hi")) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn no_four_gram_match_is_zero() {
        let h = vec![toks("a b c x d e f")];
        let r = vec![toks("a b c y d e f")];
        assert_eq!(corpus_bleu(&h, &r).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        let h = vec![toks("a")];
        let r: Vec<Vec<String>> = vec![];
        assert!(corpus_bleu(&h, &r).is_err());
    }

    #[test]
    fn clipping() {
        let s = NgramStats::of(&toks("the the the the"), &toks("the cat"));
        assert_eq!(s.matches[0], 1);
        assert_eq!(s.totals[0], 4);
    }

    #[test]
    fn disjoint_sentence_bleu_is_zero() {
        assert_eq!(sentence_bleu(&toks("a b c"), &toks("x y z")), 0.0);
    }
}
