use super::decoder::{DetachedState, Memory};
use super::model::Model;
use super::vocab::{BOS, EOS};
use super::Seq2SeqError;
use crate::amr::AmrGraph;
use crate::encoders::EncoderInput;
use crate::tensor::{Tape, Tensor};
use crate::transforms::{deanonymize, AnonymizationMap};

/// A decoded sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    /// Model-side tokens (placeholders kept).
    pub tokens: Vec<String>,
    /// Tokens with placeholders mapped back to surface forms.
    pub surface: Vec<String>,
    pub log_prob: f64,
    /// `log_prob` divided by the number of scored steps.
    pub score: f64,
    /// The length limit was reached before end-of-sentence.
    pub truncated: bool,
}

/// Default length limit: twice the source length plus ten.
pub fn default_max_len(source_len: usize) -> usize {
    2 * source_len + 10
}

struct Decoding<'m> {
    model: &'m Model,
    states: Tensor,
    projected: Tensor,
}

impl<'m> Decoding<'m> {
    fn start(model: &'m Model, input: &EncoderInput) -> Result<(Self, DetachedState), Seq2SeqError> {
        let mut tape = Tape::new();
        let enc = model.encoder.encode(&model.params, input)?;
        let states = tape.constant(enc.states);
        let memory = model.decoder.memory(&mut tape, &model.params, states)?;
        let init = model.decoder.initial_state(&mut tape, &model.params, &memory)?;
        let d = Decoding {
            model,
            states: tape.value(memory.states).clone(),
            projected: tape.value(memory.projected).clone(),
        };
        Ok((d, DetachedState::read(&tape, init)))
    }

    fn advance(&self, state: &DetachedState, token: usize) -> Result<(Vec<f64>, DetachedState), Seq2SeqError> {
        let mut tape = Tape::new();
        let memory = Memory {
            states: tape.constant(self.states.clone()),
            projected: tape.constant(self.projected.clone()),
        };
        let s = state.attach(&mut tape);
        let out = self
            .model
            .decoder
            .step(&mut tape, &self.model.params, &memory, s, token, 0.0, None)?;
        let mut lp = tape.value(out.log_probs).data().to_vec();
        lp[BOS] = f64::NEG_INFINITY;
        Ok((lp, DetachedState::read(&tape, out.state)))
    }
}

#[derive(Clone)]
struct Hyp {
    tokens: Vec<usize>,
    log_prob: f64,
    state: DetachedState,
}

fn normalized(log_prob: f64, steps: usize) -> f64 {
    log_prob / steps.max(1) as f64
}

/// Argmax with ties resolved towards the lower id.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

struct Raw {
    ids: Vec<usize>,
    log_prob: f64,
    steps: usize,
    truncated: bool,
}

fn greedy(dec: &Decoding<'_>, init: DetachedState, max_len: usize) -> Result<Raw, Seq2SeqError> {
    let mut state = init;
    let mut prev = BOS;
    let mut ids = Vec::new();
    let mut log_prob = 0.0;
    while ids.len() < max_len {
        let (lp, next) = dec.advance(&state, prev)?;
        let tok = argmax(&lp);
        log_prob += lp[tok];
        if tok == EOS {
            let steps = ids.len() + 1;
            return Ok(Raw {
                ids,
                log_prob,
                steps,
                truncated: false,
            });
        }
        ids.push(tok);
        state = next;
        prev = tok;
    }
    let steps = ids.len();
    Ok(Raw {
        ids,
        log_prob,
        steps,
        truncated: true,
    })
}

fn beam_search(dec: &Decoding<'_>, init: DetachedState, beam: usize, max_len: usize) -> Result<Raw, Seq2SeqError> {
    let mut alive = vec![Hyp {
        tokens: Vec::new(),
        log_prob: 0.0,
        state: init,
    }];
    let mut finished: Vec<Raw> = Vec::new();
    for _ in 0..max_len {
        // (total log-prob, parent index, token, next state)
        let mut candidates: Vec<(f64, usize, usize, DetachedState)> = Vec::new();
        for (hi, hyp) in alive.iter().enumerate() {
            let prev = hyp.tokens.last().copied().unwrap_or(BOS);
            let (lp, next) = dec.advance(&hyp.state, prev)?;
            let mut order: Vec<usize> = (0..lp.len()).filter(|&t| lp[t].is_finite()).collect();
            order.sort_by(|&a, &b| lp[b].total_cmp(&lp[a]).then(a.cmp(&b)));
            for &t in order.iter().take(beam) {
                candidates.push((hyp.log_prob + lp[t], hi, t, next.clone()));
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut next_alive = Vec::new();
        for (log_prob, hi, tok, state) in candidates.into_iter().take(beam) {
            let mut tokens = alive[hi].tokens.clone();
            if tok == EOS {
                let steps = tokens.len() + 1;
                finished.push(Raw {
                    ids: tokens,
                    log_prob,
                    steps,
                    truncated: false,
                });
            } else {
                tokens.push(tok);
                next_alive.push(Hyp { tokens, log_prob, state });
            }
        }
        if finished.len() >= beam || next_alive.is_empty() {
            alive = next_alive;
            break;
        }
        alive = next_alive;
    }
    if finished.is_empty() {
        finished.extend(alive.into_iter().map(|h| {
            let steps = h.tokens.len();
            Raw {
                ids: h.tokens,
                log_prob: h.log_prob,
                steps,
                truncated: true,
            }
        }));
    }
    let best = finished
        .into_iter()
        .reduce(|a, b| {
            if normalized(b.log_prob, b.steps) > normalized(a.log_prob, a.steps) {
                b
            } else {
                a
            }
        })
        .expect("beam search keeps at least one hypothesis");
    Ok(best)
}

impl Model {
    /// Greedy decoding for `beam == 1`, otherwise length-normalized beam
    /// search. The beam result is never worse than the greedy one under the
    /// length-normalized score, since the greedy path is kept as a fallback.
    pub fn generate_input(
        &self,
        input: &EncoderInput,
        beam: usize,
        max_len: Option<usize>,
        map: &AnonymizationMap,
    ) -> Result<Generation, Seq2SeqError> {
        let max_len = max_len.unwrap_or_else(|| default_max_len(input.len()));
        let (dec, init) = Decoding::start(self, input)?;
        let greedy_raw = greedy(&dec, init.clone(), max_len)?;
        let raw = if beam <= 1 {
            greedy_raw
        } else {
            let b = beam_search(&dec, init, beam, max_len)?;
            if normalized(greedy_raw.log_prob, greedy_raw.steps) > normalized(b.log_prob, b.steps) {
                greedy_raw
            } else {
                b
            }
        };
        let tokens = self.tgt_vocab.decode(&raw.ids);
        let surface = deanonymize(&tokens, map);
        Ok(Generation {
            tokens,
            surface,
            log_prob: raw.log_prob,
            score: normalized(raw.log_prob, raw.steps),
            truncated: raw.truncated,
        })
    }

    pub fn generate(&self, graph: &AmrGraph, beam: usize, map: &AnonymizationMap) -> Result<Generation, Seq2SeqError> {
        self.generate_input(&self.input(graph), beam, None, map)
    }
}
