use crate::encoders::Lstm;
use crate::tensor::{ParamId, ParamStore, Result, Tape, Tensor, Var};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub attention_dim: usize,
    pub input_feed: bool,
    pub tgt_vocab_size: usize,
    /// Width of the encoder rows attended over.
    pub enc_dim: usize,
}

/// LSTM decoder with additive attention over the encoder rows and input
/// feeding of the attentional state.
#[derive(Debug, Clone)]
pub struct Decoder {
    pub config: DecoderConfig,
    pub embedding: ParamId,
    pub lstm: Lstm,
    pub init_w: ParamId,
    pub init_b: ParamId,
    pub att_enc: ParamId,
    pub att_dec: ParamId,
    pub att_b: ParamId,
    pub att_v: ParamId,
    pub comb_w: ParamId,
    pub comb_b: ParamId,
    pub out_w: ParamId,
    pub out_b: ParamId,
}

/// Encoder rows and their attention projection, both on the tape.
#[derive(Debug, Clone, Copy)]
pub struct Memory {
    pub states: Var,
    pub projected: Var,
}

/// Recurrent state carried between decoder steps.
#[derive(Debug, Clone, Copy)]
pub struct StepState {
    pub h: Var,
    pub c: Var,
    pub feed: Var,
}

pub struct StepOutput {
    pub log_probs: Var,
    pub attention: Var,
    pub state: StepState,
}

/// Decoder state outside any tape, for search.
#[derive(Debug, Clone, PartialEq)]
pub struct DetachedState {
    pub h: Tensor,
    pub c: Tensor,
    pub feed: Tensor,
}

impl Decoder {
    pub fn new<R: Rng + ?Sized>(config: DecoderConfig, store: &mut ParamStore, init: f64, rng: &mut R) -> Self {
        let e = config.embedding_dim;
        let h = config.hidden_dim;
        let a = config.attention_dim;
        let m = config.enc_dim;
        let v = config.tgt_vocab_size;
        let lstm_in = if config.input_feed { e + h } else { e };
        Decoder {
            embedding: store.add_uniform("dec.embedding", v, e, init, rng),
            lstm: Lstm::new(store, "dec.lstm", lstm_in, h, init, rng),
            init_w: store.add_uniform("dec.init_w", m, h, init, rng),
            init_b: store.add_zeros("dec.init_b", 1, h),
            att_enc: store.add_uniform("dec.att_enc", m, a, init, rng),
            att_dec: store.add_uniform("dec.att_dec", h, a, init, rng),
            att_b: store.add_zeros("dec.att_b", 1, a),
            att_v: store.add_uniform("dec.att_v", a, 1, init, rng),
            comb_w: store.add_uniform("dec.comb_w", h + m, h, init, rng),
            comb_b: store.add_zeros("dec.comb_b", 1, h),
            out_w: store.add_uniform("dec.out_w", h, v, init, rng),
            out_b: store.add_zeros("dec.out_b", 1, v),
            config,
        }
    }

    pub fn memory(&self, tape: &mut Tape, store: &ParamStore, states: Var) -> Result<Memory> {
        let w = tape.param(store, self.att_enc);
        let projected = tape.matmul(states, w)?;
        Ok(Memory { states, projected })
    }

    /// `s0 = tanh(mean(E) W + b)`, `c0 = 0`, zero attentional feed.
    pub fn initial_state(&self, tape: &mut Tape, store: &ParamStore, memory: &Memory) -> Result<StepState> {
        let n = tape.shape(memory.states).0;
        let sum = tape.sum_rows(memory.states)?;
        let mean = tape.scale(sum, 1.0 / n as f64)?;
        let w = tape.param(store, self.init_w);
        let b = tape.param(store, self.init_b);
        let z = tape.matmul(mean, w)?;
        let z = tape.add(z, b)?;
        let h = tape.tanh(z)?;
        let hd = self.config.hidden_dim;
        let c = tape.constant(Tensor::zeros(1, hd));
        let feed = tape.constant(Tensor::zeros(1, hd));
        Ok(StepState { h, c, feed })
    }

    /// Reads `token`, returns log-probabilities of the next token. Dropout
    /// applies only when an rng is given.
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        memory: &Memory,
        state: StepState,
        token: usize,
        dropout: f64,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<StepOutput> {
        let table = tape.param(store, self.embedding);
        let mut x = tape.embedding_lookup(table, &[token])?;
        if let Some(r) = rng.as_deref_mut().filter(|_| dropout > 0.0) {
            x = tape.dropout(x, 1.0 - dropout, r)?;
        }
        if self.config.input_feed {
            x = tape.concat(&[x, state.feed])?;
        }
        let xw = self.lstm.project(tape, store, x)?;
        let (h, c) = self.lstm.step(tape, store, xw, state.h, state.c)?;

        let att_dec = tape.param(store, self.att_dec);
        let att_b = tape.param(store, self.att_b);
        let att_v = tape.param(store, self.att_v);
        let q = tape.matmul(h, att_dec)?;
        let q = tape.add(q, att_b)?;
        let keys = tape.add(memory.projected, q)?;
        let keys = tape.tanh(keys)?;
        let scores = tape.matmul(keys, att_v)?;
        let scores = tape.transpose(scores)?;
        let attention = tape.softmax(scores)?;
        let context = tape.matmul(attention, memory.states)?;

        let comb_w = tape.param(store, self.comb_w);
        let comb_b = tape.param(store, self.comb_b);
        let hc = tape.concat(&[h, context])?;
        let z = tape.matmul(hc, comb_w)?;
        let z = tape.add(z, comb_b)?;
        let mut attentional = tape.tanh(z)?;
        if let Some(r) = rng.filter(|_| dropout > 0.0) {
            attentional = tape.dropout(attentional, 1.0 - dropout, r)?;
        }

        let out_w = tape.param(store, self.out_w);
        let out_b = tape.param(store, self.out_b);
        let logits = tape.matmul(attentional, out_w)?;
        let logits = tape.add(logits, out_b)?;
        let log_probs = tape.log_softmax(logits)?;
        Ok(StepOutput {
            log_probs,
            attention,
            state: StepState {
                h,
                c,
                feed: attentional,
            },
        })
    }

    /// Teacher-forced negative log-likelihood of `target` followed by the
    /// end-of-sentence token. `bos`/`eos` are the special ids.
    #[allow(clippy::too_many_arguments)]
    pub fn nll(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        memory: &Memory,
        target: &[usize],
        bos: usize,
        eos: usize,
        dropout: f64,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(Var, Vec<Var>)> {
        let mut state = self.initial_state(tape, store, memory)?;
        let mut prev = bos;
        let mut terms = Vec::with_capacity(target.len() + 1);
        for &gold in target.iter().chain(std::iter::once(&eos)) {
            let out = self.step(tape, store, memory, state, prev, dropout, rng.as_deref_mut())?;
            terms.push(tape.pick(out.log_probs, 0, gold)?);
            state = out.state;
            prev = gold;
        }
        let all = tape.concat(&terms)?;
        let total = tape.sum(all)?;
        let nll = tape.scale(total, -1.0)?;
        Ok((nll, terms))
    }
}

impl DetachedState {
    pub fn read(tape: &Tape, s: StepState) -> Self {
        DetachedState {
            h: tape.value(s.h).clone(),
            c: tape.value(s.c).clone(),
            feed: tape.value(s.feed).clone(),
        }
    }

    pub fn attach(&self, tape: &mut Tape) -> StepState {
        StepState {
            h: tape.constant(self.h.clone()),
            c: tape.constant(self.c.clone()),
            feed: tape.constant(self.feed.clone()),
        }
    }
}
