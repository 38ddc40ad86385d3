use super::config::TrainConfig;
use super::decoder::Decoder;
use super::vocab::{Vocab, BOS, EOS};
use super::Seq2SeqError;
use crate::amr::AmrGraph;
use crate::encoders::{EncodeError, Encoder, EncoderInput, RunMode};
use crate::tensor::{ParamStore, Tape, Var};
use crate::transforms::AnonymizationMap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One training or evaluation pair: the (anonymized) graph and its target
/// tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: String,
    pub graph: AmrGraph,
    pub target: Vec<String>,
    pub anon_map: AnonymizationMap,
}

/// Encoder, decoder, their parameters and both vocabularies.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: TrainConfig,
    pub encoder: Encoder,
    pub decoder: Decoder,
    pub params: ParamStore,
    pub src_vocab: Vocab,
    pub tgt_vocab: Vocab,
}

fn tensor_err(e: EncodeError) -> Seq2SeqError {
    Seq2SeqError::Encode(e)
}

impl Model {
    pub fn new<R: Rng + ?Sized>(config: TrainConfig, src_vocab: Vocab, tgt_vocab: Vocab, rng: &mut R) -> Result<Self, Seq2SeqError> {
        config.validate().map_err(Seq2SeqError::Config)?;
        let mut params = ParamStore::new();
        let encoder = Encoder::new(config.encoder_config(src_vocab.len()), &mut params, config.init_scale, rng)?;
        let dec_config = config.decoder_config(tgt_vocab.len(), encoder.output_dim());
        let decoder = Decoder::new(dec_config, &mut params, config.init_scale, rng);
        Ok(Model {
            config,
            encoder,
            decoder,
            params,
            src_vocab,
            tgt_vocab,
        })
    }

    /// The encoder input for a graph in this model's representation.
    pub fn input(&self, graph: &AmrGraph) -> EncoderInput {
        EncoderInput::from_graph(graph, self.config.repr()).map(|t| self.src_vocab.id(t))
    }

    pub fn target_ids<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        self.tgt_vocab.encode(tokens)
    }

    /// Builds the teacher-forced negative log-likelihood of one example on
    /// `tape`. Dropout is active only when `rng` is given.
    pub fn nll(
        &self,
        tape: &mut Tape,
        input: &EncoderInput,
        target: &[usize],
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(Var, Vec<Var>), Seq2SeqError> {
        let mut mode = match rng.as_deref_mut() {
            Some(r) => RunMode::train(r),
            None => RunMode::eval(),
        };
        let enc = self.encoder.forward(tape, &self.params, input, &mut mode).map_err(tensor_err)?;
        let memory = self.decoder.memory(tape, &self.params, enc.states)?;
        let dropout = self.config.dropout;
        Ok(self
            .decoder
            .nll(tape, &self.params, &memory, target, BOS, EOS, dropout, rng)?)
    }

    /// Log-probability of each target token and of the final end-of-sentence
    /// token, teacher-forced with dropout off.
    pub fn token_log_probs<S: AsRef<str>>(&self, graph: &AmrGraph, sentence: &[S]) -> Result<Vec<f64>, Seq2SeqError> {
        let input = self.input(graph);
        let target = self.target_ids(sentence);
        let mut tape = Tape::new();
        let (_, terms) = self.nll(&mut tape, &input, &target, None)?;
        Ok(terms.iter().map(|&t| tape.value(t).item()).collect())
    }

    /// Total log-probability of `sentence` followed by end-of-sentence. This
    /// is the negative of the example's training loss.
    pub fn score_sentence<S: AsRef<str>>(&self, graph: &AmrGraph, sentence: &[S]) -> Result<f64, Seq2SeqError> {
        Ok(self.token_log_probs(graph, sentence)?.iter().sum())
    }
}
