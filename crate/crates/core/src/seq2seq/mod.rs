//! Attentional LSTM decoder, training loop, greedy/beam generation,
//! sentence scoring and checkpoints.

mod checkpoint;
mod config;
mod decoder;
mod model;
mod search;
mod train;
mod vocab;

pub use checkpoint::{Checkpoint, Manifest, ParamEntry, TrainingMeta, FORMAT_VERSION as CHECKPOINT_FORMAT_VERSION};
pub use config::TrainConfig;
pub use decoder::{Decoder, DecoderConfig, DetachedState, Memory, StepOutput, StepState};
pub use model::{Example, Model};
pub use search::{default_max_len, Generation};
pub use train::{build_vocabs, evaluate_dev, train, EpochLog, StopReason, TrainOutcome};
pub use vocab::{Vocab, BOS, EOS, SPECIALS, UNK};

use crate::encoders::EncodeError;
use crate::tensor::TensorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Seq2SeqError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} corpus is empty")]
    EmptyCorpus(String),
    #[error("vocabulary of {size} entries exceeds the limit of {max}")]
    VocabOverflow { size: usize, max: usize },
    #[error("loss diverged in epoch {epoch}, batch {batch}")]
    Divergent { epoch: usize, batch: usize },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests;
