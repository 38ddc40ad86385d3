use super::config::TrainConfig;
use super::model::{Example, Model};
use super::vocab::Vocab;
use super::Seq2SeqError;
use crate::encoders::EncoderInput;
use crate::eval::corpus_bleu;
use crate::tensor::{clip_grad_norm, sgd_step, LrSchedule, ParamStore, Tape};
use crate::transforms::AnonymizationMap;
use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean per-token negative log-likelihood over the epoch.
    pub train_loss: f64,
    pub dev_bleu: f64,
    /// Learning rate used during the epoch.
    pub lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    Patience,
    TargetReached,
}

pub struct TrainOutcome {
    /// Parameters from the best dev epoch.
    pub model: Model,
    pub log: Vec<EpochLog>,
    /// Wall-clock seconds per epoch, kept apart from the log so the log is
    /// reproducible byte for byte.
    pub seconds: Vec<f64>,
    pub best_epoch: usize,
    pub best_dev_bleu: f64,
    pub best_dev_loss: f64,
    pub stop: StopReason,
}

/// Source vocabulary over the linearized graphs (which contain every
/// structure token), target vocabulary over the sentences.
pub fn build_vocabs(train: &[Example], config: &TrainConfig) -> Result<(Vocab, Vocab), Seq2SeqError> {
    let src_tokens: Vec<Vec<String>> = train
        .iter()
        .map(|ex| EncoderInput::from_graph(&ex.graph, crate::encoders::InputRepr::Sequence).tokens)
        .collect();
    let src = Vocab::build(src_tokens.iter().flatten().map(String::as_str), config.src_min_freq);
    let tgt = Vocab::build(train.iter().flat_map(|ex| ex.target.iter().map(String::as_str)), config.tgt_min_freq);
    if let Some(max) = config.max_vocab {
        for v in [&src, &tgt] {
            if v.len() > max {
                return Err(Seq2SeqError::VocabOverflow { size: v.len(), max });
            }
        }
    }
    Ok((src, tgt))
}

struct Prepared {
    input: EncoderInput,
    target: Vec<usize>,
}

fn prepare(model: &Model, examples: &[Example]) -> Vec<Prepared> {
    examples
        .iter()
        .map(|ex| Prepared {
            input: model.input(&ex.graph),
            target: model.target_ids(&ex.target),
        })
        .collect()
}

/// Per-token dev loss and greedy corpus BLEU on the model-side tokens.
pub fn evaluate_dev(model: &Model, dev: &[Example]) -> Result<(f64, f64), Seq2SeqError> {
    let prepared = prepare(model, dev);
    let mut nll = 0.0;
    let mut tokens = 0usize;
    let mut hyps = Vec::with_capacity(dev.len());
    let none = AnonymizationMap::default();
    for p in &prepared {
        let mut tape = Tape::new();
        let (loss, _) = model.nll(&mut tape, &p.input, &p.target, None)?;
        nll += tape.value(loss).item();
        tokens += p.target.len() + 1;
        hyps.push(model.generate_input(&p.input, 1, None, &none)?.tokens);
    }
    let refs: Vec<&[String]> = dev.iter().map(|ex| ex.target.as_slice()).collect();
    let bleu = corpus_bleu(&hyps, &refs).expect("aligned lists");
    Ok((nll / tokens.max(1) as f64, bleu))
}

fn snapshot(params: &ParamStore) -> Vec<crate::tensor::Tensor> {
    params.ids().map(|id| params.value(id).clone()).collect()
}

/// Mini-batch SGD on the summed per-example NLL (averaged over the batch)
/// with gradient clipping. The learning rate decays after every epoch that
/// does not lower the dev loss. The kept parameters are those of the best
/// epoch by dev BLEU, ties broken by dev loss; training stops after
/// `patience` epochs that improve neither.
pub fn train(train: &[Example], dev: &[Example], config: &TrainConfig) -> Result<TrainOutcome, Seq2SeqError> {
    if train.is_empty() {
        return Err(Seq2SeqError::EmptyCorpus("training".into()));
    }
    if dev.is_empty() {
        return Err(Seq2SeqError::EmptyCorpus("dev".into()));
    }
    config.validate().map_err(Seq2SeqError::Config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (src, tgt) = build_vocabs(train, config)?;
    info!("vocabularies: {} source, {} target", src.len(), tgt.len());
    let mut model = Model::new(config.clone(), src, tgt, &mut rng)?;
    let data = prepare(&model, train);

    let mut schedule = LrSchedule::new(config.learning_rate, config.lr_decay);
    let mut best: Option<(f64, f64)> = None;
    let mut best_loss = f64::INFINITY;
    let mut stale = 0;
    let mut best_params = snapshot(&model.params);
    let mut best_epoch = 0;
    let mut log = Vec::new();
    let mut seconds = Vec::new();
    let mut stop = StopReason::MaxEpochs;
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        let lr = schedule.lr;
        order.shuffle(&mut rng);
        let mut epoch_nll = 0.0;
        let mut epoch_tokens = 0usize;
        for (batch_id, batch) in order.chunks(config.batch_size).enumerate() {
            model.params.zero_grads();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let ex = &data[i];
                let mut tape = Tape::new();
                let (loss, _) = model.nll(&mut tape, &ex.input, &ex.target, Some(&mut rng))?;
                let value = tape.value(loss).item();
                if !value.is_finite() {
                    return Err(Seq2SeqError::Divergent { epoch, batch: batch_id });
                }
                epoch_nll += value;
                epoch_tokens += ex.target.len() + 1;
                tape.backward(loss)?;
                model.params.accumulate(&tape, scale);
            }
            let norm = clip_grad_norm(&mut model.params, config.clip_norm);
            if !norm.is_finite() {
                return Err(Seq2SeqError::Divergent { epoch, batch: batch_id });
            }
            sgd_step(&mut model.params, lr)?;
        }
        let train_loss = epoch_nll / epoch_tokens.max(1) as f64;
        let (dev_loss, dev_bleu) = evaluate_dev(&model, dev)?;
        let improved = match best {
            None => true,
            Some((b, l)) => dev_bleu > b || (dev_bleu == b && dev_loss < l),
        };
        if improved {
            best = Some((dev_bleu, dev_loss));
            best_params = snapshot(&model.params);
            best_epoch = epoch;
        }
        let loss_improved = dev_loss < best_loss;
        best_loss = best_loss.min(dev_loss);
        schedule.observe(loss_improved);
        stale = if improved || loss_improved { 0 } else { stale + 1 };
        log.push(EpochLog {
            epoch,
            train_loss,
            dev_bleu,
            lr,
        });
        seconds.push(started.elapsed().as_secs_f64());
        debug!("epoch {epoch}: loss {train_loss:.4} dev loss {dev_loss:.4} dev BLEU {dev_bleu:.2} lr {lr}");
        if config.target_dev_bleu.is_some_and(|t| dev_bleu >= t) {
            stop = StopReason::TargetReached;
            break;
        }
        if config.patience.is_some_and(|p| stale >= p) {
            stop = StopReason::Patience;
            break;
        }
    }
    for (id, value) in model.params.ids().collect::<Vec<_>>().into_iter().zip(best_params) {
        *model.params.value_mut(id) = value;
    }
    let (best_dev_bleu, best_dev_loss) = best.expect("at least one epoch ran");
    info!("best epoch {best_epoch}: dev BLEU {best_dev_bleu:.2}");
    Ok(TrainOutcome {
        model,
        log,
        seconds,
        best_epoch,
        best_dev_bleu,
        best_dev_loss,
        stop,
    })
}
