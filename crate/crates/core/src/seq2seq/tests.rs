use super::*;
use crate::amr::parse_penman;
use crate::encoders::EncoderKind;
use crate::tensor::{check_gradients, Tape};
use crate::transforms::AnonymizationMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn example(id: &str, penman: &str, sentence: &str) -> Example {
    Example {
        id: id.into(),
        graph: parse_penman(penman).unwrap(),
        target: sentence.split_whitespace().map(str::to_string).collect(),
        anon_map: AnonymizationMap::default(),
    }
}

fn corpus() -> Vec<Example> {
    vec![
        example("a", "(e / eat-01 :arg0 (h / he) :arg1 (p / pizza))", "he ate the pizza"),
        example("b", "(w / want-01 :arg0 (b / boy) :arg1 (g / go-02 :arg0 b))", "the boy wants to go"),
        example("c", "(s / sleep-01 :arg0 (c / cat))", "the cat sleeps"),
    ]
}

fn tiny(kind: EncoderKind) -> TrainConfig {
    TrainConfig {
        model: kind,
        embedding_dim: 8,
        hidden_dim: 8,
        decoder_embedding_dim: 8,
        decoder_hidden_dim: 8,
        attention_dim: 8,
        dropout: 0.0,
        edge_dropout: 0.0,
        tgt_min_freq: 1,
        batch_size: 1,
        epochs: 3,
        ..Default::default()
    }
}

fn untrained(kind: EncoderKind) -> Model {
    let data = corpus();
    let config = tiny(kind);
    let (src, tgt) = build_vocabs(&data, &config).unwrap();
    Model::new(config, src, tgt, &mut ChaCha8Rng::seed_from_u64(3)).unwrap()
}

#[test]
fn attention_is_a_distribution() {
    let model = untrained(EncoderKind::GCNSeq);
    let ex = &corpus()[1];
    let input = model.input(&ex.graph);
    let mut tape = Tape::new();
    let enc = model.encoder.forward(&mut tape, &model.params, &input, &mut crate::encoders::RunMode::eval()).unwrap();
    let memory = model.decoder.memory(&mut tape, &model.params, enc.states).unwrap();
    let mut state = model.decoder.initial_state(&mut tape, &model.params, &memory).unwrap();
    let mut token = BOS;
    for &next in &model.target_ids(&ex.target) {
        let out = model.decoder.step(&mut tape, &model.params, &memory, state, token, 0.0, None).unwrap();
        let a = tape.value(out.attention);
        assert_eq!(a.shape(), (1, input.len()));
        assert!(a.data().iter().all(|&w| w >= 0.0));
        assert!((a.data().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        state = out.state;
        token = next;
    }
}

#[test]
fn score_is_pure_and_matches_loss() {
    let model = untrained(EncoderKind::Seq);
    let ex = &corpus()[0];
    let a = model.score_sentence(&ex.graph, &ex.target).unwrap();
    let b = model.score_sentence(&ex.graph, &ex.target).unwrap();
    assert_eq!(a, b);
    assert!(a < 0.0);
    let mut tape = Tape::new();
    let (loss, _) = model
        .nll(&mut tape, &model.input(&ex.graph), &model.target_ids(&ex.target), None)
        .unwrap();
    assert_eq!(-tape.value(loss).item(), a);
}

#[test]
fn appending_a_token_lowers_the_prefix_score() {
    let model = untrained(EncoderKind::Seq);
    let ex = &corpus()[0];
    let mut longer = ex.target.clone();
    longer.push("pizza".into());
    let short = model.token_log_probs(&ex.graph, &ex.target).unwrap();
    let long = model.token_log_probs(&ex.graph, &longer).unwrap();
    // the sentence tokens, without the end-of-sentence term
    let prefix = |v: &[f64]| v[..v.len() - 1].iter().sum::<f64>();
    assert!(prefix(&long) < prefix(&short));
}

#[test]
fn beam_one_is_greedy_and_beam_dominates() {
    let model = untrained(EncoderKind::SeqTreeLSTM);
    let none = AnonymizationMap::default();
    for ex in corpus() {
        let g1 = model.generate(&ex.graph, 1, &none).unwrap();
        let g1b = model.generate(&ex.graph, 1, &none).unwrap();
        assert_eq!(g1, g1b);
        let b5 = model.generate(&ex.graph, 5, &none).unwrap();
        assert!(b5.score >= g1.score, "{} < {}", b5.score, g1.score);
    }
}

#[test]
fn truncation_is_flagged() {
    let model = untrained(EncoderKind::Seq);
    let ex = &corpus()[0];
    let input = model.input(&ex.graph);
    let g = model.generate_input(&input, 1, Some(0), &AnonymizationMap::default()).unwrap();
    assert!(g.truncated);
    assert!(g.tokens.is_empty());
}

#[test]
fn decoder_gradients() {
    let mut model = untrained(EncoderKind::Seq);
    let ex = &corpus()[2];
    let input = model.input(&ex.graph);
    let target = model.target_ids(&ex.target);
    let Model {
        encoder,
        decoder,
        params,
        ..
    } = &mut model;
    let ids: Vec<_> = params.ids().filter(|&id| params.name(id).starts_with("dec.")).collect();
    let r = check_gradients(params, Some(&ids), 1e-5, |tape, s| {
        let enc = encoder
            .forward(tape, s, &input, &mut crate::encoders::RunMode::eval())
            .map_err(|e| match e {
                crate::encoders::EncodeError::Tensor(t) => t,
                other => panic!("{other}"),
            })?;
        let memory = decoder.memory(tape, s, enc.states)?;
        Ok(decoder.nll(tape, s, &memory, &target, BOS, EOS, 0.0, None)?.0)
    })
    .unwrap();
    assert!(r.passes(1e-4), "{r:?}");
}

#[test]
fn training_reduces_loss_and_is_deterministic() {
    let data = corpus();
    let mut config = tiny(EncoderKind::Seq);
    config.epochs = 30;
    config.patience = None;
    let a = train(&data, &data, &config).unwrap();
    let b = train(&data, &data, &config).unwrap();
    assert_eq!(a.log, b.log);
    assert!(a.log.last().unwrap().train_loss < a.log[0].train_loss);
    let ca = Checkpoint::from_model(&a.model, TrainingMeta { seed: 1, epoch: a.best_epoch, dev_bleu: a.best_dev_bleu, dev_loss: a.best_dev_loss });
    let cb = Checkpoint::from_model(&b.model, TrainingMeta { seed: 1, epoch: b.best_epoch, dev_bleu: b.best_dev_bleu, dev_loss: b.best_dev_loss });
    assert_eq!(ca.to_bytes(), cb.to_bytes());
}

#[test]
fn empty_corpus_is_an_error() {
    let data = corpus();
    assert!(matches!(train(&[], &data, &tiny(EncoderKind::Seq)), Err(Seq2SeqError::EmptyCorpus(_))));
}

#[test]
fn vocabulary_overflow() {
    let config = TrainConfig {
        max_vocab: Some(5),
        ..tiny(EncoderKind::Seq)
    };
    assert!(matches!(build_vocabs(&corpus(), &config), Err(Seq2SeqError::VocabOverflow { .. })));
}

#[test]
fn checkpoint_round_trip() {
    let model = untrained(EncoderKind::TreeLSTMSeq);
    let meta = TrainingMeta {
        seed: 3,
        epoch: 0,
        dev_bleu: 0.0,
        dev_loss: 1.5,
    };
    let ck = Checkpoint::from_model(&model, meta);
    let bytes = ck.to_bytes();
    let back = Checkpoint::from_bytes(&bytes).unwrap();
    assert_eq!(back, ck);
    let restored = back.to_model().unwrap();
    let ex = &corpus()[1];
    assert_eq!(
        model.score_sentence(&ex.graph, &ex.target).unwrap(),
        restored.score_sentence(&ex.graph, &ex.target).unwrap()
    );

    assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 3]).is_err());
    assert!(Checkpoint::from_bytes(b"not a checkpoint at all").is_err());
    let mut tampered = ck.clone();
    tampered.manifest.config.hidden_dim = 12;
    assert!(matches!(tampered.to_model(), Err(Seq2SeqError::Checkpoint(_))));
}
