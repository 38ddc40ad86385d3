use super::decoder::DecoderConfig;
use crate::encoders::{Activation, EncoderConfig, EncoderKind, InputRepr};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Everything that determines a model and its training run. Serialized as
/// the JSON run configuration; missing fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub model: EncoderKind,
    /// Defaults to the natural representation of `model`.
    pub repr: Option<InputRepr>,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub decoder_embedding_dim: usize,
    pub decoder_hidden_dim: usize,
    pub attention_dim: usize,
    pub input_feed: bool,
    pub gcn_layers: usize,
    pub gcn_activation: Activation,
    pub highway: bool,
    pub dropout: f64,
    pub edge_dropout: f64,
    pub init_scale: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub clip_norm: f64,
    /// Epochs without dev improvement before stopping; `None` disables.
    pub patience: Option<usize>,
    /// Stop as soon as dev BLEU reaches this value.
    pub target_dev_bleu: Option<f64>,
    pub src_min_freq: usize,
    pub tgt_min_freq: usize,
    pub max_vocab: Option<usize>,
    pub seed: u64,
    pub beam: usize,
    /// Anonymize names, numbers and dates when a raw PENMAN corpus is loaded.
    pub anonymize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: EncoderKind::Seq,
            repr: None,
            embedding_dim: 64,
            hidden_dim: 64,
            decoder_embedding_dim: 64,
            decoder_hidden_dim: 64,
            attention_dim: 64,
            input_feed: true,
            gcn_layers: 2,
            gcn_activation: Activation::Relu,
            highway: true,
            dropout: 0.3,
            edge_dropout: 0.1,
            init_scale: 0.1,
            epochs: 100,
            batch_size: 100,
            learning_rate: 1.0,
            lr_decay: 0.8,
            clip_norm: 5.0,
            patience: Some(5),
            target_dev_bleu: None,
            src_min_freq: 1,
            tgt_min_freq: 2,
            max_vocab: None,
            seed: 1,
            beam: 5,
            anonymize: true,
        }
    }
}

impl TrainConfig {
    pub fn repr(&self) -> InputRepr {
        self.repr.unwrap_or_else(|| self.model.default_repr())
    }

    pub fn encoder_config(&self, src_vocab_size: usize) -> EncoderConfig {
        EncoderConfig {
            kind: self.model,
            input_repr: self.repr(),
            embedding_dim: self.embedding_dim,
            hidden_dim: self.hidden_dim,
            gcn_layers: self.gcn_layers,
            gcn_activation: self.gcn_activation,
            highway: self.highway,
            dropout: self.dropout,
            edge_dropout: self.edge_dropout,
            src_vocab_size,
        }
    }

    pub fn decoder_config(&self, tgt_vocab_size: usize, enc_dim: usize) -> DecoderConfig {
        DecoderConfig {
            embedding_dim: self.decoder_embedding_dim,
            hidden_dim: self.decoder_hidden_dim,
            attention_dim: self.attention_dim,
            input_feed: self.input_feed,
            tgt_vocab_size,
            enc_dim,
        }
    }

    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<(), String> {
        self.encoder_config(1).validate().map_err(|e| e.to_string())?;
        let positive = [
            ("decoder_embedding_dim", self.decoder_embedding_dim),
            ("decoder_hidden_dim", self.decoder_hidden_dim),
            ("attention_dim", self.attention_dim),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("beam", self.beam),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(format!("learning_rate {} must be finite and non-negative", self.learning_rate));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(format!("lr_decay {} outside (0, 1]", self.lr_decay));
        }
        if !(self.clip_norm > 0.0) {
            return Err("clip_norm must be positive".into());
        }
        if !(self.init_scale > 0.0) {
            return Err("init_scale must be positive".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_json() {
        let c: TrainConfig = serde_json::from_str(r#"{"model": "GCNSeq", "seed": 7}"#).unwrap();
        assert_eq!(c.model, EncoderKind::GCNSeq);
        assert_eq!(c.repr(), InputRepr::Graph);
        assert_eq!(c.batch_size, 100);
        assert_eq!(c.learning_rate, 1.0);
        assert_eq!(c.lr_decay, 0.8);
        assert_eq!(c.gcn_layers, 2);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<TrainConfig>(r#"{"modle": "Seq"}"#).is_err());
    }

    #[test]
    fn invalid_combinations() {
        let c = TrainConfig {
            model: EncoderKind::TreeLSTM,
            repr: Some(InputRepr::Graph),
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = TrainConfig {
            lr_decay: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = TrainConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }
}
