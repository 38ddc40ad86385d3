use super::config::TrainConfig;
use super::model::Model;
use super::vocab::Vocab;
use super::Seq2SeqError;
use crate::tensor::Tensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

const MAGIC: &[u8; 8] = b"AMRGENCK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Offset in f64 values from the start of the payload.
    pub offset: usize,
}

/// Training metadata stored with the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epoch: usize,
    pub dev_bleu: f64,
    pub dev_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub crate_version: String,
    pub config: TrainConfig,
    pub config_hash: String,
    pub src_vocab: Vocab,
    pub tgt_vocab: Vocab,
    pub params: Vec<ParamEntry>,
    pub meta: TrainingMeta,
}

/// A saved model: the JSON manifest plus the raw parameter values.
///
/// On disk: 8 magic bytes, a little-endian `u32` format version, a `u64`
/// manifest length, the manifest as JSON, then every parameter as
/// little-endian `f64` in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub manifest: Manifest,
    pub values: Vec<Tensor>,
}

fn corrupt(msg: impl Into<String>) -> Seq2SeqError {
    Seq2SeqError::Checkpoint(msg.into())
}

impl Checkpoint {
    pub fn from_model(model: &Model, meta: TrainingMeta) -> Self {
        let mut offset = 0;
        let mut params = Vec::new();
        let mut values = Vec::new();
        for id in model.params.ids() {
            let v = model.params.value(id);
            params.push(ParamEntry {
                name: model.params.name(id).to_string(),
                rows: v.rows(),
                cols: v.cols(),
                offset,
            });
            offset += v.len();
            values.push(v.clone());
        }
        Checkpoint {
            manifest: Manifest {
                format_version: FORMAT_VERSION,
                crate_version: env!("CARGO_PKG_VERSION").to_string(),
                config: model.config.clone(),
                config_hash: model.config.hash(),
                src_vocab: model.src_vocab.clone(),
                tgt_vocab: model.tgt_vocab.clone(),
                params,
                meta,
            },
            values,
        }
    }

    /// Rebuilds the model and checks that the stored parameters match the
    /// shapes the configuration implies.
    pub fn to_model(&self) -> Result<Model, Seq2SeqError> {
        let m = &self.manifest;
        if m.config.hash() != m.config_hash {
            return Err(corrupt("configuration hash does not match the stored configuration"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut model = Model::new(m.config.clone(), m.src_vocab.clone(), m.tgt_vocab.clone(), &mut rng)?;
        if model.params.len() != m.params.len() {
            return Err(corrupt(format!(
                "configuration implies {} parameters, checkpoint has {}",
                model.params.len(),
                m.params.len()
            )));
        }
        for (entry, value) in m.params.iter().zip(&self.values) {
            model
                .params
                .load(&entry.name, value.clone())
                .map_err(|e| corrupt(format!("parameter `{}`: {e}", entry.name)))?;
        }
        Ok(model)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let json = serde_json::to_vec(&self.manifest).expect("manifest serializes");
        let payload: usize = self.values.iter().map(Tensor::len).sum();
        let mut out = Vec::with_capacity(20 + json.len() + 8 * payload);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for v in &self.values {
            for x in v.data() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Seq2SeqError> {
        if bytes.len() < 20 || &bytes[..8] != MAGIC {
            return Err(corrupt("not a checkpoint file"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(corrupt(format!("unsupported checkpoint version {version}")));
        }
        let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
        let json = bytes.get(20..20 + len).ok_or_else(|| corrupt("truncated manifest"))?;
        let manifest: Manifest = serde_json::from_slice(json).map_err(|e| corrupt(format!("manifest: {e}")))?;
        let mut payload = &bytes[20 + len..];
        let mut values = Vec::with_capacity(manifest.params.len());
        let mut offset = 0;
        for p in &manifest.params {
            if p.offset != offset {
                return Err(corrupt(format!("parameter `{}` has offset {}, expected {offset}", p.name, p.offset)));
            }
            let n = p.rows * p.cols;
            if payload.len() < 8 * n {
                return Err(corrupt("truncated parameter payload"));
            }
            let data = payload[..8 * n]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            payload = &payload[8 * n..];
            values.push(Tensor::from_vec(p.rows, p.cols, data)?);
            offset += n;
        }
        if !payload.is_empty() {
            return Err(corrupt("trailing bytes after parameters"));
        }
        Ok(Checkpoint { manifest, values })
    }

    pub fn save(&self, path: &Path) -> Result<(), Seq2SeqError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, Seq2SeqError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
