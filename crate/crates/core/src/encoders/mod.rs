//! BiLSTM, bidirectional Child-Sum TreeLSTM and GCN encoders, and the seven
//! ways of stacking them.
//!
//! Every encoder returns one row per linearization position, so the decoder
//! attends over the same surface whatever the configuration.

mod gcn;
mod input;
mod lstm;
mod treelstm;

pub use gcn::{drop_edges, Activation, Adjacency, Gcn, GcnLayer};
pub use input::{EncoderInput, InputRepr, Structure};
pub use lstm::{BiLstm, Lstm};
pub use treelstm::{ChildSumCell, TreeLstm, TreeStates};

use crate::tensor::{ParamId, ParamStore, Tape, Tensor, TensorError, Var};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("input is not a tree: {0}")]
    NotATree(String),
    #[error("encoder {kind} cannot read {repr} input")]
    ReprMismatch { kind: EncoderKind, repr: InputRepr },
    #[error("invalid encoder configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncoderKind {
    Seq,
    SeqGCN,
    GCNSeq,
    SeqTreeLSTM,
    TreeLSTMSeq,
    GCN,
    TreeLSTM,
}

impl EncoderKind {
    pub const ALL: [EncoderKind; 7] = [
        EncoderKind::Seq,
        EncoderKind::SeqGCN,
        EncoderKind::GCNSeq,
        EncoderKind::SeqTreeLSTM,
        EncoderKind::TreeLSTMSeq,
        EncoderKind::GCN,
        EncoderKind::TreeLSTM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Seq => "Seq",
            EncoderKind::SeqGCN => "SeqGCN",
            EncoderKind::GCNSeq => "GCNSeq",
            EncoderKind::SeqTreeLSTM => "SeqTreeLSTM",
            EncoderKind::TreeLSTMSeq => "TreeLSTMSeq",
            EncoderKind::GCN => "GCN",
            EncoderKind::TreeLSTM => "TreeLSTM",
        }
    }

    pub fn uses_gcn(self) -> bool {
        matches!(self, EncoderKind::SeqGCN | EncoderKind::GCNSeq | EncoderKind::GCN)
    }

    pub fn uses_treelstm(self) -> bool {
        matches!(self, EncoderKind::SeqTreeLSTM | EncoderKind::TreeLSTMSeq | EncoderKind::TreeLSTM)
    }

    pub fn bilstm_first(self) -> bool {
        matches!(self, EncoderKind::Seq | EncoderKind::SeqGCN | EncoderKind::SeqTreeLSTM)
    }

    pub fn bilstm_last(self) -> bool {
        matches!(self, EncoderKind::GCNSeq | EncoderKind::TreeLSTMSeq)
    }

    /// Whether this kind accepts the given representation.
    pub fn accepts(self, repr: InputRepr) -> bool {
        match self {
            EncoderKind::Seq => repr == InputRepr::Sequence,
            k if k.uses_treelstm() => repr == InputRepr::Tree,
            _ => matches!(repr, InputRepr::Tree | InputRepr::Graph),
        }
    }

    /// The representation used when none is given explicitly.
    pub fn default_repr(self) -> InputRepr {
        match self {
            EncoderKind::Seq => InputRepr::Sequence,
            k if k.uses_treelstm() => InputRepr::Tree,
            _ => InputRepr::Graph,
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EncoderKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub kind: EncoderKind,
    pub input_repr: InputRepr,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub gcn_layers: usize,
    pub gcn_activation: Activation,
    pub highway: bool,
    pub dropout: f64,
    pub edge_dropout: f64,
    pub src_vocab_size: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            kind: EncoderKind::Seq,
            input_repr: InputRepr::Sequence,
            embedding_dim: 64,
            hidden_dim: 64,
            gcn_layers: 2,
            gcn_activation: Activation::Relu,
            highway: true,
            dropout: 0.3,
            edge_dropout: 0.1,
            src_vocab_size: 0,
        }
    }
}

impl EncoderConfig {
    pub fn new(kind: EncoderKind, embedding_dim: usize, hidden_dim: usize, src_vocab_size: usize) -> Self {
        EncoderConfig {
            kind,
            input_repr: kind.default_repr(),
            embedding_dim,
            hidden_dim,
            src_vocab_size,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if !self.kind.accepts(self.input_repr) {
            return Err(EncodeError::ReprMismatch {
                kind: self.kind,
                repr: self.input_repr,
            });
        }
        if self.embedding_dim == 0 || self.hidden_dim == 0 {
            return Err(EncodeError::Config("dimensions must be positive".into()));
        }
        if self.hidden_dim % 2 != 0 && !matches!(self.kind, EncoderKind::GCN) {
            return Err(EncodeError::Config(format!("hidden_dim {} must be even", self.hidden_dim)));
        }
        if self.kind.uses_gcn() && self.gcn_layers == 0 {
            return Err(EncodeError::Config("gcn_layers must be at least 1".into()));
        }
        for (name, rate) in [("dropout", self.dropout), ("edge_dropout", self.edge_dropout)] {
            if !(0.0..1.0).contains(&rate) {
                return Err(EncodeError::Config(format!("{name} {rate} outside [0, 1)")));
            }
        }
        if self.src_vocab_size == 0 {
            return Err(EncodeError::Config("source vocabulary is empty".into()));
        }
        Ok(())
    }

    /// Columns of each output row.
    pub fn output_dim(&self) -> usize {
        match self.kind {
            EncoderKind::GCN => self.embedding_dim,
            _ => self.hidden_dim,
        }
    }
}

/// Training flag and the random stream for dropout and edge dropout.
pub struct RunMode<'a> {
    pub training: bool,
    pub rng: Option<&'a mut ChaCha8Rng>,
}

impl RunMode<'_> {
    pub fn eval() -> Self {
        RunMode { training: false, rng: None }
    }
}

impl<'a> RunMode<'a> {
    pub fn train(rng: &'a mut ChaCha8Rng) -> Self {
        RunMode {
            training: true,
            rng: Some(rng),
        }
    }

    fn active_rng(&mut self) -> Option<&mut ChaCha8Rng> {
        if self.training {
            self.rng.as_deref_mut()
        } else {
            None
        }
    }
}

/// Tape handles produced by one encoder pass.
pub struct EncoderOutput {
    /// One row per linearization position.
    pub states: Var,
    /// Structural states in structure-node order, before any rearrangement.
    pub structural: Option<Var>,
    pub up: Option<Var>,
    pub down: Option<Var>,
}

/// Evaluated encoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStates {
    pub states: Tensor,
    pub structural: Option<Tensor>,
    pub up: Option<Tensor>,
    pub down: Option<Tensor>,
}

impl NodeStates {
    fn read(tape: &Tape, out: &EncoderOutput) -> Self {
        NodeStates {
            states: tape.value(out.states).clone(),
            structural: out.structural.map(|v| tape.value(v).clone()),
            up: out.up.map(|v| tape.value(v).clone()),
            down: out.down.map(|v| tape.value(v).clone()),
        }
    }
}

/// A configured encoder: source embeddings plus the components the kind needs.
#[derive(Debug, Clone)]
pub struct Encoder {
    pub config: EncoderConfig,
    pub embedding: ParamId,
    pub bilstm: Option<BiLstm>,
    pub gcn: Option<Gcn>,
    pub treelstm: Option<TreeLstm>,
}

impl Encoder {
    pub fn new<R: Rng + ?Sized>(config: EncoderConfig, store: &mut ParamStore, init: f64, rng: &mut R) -> Result<Self, EncodeError> {
        config.validate()?;
        let d = config.embedding_dim;
        let h = config.hidden_dim;
        let kind = config.kind;
        let embedding = store.add_uniform("enc.embedding", config.src_vocab_size, d, init, rng);
        let mut bilstm = None;
        let mut gcn = None;
        let mut treelstm = None;
        match kind {
            EncoderKind::Seq => bilstm = Some(BiLstm::new(store, "enc.bilstm", d, h, init, rng)),
            EncoderKind::SeqGCN => {
                bilstm = Some(BiLstm::new(store, "enc.bilstm", d, h, init, rng));
                gcn = Some(Gcn::new(store, "enc.gcn", h, config.gcn_layers, config.gcn_activation, config.highway, init, rng));
            }
            EncoderKind::GCNSeq => {
                gcn = Some(Gcn::new(store, "enc.gcn", d, config.gcn_layers, config.gcn_activation, config.highway, init, rng));
                bilstm = Some(BiLstm::new(store, "enc.bilstm", d, h, init, rng));
            }
            EncoderKind::GCN => {
                gcn = Some(Gcn::new(store, "enc.gcn", d, config.gcn_layers, config.gcn_activation, config.highway, init, rng));
            }
            EncoderKind::SeqTreeLSTM => {
                bilstm = Some(BiLstm::new(store, "enc.bilstm", d, h, init, rng));
                treelstm = Some(TreeLstm::new(store, "enc.treelstm", h, h / 2, init, rng));
            }
            EncoderKind::TreeLSTMSeq => {
                treelstm = Some(TreeLstm::new(store, "enc.treelstm", d, h / 2, init, rng));
                bilstm = Some(BiLstm::new(store, "enc.bilstm", h, h, init, rng));
            }
            EncoderKind::TreeLSTM => {
                treelstm = Some(TreeLstm::new(store, "enc.treelstm", d, h / 2, init, rng));
            }
        }
        Ok(Encoder {
            config,
            embedding,
            bilstm,
            gcn,
            treelstm,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.config.output_dim()
    }

    fn dropout(&self, tape: &mut Tape, x: Var, mode: &mut RunMode<'_>) -> Result<Var, EncodeError> {
        let rate = self.config.dropout;
        match mode.active_rng() {
            Some(rng) if rate > 0.0 => Ok(tape.dropout(x, 1.0 - rate, rng)?),
            _ => Ok(x),
        }
    }

    /// Runs the structural encoder over node states in structure order.
    fn structural(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        x: Var,
        input: &EncoderInput,
        mode: &mut RunMode<'_>,
    ) -> Result<(Var, Option<Var>, Option<Var>), EncodeError> {
        let structure = input.structure.as_ref().ok_or(EncodeError::ReprMismatch {
            kind: self.config.kind,
            repr: input.repr,
        })?;
        if let Some(gcn) = &self.gcn {
            let rate = self.config.edge_dropout;
            let edges = match mode.active_rng() {
                Some(rng) if rate > 0.0 => drop_edges(&structure.edges, rate, rng),
                _ => structure.edges.clone(),
            };
            let adjacency = Adjacency::new(structure.node_tokens.len(), edges);
            Ok((gcn.forward(tape, store, x, &adjacency)?, None, None))
        } else if let Some(tree) = &self.treelstm {
            let s = tree.forward(tape, store, x, &structure.edges, structure.root)?;
            Ok((s.output, Some(s.up), Some(s.down)))
        } else {
            unreachable!("structural encoder requested for a sequence-only kind")
        }
    }

    /// Builds the encoder graph on `tape`.
    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        input: &EncoderInput,
        mode: &mut RunMode<'_>,
    ) -> Result<EncoderOutput, EncodeError> {
        let kind = self.config.kind;
        if !kind.accepts(input.repr) {
            return Err(EncodeError::ReprMismatch { kind, repr: input.repr });
        }
        let table = tape.param(store, self.embedding);
        let embed_sequence = |tape: &mut Tape| tape.embedding_lookup(table, &input.tokens);

        let mut out = EncoderOutput {
            states: table,
            structural: None,
            up: None,
            down: None,
        };
        let bilstm = self.bilstm.as_ref();
        if kind == EncoderKind::Seq {
            let x = embed_sequence(tape)?;
            let x = self.dropout(tape, x, mode)?;
            out.states = bilstm.expect("Seq has a BiLSTM").forward(tape, store, x)?;
        } else {
            let structure = input.structure.as_ref().ok_or(EncodeError::ReprMismatch { kind, repr: input.repr })?;
            if kind.bilstm_first() {
                let x = embed_sequence(tape)?;
                let x = self.dropout(tape, x, mode)?;
                let seq = bilstm.expect("SeqX has a BiLSTM").forward(tape, store, x)?;
                let init = tape.gather_rows(seq, &structure.first_positions())?;
                let (s, up, down) = self.structural(tape, store, init, input, mode)?;
                out.states = tape.gather_rows(s, &structure.position_node)?;
                out.structural = Some(s);
                out.up = up;
                out.down = down;
            } else {
                let x = tape.embedding_lookup(table, &structure.node_tokens)?;
                let x = self.dropout(tape, x, mode)?;
                let (s, up, down) = self.structural(tape, store, x, input, mode)?;
                let arranged = tape.gather_rows(s, &structure.position_node)?;
                out.states = match kind.bilstm_last() {
                    true => bilstm.expect("XSeq has a BiLSTM").forward(tape, store, arranged)?,
                    false => arranged,
                };
                out.structural = Some(s);
                out.up = up;
                out.down = down;
            }
        }
        out.states = self.dropout(tape, out.states, mode)?;
        Ok(out)
    }

    /// Evaluation-mode encoding on a fresh tape.
    pub fn encode(&self, store: &ParamStore, input: &EncoderInput) -> Result<NodeStates, EncodeError> {
        let mut tape = Tape::new();
        let out = self.forward(&mut tape, store, input, &mut RunMode::eval())?;
        Ok(NodeStates::read(&tape, &out))
    }
}

/// BiLSTM over an `N × d` embedding matrix.
pub fn bilstm_encode(bilstm: &BiLstm, store: &ParamStore, embeddings: &Tensor) -> Result<NodeStates, EncodeError> {
    let mut tape = Tape::new();
    let x = tape.constant(embeddings.clone());
    let states = bilstm.forward(&mut tape, store, x)?;
    Ok(NodeStates::read(
        &tape,
        &EncoderOutput {
            states,
            structural: None,
            up: None,
            down: None,
        },
    ))
}

/// Bidirectional TreeLSTM over per-node embeddings of a tree given as edges.
pub fn treelstm_encode(
    tree: &TreeLstm,
    store: &ParamStore,
    edges: &[(usize, usize)],
    root: usize,
    embeddings: &Tensor,
) -> Result<NodeStates, EncodeError> {
    let mut tape = Tape::new();
    let x = tape.constant(embeddings.clone());
    let s = tree.forward(&mut tape, store, x, edges, root)?;
    Ok(NodeStates::read(
        &tape,
        &EncoderOutput {
            states: s.output,
            structural: None,
            up: Some(s.up),
            down: Some(s.down),
        },
    ))
}

/// GCN over per-node embeddings of a directed graph, without edge dropout.
pub fn gcn_encode(
    gcn: &Gcn,
    store: &ParamStore,
    node_count: usize,
    edges: &[(usize, usize)],
    embeddings: &Tensor,
) -> Result<NodeStates, EncodeError> {
    let mut tape = Tape::new();
    let x = tape.constant(embeddings.clone());
    let states = gcn.forward(&mut tape, store, x, &Adjacency::new(node_count, edges.iter().copied()))?;
    Ok(NodeStates::read(
        &tape,
        &EncoderOutput {
            states,
            structural: None,
            up: None,
            down: None,
        },
    ))
}

/// Configured encoder over one example, evaluation mode.
pub fn stack_encode(encoder: &Encoder, store: &ParamStore, input: &EncoderInput) -> Result<NodeStates, EncodeError> {
    encoder.encode(store, input)
}
