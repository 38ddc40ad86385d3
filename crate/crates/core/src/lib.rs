//! AMR-to-text generation with sequential, tree and graph encoders.
//!
//! The crate covers the whole pipeline: PENMAN parsing ([`amr`]), the
//! sequence/tree/Levi-graph input representations ([`transforms`]), a small
//! reverse-mode autodiff engine ([`tensor`]), BiLSTM/TreeLSTM/GCN encoders and
//! their stackings ([`encoders`]), an attentional decoder ([`seq2seq`]), the
//! evaluation harness ([`eval`]), corpus reading and preprocessing
//! ([`corpus`]) and the commands behind the CLI ([`pipeline`]).

pub mod amr;
pub mod transforms;
pub mod tensor;
pub mod encoders;
pub mod seq2seq;
pub mod eval;
pub mod corpus;
pub mod pipeline;
