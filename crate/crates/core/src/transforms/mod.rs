//! Input representations derived from an [`AmrGraph`](crate::amr::AmrGraph):
//! the linearized token sequence, the reentrancy-free tree and the Levi graph.

mod anonymize;
mod levi;
mod linearize;
mod tree;

pub use anonymize::{
    anonymize, anonymize_sentence, deanonymize, AnonymizationMap, AnonymizationPolicy, Category,
};
pub use levi::{to_levi, LeviGraph, LeviKind, LeviNode};
pub use linearize::{first_positions, linearize, max_dependency_length, TokenSequence};
pub use tree::{to_tree, AmrTree};

use serde::{Deserialize, Serialize};

/// Where a linearization position or a Levi node comes from in the source graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Node(usize),
    Edge(usize),
}
