use crate::amr::AmrGraph;
use crate::transforms::{linearize, to_levi, to_tree, LeviGraph, TokenSequence};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputRepr {
    Sequence,
    Tree,
    Graph,
}

impl fmt::Display for InputRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputRepr::Sequence => "sequence",
            InputRepr::Tree => "tree",
            InputRepr::Graph => "graph",
        })
    }
}

impl FromStr for InputRepr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sequence" | "seq" => Ok(InputRepr::Sequence),
            "tree" => Ok(InputRepr::Tree),
            "graph" => Ok(InputRepr::Graph),
            _ => Err(format!("unknown representation `{s}`")),
        }
    }
}

/// Levi structure over which a structural encoder runs, tied to the
/// linearization by `position_node`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure<T> {
    pub node_tokens: Vec<T>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    /// Structure node shown at each linearization position.
    pub position_node: Vec<usize>,
}

impl<T> Structure<T> {
    /// First linearization position of every structure node.
    pub fn first_positions(&self) -> Vec<usize> {
        let mut first = vec![usize::MAX; self.node_tokens.len()];
        for (pos, &node) in self.position_node.iter().enumerate() {
            if first[node] == usize::MAX {
                first[node] = pos;
            }
        }
        debug_assert!(first.iter().all(|&p| p != usize::MAX), "every node occurs in the linearization");
        first
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Structure<U> {
        Structure {
            node_tokens: self.node_tokens.iter().map(f).collect(),
            edges: self.edges.clone(),
            root: self.root,
            position_node: self.position_node.clone(),
        }
    }
}

fn structure_of(levi: &LeviGraph, seq: &TokenSequence, concept_count: usize) -> Structure<String> {
    Structure {
        node_tokens: levi.nodes.iter().map(|n| n.token.clone()).collect(),
        edges: levi.edges.clone(),
        root: levi.root,
        position_node: seq.alignment.iter().map(|&o| levi.index_of(o, concept_count)).collect(),
    }
}

/// One example prepared for an encoder: the linearized tokens and, for tree
/// and graph input, the Levi structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderInput<T = usize> {
    pub repr: InputRepr,
    pub tokens: Vec<T>,
    pub structure: Option<Structure<T>>,
}

impl EncoderInput<String> {
    /// Sequence input is the linearization; tree input is the Levi graph of
    /// `to_tree(graph)`; graph input is the Levi graph of `graph`. All three
    /// share the same token sequence.
    pub fn from_graph(graph: &AmrGraph, repr: InputRepr) -> Self {
        match repr {
            InputRepr::Sequence => EncoderInput {
                repr,
                tokens: linearize(graph).tokens,
                structure: None,
            },
            InputRepr::Graph => {
                let seq = linearize(graph);
                let structure = structure_of(&to_levi(graph), &seq, graph.node_count());
                EncoderInput {
                    repr,
                    tokens: seq.tokens,
                    structure: Some(structure),
                }
            }
            InputRepr::Tree => {
                let tree = to_tree(graph);
                let seq = linearize(&tree.graph);
                let structure = structure_of(&to_levi(&tree.graph), &seq, tree.graph.node_count());
                EncoderInput {
                    repr,
                    tokens: seq.tokens,
                    structure: Some(structure),
                }
            }
        }
    }
}

impl<T> EncoderInput<T> {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> EncoderInput<U> {
        EncoderInput {
            repr: self.repr,
            tokens: self.tokens.iter().map(&mut f).collect(),
            structure: self.structure.as_ref().map(|s| s.map(&mut f)),
        }
    }
}
