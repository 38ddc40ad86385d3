use super::Origin;
use crate::amr::AmrGraph;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeviKind {
    Concept,
    Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeviNode {
    pub token: String,
    pub kind: LeviKind,
    pub origin: Origin,
}

/// Unlabeled bipartite graph where every labeled edge `(i, label, j)` became
/// a relation node with edges `i → label → j`.
///
/// Concept nodes keep their source index; the relation node for source edge
/// `e` sits at index `|V0| + e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeviGraph {
    pub nodes: Vec<LeviNode>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl LeviGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_path(&self, path: &[&str]) -> bool {
        fn walk(g: &LeviGraph, at: usize, rest: &[&str]) -> bool {
            match rest.split_first() {
                None => true,
                Some((next, tail)) => g
                    .edges
                    .iter()
                    .filter(|(a, b)| *a == at && g.nodes[*b].token == *next)
                    .any(|(_, b)| walk(g, *b, tail)),
            }
        }
        match path.split_first() {
            None => true,
            Some((first, rest)) => (0..self.nodes.len())
                .filter(|&i| self.nodes[i].token == *first)
                .any(|i| walk(self, i, rest)),
        }
    }

    /// Index of the Levi node for a linearization origin.
    pub fn index_of(&self, origin: Origin, concept_count: usize) -> usize {
        match origin {
            Origin::Node(n) => n,
            Origin::Edge(e) => concept_count + e,
        }
    }
}

pub fn to_levi(graph: &AmrGraph) -> LeviGraph {
    let n = graph.nodes.len();
    let mut nodes: Vec<LeviNode> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| LeviNode {
            token: node.label.clone(),
            kind: LeviKind::Concept,
            origin: Origin::Node(i),
        })
        .collect();
    let mut edges = Vec::with_capacity(2 * graph.edges.len());
    for (e, edge) in graph.edges.iter().enumerate() {
        nodes.push(LeviNode {
            token: edge.role.clone(),
            kind: LeviKind::Relation,
            origin: Origin::Edge(e),
        });
        edges.push((edge.source, n + e));
        edges.push((n + e, edge.target));
    }
    LeviGraph {
        nodes,
        edges,
        root: graph.root,
    }
}
