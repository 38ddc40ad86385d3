use super::{AnonymizationMap, Origin};
use crate::amr::AmrGraph;
use serde::{Deserialize, Serialize};

/// A depth-first linearization `x_1 … x_N` interleaving concept and relation
/// tokens, with each position aligned to its source node or edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub alignment: Vec<Origin>,
    #[serde(default)]
    pub anonymization_map: AnonymizationMap,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn position_of_edge(&self, edge: usize) -> Option<usize> {
        self.alignment.iter().position(|o| *o == Origin::Edge(edge))
    }
}

/// Depth-first traversal from the root in edge order. A node is expanded on
/// its first visit only; every later visit (reentrancy or cycle) re-emits its
/// concept token and stops.
pub fn linearize(graph: &AmrGraph) -> TokenSequence {
    let out = graph.outgoing();
    let mut expanded = vec![false; graph.nodes.len()];
    let mut tokens = Vec::with_capacity(1 + 2 * graph.edges.len());
    let mut alignment = Vec::with_capacity(tokens.capacity());

    // Explicit stack of (node, next outgoing edge cursor).
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut visit = |node: usize,
                     stack: &mut Vec<(usize, usize)>,
                     tokens: &mut Vec<String>,
                     alignment: &mut Vec<Origin>| {
        tokens.push(graph.nodes[node].label.clone());
        alignment.push(Origin::Node(node));
        if !expanded[node] {
            expanded[node] = true;
            stack.push((node, 0));
        }
    };
    visit(graph.root, &mut stack, &mut tokens, &mut alignment);
    while let Some((node, cursor)) = stack.last_mut() {
        let node = *node;
        if *cursor == out[node].len() {
            stack.pop();
            continue;
        }
        let e = out[node][*cursor];
        *cursor += 1;
        tokens.push(graph.edges[e].role.clone());
        alignment.push(Origin::Edge(e));
        visit(graph.edges[e].target, &mut stack, &mut tokens, &mut alignment);
    }
    TokenSequence {
        tokens,
        alignment,
        anonymization_map: AnonymizationMap::default(),
    }
}

/// Position (0-based) of the first occurrence of every node in the
/// linearization.
pub fn first_positions(graph: &AmrGraph, seq: &TokenSequence) -> Vec<Option<usize>> {
    let mut first = vec![None; graph.nodes.len()];
    for (pos, origin) in seq.alignment.iter().enumerate() {
        if let Origin::Node(n) = *origin {
            if first[n].is_none() {
                first[n] = Some(pos);
            }
        }
    }
    first
}

/// Longest Levi-adjacent distance `|j − i|` in the linearization. Each edge
/// contributes the distance from its parent's first occurrence to its
/// relation token and from the relation token to the child's first
/// occurrence.
pub fn max_dependency_length(graph: &AmrGraph) -> usize {
    let seq = linearize(graph);
    let first = first_positions(graph, &seq);
    let mut relation_pos = vec![0usize; graph.edges.len()];
    for (pos, origin) in seq.alignment.iter().enumerate() {
        if let Origin::Edge(e) = *origin {
            relation_pos[e] = pos;
        }
    }
    graph
        .edges
        .iter()
        .enumerate()
        .filter_map(|(e, edge)| {
            let r = relation_pos[e];
            let p = first[edge.source]?;
            let c = first[edge.target]?;
            Some(r.abs_diff(p).max(c.abs_diff(r)))
        })
        .max()
        .unwrap_or(0)
}
