//! Rooted, directed, edge-labeled AMR graphs.
//!
//! Nodes are either instances (`(v / concept)`) or constants (numbers,
//! strings, polarity markers). Every constant occurrence is its own node,
//! so constants never have more than one parent when produced by the parser.

mod penman;

pub use penman::{parse_penman, serialize_penman, ParseError, ParseErrorKind};

use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// What a node stands for in PENMAN notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    /// A variable with a concept, `(v / concept)`.
    Instance,
    /// An atomic value such as `5`, `-` or `"John"`.
    Constant { quoted: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn instance(id: impl Into<String>, label: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            label: label.into(),
            kind: NodeKind::Instance,
        }
    }

    pub fn constant(id: impl Into<String>, label: impl Into<String>, quoted: bool) -> Self {
        Node {
            id: id.into(),
            label: label.into(),
            kind: NodeKind::Constant { quoted },
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, NodeKind::Constant { .. })
    }
}

/// A labeled edge `(source, role, target)` between node indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub role: String,
    pub target: usize,
}

impl Edge {
    pub fn new(source: usize, role: impl Into<String>, target: usize) -> Self {
        Edge {
            source,
            role: role.into(),
            target,
        }
    }
}

/// An AMR graph. Edge order is significant: it is the PENMAN child order and
/// drives every depth-first traversal downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmrGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub root: usize,
}

/// One broken invariant found by [`AmrGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    MissingRoot { root: usize },
    DanglingEdge { edge: usize },
    UnreachableNode { node: usize },
    DuplicateId { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRoot { root } => write!(f, "root index {root} is not a node"),
            Violation::DanglingEdge { edge } => write!(f, "edge {edge} points outside the node set"),
            Violation::UnreachableNode { node } => {
                write!(f, "node {node} is not reachable from the root")
            }
            Violation::DuplicateId { id } => write!(f, "node id `{id}` is used more than once"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphStats {
    pub reentrancy_count: usize,
    pub max_dependency_length: usize,
    pub node_count: usize,
    pub edge_count: usize,
}

impl AmrGraph {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, root: usize) -> Self {
        AmrGraph { nodes, edges, root }
    }

    /// A graph with a single instance node.
    pub fn single(label: impl Into<String>) -> Self {
        AmrGraph::new(vec![Node::instance("a", label)], Vec::new(), 0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, node: usize) -> &str {
        &self.nodes[node].label
    }

    /// Outgoing edge indices per node, in edge order.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.source < out.len() {
                out[edge.source].push(e);
            }
        }
        out
    }

    pub fn indegrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for edge in &self.edges {
            if edge.target < deg.len() {
                deg[edge.target] += 1;
            }
        }
        deg
    }

    /// Σ_v max(0, indeg(v) − 1).
    pub fn reentrancy_count(&self) -> usize {
        self.indegrees().iter().map(|&d| d.saturating_sub(1)).sum()
    }

    pub fn is_tree(&self) -> bool {
        self.reentrancy_count() == 0
            && self.indegrees().get(self.root).copied().unwrap_or(0) == 0
    }

    pub fn find_id(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let n = self.nodes.len();
        let mut seen = HashSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id.as_str()) {
                violations.push(Violation::DuplicateId {
                    id: node.id.clone(),
                });
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.source >= n || edge.target >= n {
                violations.push(Violation::DanglingEdge { edge: e });
            }
        }
        if self.root >= n {
            violations.push(Violation::MissingRoot { root: self.root });
            return violations;
        }
        let out = self.outgoing();
        let mut reached = vec![false; n];
        let mut queue = VecDeque::from([self.root]);
        reached[self.root] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &out[v] {
                let t = self.edges[e].target;
                if t < n && !reached[t] {
                    reached[t] = true;
                    queue.push_back(t);
                }
            }
        }
        for (v, r) in reached.iter().enumerate() {
            if !r {
                violations.push(Violation::UnreachableNode { node: v });
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn stats(&self) -> GraphStats {
        compute_stats(self)
    }
}

pub fn compute_stats(graph: &AmrGraph) -> GraphStats {
    GraphStats {
        reentrancy_count: graph.reentrancy_count(),
        max_dependency_length: crate::transforms::max_dependency_length(graph),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
    }
}

/// The graph from the running example: "He ate the pizza with his fingers".
pub const FIGURE_ONE_PENMAN: &str =
    "(e / eat-01 :arg0 (h / he) :arg1 (p / pizza) :instrument (f / finger :part-of h))";
