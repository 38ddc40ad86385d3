//! Random AMR graphs shared by the integration tests.
#![allow(dead_code)]

use amrgen::amr::{AmrGraph, Edge, Node};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};

pub const CONCEPTS: &[&str] = &[
    "want-01", "go-02", "eat-01", "boy", "girl", "city", "large", "pizza", "see-01", "he", "she", "dog",
];
pub const ROLES: &[&str] = &[":arg0", ":arg1", ":arg2", ":mod", ":location", ":time", ":manner"];
const NAMES: &[&str] = &["John", "Mary", "Paris", "Smith", "Acme", "Lee"];

#[derive(Debug, Clone, Copy)]
pub struct GraphShape {
    pub max_nodes: usize,
    pub reentrancies: usize,
    pub constants: bool,
    pub names: bool,
}

impl Default for GraphShape {
    fn default() -> Self {
        GraphShape {
            max_nodes: 8,
            reentrancies: 3,
            constants: true,
            names: false,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random spanning tree over instance nodes `v0 … vn`, plus up to
/// `reentrancies` extra edges from earlier to later nodes (so the graph
/// stays acyclic), plus optional constant and name children.
pub fn random_graph(seed: u64, shape: GraphShape) -> AmrGraph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=shape.max_nodes);
    let mut nodes: Vec<Node> = (0..n)
        .map(|i| Node::instance(format!("v{i}"), *CONCEPTS.choose(&mut r).unwrap()))
        .collect();
    let mut edges = Vec::new();
    let mut linked = HashSet::new();
    for i in 1..n {
        let p = r.gen_range(0..i);
        linked.insert((p, i));
        edges.push(Edge::new(p, *ROLES.choose(&mut r).unwrap(), i));
    }
    if n > 2 {
        for _ in 0..r.gen_range(0..=shape.reentrancies) {
            let a = r.gen_range(0..n - 1);
            let b = r.gen_range(a + 1..n);
            if linked.insert((a, b)) {
                edges.push(Edge::new(a, *ROLES.choose(&mut r).unwrap(), b));
            }
        }
    }
    let mut next_const = 0;
    let mut constant = |nodes: &mut Vec<Node>, label: String, quoted: bool| {
        nodes.push(Node::constant(format!("_c{next_const}"), label, quoted));
        next_const += 1;
        nodes.len() - 1
    };
    if shape.constants {
        for _ in 0..r.gen_range(0..=2) {
            let parent = r.gen_range(0..n);
            let (label, role) = if r.gen_bool(0.5) {
                (r.gen_range(1..100).to_string(), ":quant")
            } else {
                ("-".to_string(), ":polarity")
            };
            let c = constant(&mut nodes, label, false);
            edges.push(Edge::new(parent, role, c));
        }
    }
    if shape.names {
        for k in 0..r.gen_range(0..=2) {
            let parent = r.gen_range(0..n);
            nodes.push(Node::instance(format!("p{k}"), "person"));
            let person = nodes.len() - 1;
            nodes.push(Node::instance(format!("n{k}"), "name"));
            let name = nodes.len() - 1;
            edges.push(Edge::new(parent, ":arg1", person));
            edges.push(Edge::new(person, ":name", name));
            let parts = r.gen_range(1..=2);
            for (j, part) in NAMES.choose_multiple(&mut r, parts).enumerate() {
                let c = constant(&mut nodes, part.to_string(), true);
                edges.push(Edge::new(name, format!(":op{}", j + 1), c));
            }
        }
    }
    AmrGraph::new(nodes, edges, 0)
}

/// Variables by id, constants by `=label`: the parts of a graph that a
/// PENMAN round trip must preserve.
#[derive(Debug, PartialEq, Eq)]
pub struct Canonical {
    pub root: String,
    pub variables: BTreeMap<String, String>,
    pub constants: Vec<String>,
    pub edges: Vec<(String, String, String)>,
}

pub fn canonical(g: &AmrGraph) -> Canonical {
    let name = |i: usize| {
        let n = &g.nodes[i];
        if n.is_constant() {
            format!("={}", n.label)
        } else {
            n.id.clone()
        }
    };
    let mut constants: Vec<String> = g.nodes.iter().filter(|n| n.is_constant()).map(|n| n.label.clone()).collect();
    constants.sort();
    let mut edges: Vec<_> = g
        .edges
        .iter()
        .map(|e| (name(e.source), e.role.clone(), name(e.target)))
        .collect();
    edges.sort();
    Canonical {
        root: name(g.root),
        variables: g
            .nodes
            .iter()
            .filter(|n| !n.is_constant())
            .map(|n| (n.id.clone(), n.label.clone()))
            .collect(),
        constants,
        edges,
    }
}
