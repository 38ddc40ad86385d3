use crate::amr::{AmrGraph, Edge, Node};
use serde::{Deserialize, Serialize};

/// A reentrancy-free copy of an AMR graph. `copy_of[i]` is the source node
/// that tree node `i` was copied from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmrTree {
    pub graph: AmrGraph,
    pub copy_of: Vec<usize>,
}

impl AmrTree {
    /// Parent of every tree node (`None` for the root).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.graph.nodes.len()];
        for edge in &self.graph.edges {
            parent[edge.target] = Some(edge.source);
        }
        parent
    }
}

/// Splits every node with `n > 1` incoming edges into `n` identically
/// labeled nodes with one incoming edge each.
///
/// The traversal matches [`linearize`](super::linearize): the first visit of
/// a node keeps its outgoing edges, later visits (including a cycle back onto
/// the current path) become leaf copies.
pub fn to_tree(graph: &AmrGraph) -> AmrTree {
    let out = graph.outgoing();
    let mut expanded = vec![false; graph.nodes.len()];
    let mut copies = vec![0usize; graph.nodes.len()];
    let mut nodes = Vec::new();
    let mut copy_of = Vec::new();
    let mut edges = Vec::new();

    let mut emit = |src: usize, nodes: &mut Vec<Node>, copy_of: &mut Vec<usize>| -> usize {
        let original = &graph.nodes[src];
        let mut node = original.clone();
        if copies[src] > 0 {
            node.id = format!("{}.{}", original.id, copies[src]);
        }
        copies[src] += 1;
        nodes.push(node);
        copy_of.push(src);
        nodes.len() - 1
    };

    let root = emit(graph.root, &mut nodes, &mut copy_of);
    expanded[graph.root] = true;
    // (source node, tree node, cursor)
    let mut stack = vec![(graph.root, root, 0usize)];
    while let Some((src, tree_node, cursor)) = stack.last_mut() {
        let (src, tree_node) = (*src, *tree_node);
        if *cursor == out[src].len() {
            stack.pop();
            continue;
        }
        let e = out[src][*cursor];
        *cursor += 1;
        let target = graph.edges[e].target;
        let child = emit(target, &mut nodes, &mut copy_of);
        edges.push(Edge::new(tree_node, graph.edges[e].role.clone(), child));
        if !expanded[target] {
            expanded[target] = true;
            stack.push((target, child, 0));
        }
    }
    AmrTree {
        graph: AmrGraph::new(nodes, edges, root),
        copy_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::{parse_penman, FIGURE_ONE_PENMAN};
    use crate::transforms::linearize;

    #[test]
    fn figure_one_duplicates_he() {
        let g = parse_penman(FIGURE_ONE_PENMAN).unwrap();
        let t = to_tree(&g);
        assert!(t.graph.indegrees().iter().all(|&d| d <= 1));
        let he: Vec<_> = (0..t.graph.nodes.len())
            .filter(|&i| t.graph.nodes[i].label == "he")
            .collect();
        assert_eq!(he.len(), 2);
        let h = g.find_id("h").unwrap();
        assert!(he.iter().all(|&i| t.copy_of[i] == h));
        let parents = t.parents();
        let roles: Vec<_> = he
            .iter()
            .map(|&i| {
                let p = parents[i].unwrap();
                t.graph.edges.iter().find(|e| e.source == p && e.target == i).unwrap().role.clone()
            })
            .collect();
        assert_eq!(roles, [":arg0", ":part-of"]);
        // The second copy is a leaf.
        assert!(t.graph.outgoing()[he[1]].is_empty());
        assert_eq!(t.graph.node_count(), g.node_count() + g.reentrancy_count());
        assert_eq!(linearize(&t.graph).tokens, linearize(&g).tokens);
    }

    #[test]
    fn tree_input_is_unchanged() {
        let g = parse_penman("(a / a1 :x (b / b1 :y (c / c1)) :z (d / d1))").unwrap();
        let t = to_tree(&g);
        assert_eq!(t.copy_of, (0..4).collect::<Vec<_>>());
        assert_eq!(t.graph, g);
    }

    #[test]
    fn two_cycle_is_broken() {
        // a -> b -> a; hand enumeration: a, b, and a leaf copy of a.
        let g = parse_penman("(a / x :r (b / y :s a))").unwrap();
        let t = to_tree(&g);
        assert_eq!(t.graph.node_count(), 3);
        assert_eq!(t.graph.edge_count(), 2);
        assert_eq!(t.copy_of, [0, 1, 0]);
        assert!(t.graph.outgoing()[2].is_empty());
        assert!(t.graph.validate().is_empty());
    }
}
