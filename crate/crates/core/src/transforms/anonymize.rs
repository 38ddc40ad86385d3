use crate::amr::{AmrGraph, Edge, NodeKind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Coarse placeholder categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    PersonName,
    OrganizationName,
    LocationName,
    OtherName,
    Number,
    Date,
    Rare,
}

impl Category {
    pub fn prefix(self) -> &'static str {
        match self {
            Category::PersonName => "person_name",
            Category::OrganizationName => "organization_name",
            Category::LocationName => "location_name",
            Category::OtherName => "other_name",
            Category::Number => "number",
            Category::Date => "date",
            Category::Rare => "rare",
        }
    }

    fn for_named(concept: &str) -> Category {
        match concept {
            "person" => Category::PersonName,
            "organization" | "company" | "government-organization" | "political-party"
            | "university" | "school" | "team" | "military" | "criminal-organization"
            | "research-institute" | "newspaper" => Category::OrganizationName,
            "city" | "country" | "state" | "province" | "continent" | "world-region"
            | "location" | "river" | "mountain" | "island" | "country-region"
            | "local-region" | "city-district" | "county" | "lake" | "sea" | "ocean" => {
                Category::LocationName
            }
            _ => Category::OtherName,
        }
    }
}

/// Ordered `(placeholder, surface string)` substitutions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnonymizationMap(pub Vec<(String, String)>);

impl AnonymizationMap {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, placeholder: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(p, _)| p == placeholder)
            .map(|(_, s)| s.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymizationPolicy {
    /// Concept frequencies from the training corpus. `None` disables the
    /// rare-word rule.
    pub frequencies: Option<HashMap<String, usize>>,
    pub threshold: usize,
}

impl Default for AnonymizationPolicy {
    fn default() -> Self {
        AnonymizationPolicy {
            frequencies: None,
            threshold: 5,
        }
    }
}

impl AnonymizationPolicy {
    pub fn with_frequencies(frequencies: HashMap<String, usize>, threshold: usize) -> Self {
        AnonymizationPolicy {
            frequencies: Some(frequencies),
            threshold,
        }
    }

    /// Counts instance concept labels over a corpus.
    pub fn count_concepts<'a>(graphs: impl IntoIterator<Item = &'a AmrGraph>) -> HashMap<String, usize> {
        let mut counts = HashMap::new();
        for g in graphs {
            for n in &g.nodes {
                if n.kind == NodeKind::Instance {
                    *counts.entry(n.label.clone()).or_insert(0) += 1;
                }
            }
        }
        counts
    }

    fn is_rare(&self, concept: &str) -> bool {
        match &self.frequencies {
            Some(f) => f.get(concept).copied().unwrap_or(0) < self.threshold,
            None => false,
        }
    }
}

struct Placeholders {
    map: AnonymizationMap,
    by_key: HashMap<(Category, String), String>,
    next: HashMap<Category, usize>,
}

impl Placeholders {
    fn get(&mut self, category: Category, surface: String) -> String {
        if let Some(p) = self.by_key.get(&(category, surface.clone())) {
            return p.clone();
        }
        let idx = self.next.entry(category).or_insert(0);
        let placeholder = format!("{}_{}", category.prefix(), idx);
        *idx += 1;
        self.map.0.push((placeholder.clone(), surface.clone()));
        self.by_key.insert((category, surface), placeholder.clone());
        placeholder
    }
}

fn is_number(label: &str) -> bool {
    !label.is_empty() && label.parse::<f64>().is_ok_and(|v| v.is_finite())
}

fn strip_sense(concept: &str) -> &str {
    match concept.rsplit_once('-') {
        Some((stem, sense)) if !stem.is_empty() && sense.chars().all(|c| c.is_ascii_digit()) => stem,
        _ => concept,
    }
}

fn is_placeholder(label: &str) -> bool {
    [
        Category::PersonName,
        Category::OrganizationName,
        Category::LocationName,
        Category::OtherName,
        Category::Number,
        Category::Date,
        Category::Rare,
    ]
    .iter()
    .any(|c| {
        label
            .strip_prefix(c.prefix())
            .and_then(|rest| rest.strip_prefix('_'))
            .is_some_and(|idx| !idx.is_empty() && idx.chars().all(|ch| ch.is_ascii_digit()))
    })
}

/// Replaces names, numbers, dates and rare concepts with indexed category
/// placeholders, numbered per category in depth-first order.
pub fn anonymize(graph: &AmrGraph, policy: &AnonymizationPolicy) -> (AmrGraph, AnonymizationMap) {
    let out = graph.outgoing();
    let indeg = graph.indegrees();
    let mut labels: Vec<String> = graph.nodes.iter().map(|n| n.label.clone()).collect();
    let mut removed = vec![false; graph.nodes.len()];
    let mut removed_edges = vec![false; graph.edges.len()];
    let mut ph = Placeholders {
        map: AnonymizationMap::default(),
        by_key: HashMap::new(),
        next: HashMap::new(),
    };

    let only_constant_children = |node: usize| -> bool {
        out[node].iter().all(|&e| {
            let t = graph.edges[e].target;
            graph.nodes[t].is_constant() && indeg[t] == 1
        })
    };

    // Depth-first order, each node once.
    let mut order = Vec::new();
    let mut seen = vec![false; graph.nodes.len()];
    let mut stack = vec![graph.root];
    while let Some(n) = stack.pop() {
        if seen[n] {
            continue;
        }
        seen[n] = true;
        order.push(n);
        for &e in out[n].iter().rev() {
            stack.push(graph.edges[e].target);
        }
    }

    for &node in &order {
        if removed[node] {
            continue;
        }
        let n = &graph.nodes[node];
        match n.kind {
            NodeKind::Instance => {
                let name_edge = out[node].iter().copied().find(|&e| {
                    let t = graph.edges[e].target;
                    graph.edges[e].role == ":name"
                        && graph.nodes[t].label == "name"
                        && graph.nodes[t].kind == NodeKind::Instance
                        && indeg[t] == 1
                        && !out[t].is_empty()
                        && only_constant_children(t)
                });
                if let Some(e) = name_edge {
                    let name = graph.edges[e].target;
                    let surface: Vec<&str> = out[name]
                        .iter()
                        .map(|&oe| graph.nodes[graph.edges[oe].target].label.as_str())
                        .collect();
                    let category = Category::for_named(&n.label);
                    labels[node] = ph.get(category, surface.join(" "));
                    removed_edges[e] = true;
                    removed[name] = true;
                    for &oe in &out[name] {
                        removed_edges[oe] = true;
                        removed[graph.edges[oe].target] = true;
                    }
                } else if n.label == "date-entity" && !out[node].is_empty() && only_constant_children(node) {
                    let surface: Vec<&str> = out[node]
                        .iter()
                        .map(|&oe| graph.nodes[graph.edges[oe].target].label.as_str())
                        .collect();
                    labels[node] = ph.get(Category::Date, surface.join(" "));
                    for &oe in &out[node] {
                        removed_edges[oe] = true;
                        removed[graph.edges[oe].target] = true;
                    }
                } else if !is_placeholder(&n.label) && policy.is_rare(&n.label) {
                    labels[node] = ph.get(Category::Rare, strip_sense(&n.label).to_string());
                }
            }
            NodeKind::Constant { quoted: false } if is_number(&n.label) => {
                labels[node] = ph.get(Category::Number, n.label.clone());
            }
            NodeKind::Constant { .. } => {}
        }
    }

    let mut remap = vec![usize::MAX; graph.nodes.len()];
    let mut nodes = Vec::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        if !removed[i] {
            remap[i] = nodes.len();
            let mut node = node.clone();
            node.label = labels[i].clone();
            nodes.push(node);
        }
    }
    let edges = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(e, _)| !removed_edges[*e])
        .map(|(_, edge)| Edge::new(remap[edge.source], edge.role.clone(), remap[edge.target]))
        .collect();
    (AmrGraph::new(nodes, edges, remap[graph.root]), ph.map)
}

/// Replaces every occurrence of a mapped surface string in a tokenized
/// sentence by its placeholder. Matching is case-insensitive; longer
/// surfaces win.
pub fn anonymize_sentence(tokens: &[String], map: &AnonymizationMap) -> Vec<String> {
    let mut entries: Vec<(Vec<String>, &str)> = map
        .0
        .iter()
        .map(|(p, s)| (s.split_whitespace().map(str::to_lowercase).collect(), p.as_str()))
        .filter(|(s, _): &(Vec<String>, &str)| !s.is_empty())
        .collect();
    entries.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    'outer: while i < tokens.len() {
        for (surface, placeholder) in &entries {
            if lower[i..].starts_with(surface) {
                out.push((*placeholder).to_string());
                i += surface.len();
                continue 'outer;
            }
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

/// Maps placeholders back to their surface strings; anything not in the map
/// passes through.
pub fn deanonymize(tokens: &[String], map: &AnonymizationMap) -> Vec<String> {
    tokens
        .iter()
        .map(|t| map.get(t).map(str::to_string).unwrap_or_else(|| t.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::{parse_penman, FIGURE_ONE_PENMAN};
    use crate::transforms::linearize;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn person_name_collapses() {
        let g = parse_penman(r#"(p / person :name (n / name :op1 "John"))"#).unwrap();
        let (anon, map) = anonymize(&g, &AnonymizationPolicy::default());
        assert_eq!(anon.node_count(), 1);
        assert_eq!(anon.nodes[0].label, "person_name_0");
        assert_eq!(map.0, vec![("person_name_0".to_string(), "John".to_string())]);
        assert!(anon.validate().is_empty());
    }

    #[test]
    fn two_people_are_indexed_in_order() {
        let g = parse_penman(
            r#"(m / meet-03 :arg0 (p / person :name (n / name :op1 "John"))
                 :arg1 (p2 / person :name (n2 / name :op1 "Mary" :op2 "Lee")))"#,
        )
        .unwrap();
        let (anon, map) = anonymize(&g, &AnonymizationPolicy::default());
        assert_eq!(
            linearize(&anon).tokens.join(" "),
            "meet-03 :arg0 person_name_0 :arg1 person_name_1"
        );
        assert_eq!(map.get("person_name_1"), Some("Mary Lee"));
    }

    #[test]
    fn numbers_dates_and_locations() {
        let g = parse_penman(
            r#"(v / visit-01 :arg0 (c / city :name (n / name :op1 "Paris"))
                 :time (d / date-entity :year 2008 :month 5) :quant 3)"#,
        )
        .unwrap();
        let (anon, map) = anonymize(&g, &AnonymizationPolicy::default());
        let tokens = linearize(&anon).tokens.join(" ");
        assert_eq!(tokens, "visit-01 :arg0 location_name_0 :time date_0 :quant number_0");
        assert_eq!(map.get("date_0"), Some("2008 5"));
        assert_eq!(map.get("number_0"), Some("3"));
    }

    #[test]
    fn rare_concepts_use_frequency_table() {
        let g = parse_penman("(e / eat-01 :arg0 (z / zebra) :arg1 (g / grass))").unwrap();
        let freq = HashMap::from([("eat-01".to_string(), 9), ("grass".to_string(), 7)]);
        let (anon, map) = anonymize(&g, &AnonymizationPolicy::with_frequencies(freq, 5));
        assert_eq!(linearize(&anon).tokens.join(" "), "eat-01 :arg0 rare_0 :arg1 grass");
        assert_eq!(map.get("rare_0"), Some("zebra"));
    }

    #[test]
    fn plain_graph_is_unchanged() {
        let g = parse_penman(FIGURE_ONE_PENMAN).unwrap();
        let (anon, map) = anonymize(&g, &AnonymizationPolicy::default());
        assert_eq!(anon, g);
        assert!(map.is_empty());
    }

    #[test]
    fn deanonymize_examples() {
        let map = AnonymizationMap(vec![("person_name_0".into(), "John".into())]);
        assert_eq!(deanonymize(&toks("person_name_0 ate"), &map), toks("John ate"));
        assert_eq!(
            deanonymize(&toks("person_name_1 ate"), &AnonymizationMap::default()),
            toks("person_name_1 ate")
        );
    }

    #[test]
    fn sentence_round_trip() {
        let map = AnonymizationMap(vec![
            ("person_name_0".into(), "Mary Lee".into()),
            ("number_0".into(), "3".into()),
        ]);
        let s = toks("mary lee bought 3 apples");
        let a = anonymize_sentence(&s, &map);
        assert_eq!(a, toks("person_name_0 bought number_0 apples"));
        let back = deanonymize(&a, &map).join(" ").to_lowercase();
        assert_eq!(back, s.join(" "));
    }
}
