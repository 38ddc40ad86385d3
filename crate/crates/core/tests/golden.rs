//! Parser output against hand-enumerated node and edge lists.

use amrgen::amr::{parse_penman, serialize_penman, AmrGraph};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[derive(Debug, Default, PartialEq)]
struct Expected {
    root: String,
    nodes: BTreeMap<String, String>,
    constants: Vec<String>,
    edges: Vec<(String, String, String)>,
}

fn read_expected(text: &str) -> Expected {
    let mut e = Expected::default();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let parts: Vec<&str> = line.splitn(4, ' ').collect();
        match parts[0] {
            "root" => e.root = parts[1].to_string(),
            "node" => {
                e.nodes.insert(parts[1].to_string(), parts[2].to_string());
            }
            "const" => e.constants.push(parts[1].trim_matches('"').to_string()),
            "edge" => e.edges.push((parts[1].into(), parts[2].into(), parts[3].trim_matches('"').replace("=\"", "="))),
            other => panic!("bad fixture line `{other}`"),
        }
    }
    e.constants.sort();
    e.edges.sort();
    e
}

/// Variables keep their names; constants are referred to as `=label`.
fn observed(g: &AmrGraph) -> Expected {
    let name = |i: usize| {
        let n = &g.nodes[i];
        if n.is_constant() {
            format!("={}", n.label)
        } else {
            n.id.clone()
        }
    };
    let mut e = Expected {
        root: name(g.root),
        ..Default::default()
    };
    for n in &g.nodes {
        if n.is_constant() {
            e.constants.push(n.label.clone());
        } else {
            e.nodes.insert(n.id.clone(), n.label.clone());
        }
    }
    e.edges = g
        .edges
        .iter()
        .map(|ed| (name(ed.source), ed.role.clone(), name(ed.target)))
        .collect();
    e.constants.sort();
    e.edges.sort();
    e
}

#[test]
fn golden_corpus() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "amr"))
        .collect();
    files.sort();
    assert_eq!(files.len(), 20);
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        let expected = read_expected(&fs::read_to_string(f.with_extension("expected")).unwrap());
        let g = parse_penman(&text).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        assert_eq!(observed(&g), expected, "{}", f.display());
        let again = parse_penman(&serialize_penman(&g)).unwrap();
        assert_eq!(again.node_count(), g.node_count(), "{}", f.display());
        assert_eq!(again.edge_count(), g.edge_count(), "{}", f.display());
    }
}
