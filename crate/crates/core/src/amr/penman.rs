use super::{AmrGraph, Edge, Node, NodeKind};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnclosedParen,
    UnexpectedCloseParen,
    DuplicateVariable(String),
    ExpectedRelation(String),
    ExpectedVariable,
    ExpectedSlash,
    ExpectedConcept,
    ExpectedTarget,
    UnterminatedString,
    TrailingInput,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use ParseErrorKind::*;
        match self {
            Empty => f.write_str("empty input"),
            UnclosedParen => f.write_str("unbalanced parentheses: `(` is never closed"),
            UnexpectedCloseParen => f.write_str("unbalanced parentheses: unexpected `)`"),
            DuplicateVariable(v) => write!(f, "variable `{v}` is defined twice"),
            ExpectedRelation(t) => write!(f, "expected a relation starting with `:`, found `{t}`"),
            ExpectedVariable => f.write_str("expected a variable after `(`"),
            ExpectedSlash => f.write_str("expected `/` after the variable"),
            ExpectedConcept => f.write_str("expected a concept after `/`"),
            ExpectedTarget => f.write_str("expected a node, variable or constant after the relation"),
            UnterminatedString => f.write_str("unterminated string literal"),
            TrailingInput => f.write_str("unexpected input after the top-level graph"),
        }
    }
}

/// A PENMAN syntax error with a 1-based line/column position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Symbol(String),
    Str(String),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(kind: ParseErrorKind, pos: Pos) -> ParseError {
    ParseError {
        kind,
        line: pos.line,
        column: pos.column,
    }
}

fn strip_alignment(s: &str) -> &str {
    // `~e.3` style alignment markers are dropped.
    match s.find('~') {
        Some(i) if i > 0 => &s[..i],
        _ => s,
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let mut at_line_start = true;

    macro_rules! bump {
        ($c:expr) => {{
            if $c == '\n' {
                line += 1;
                column = 1;
                at_line_start = true;
            } else {
                column += 1;
                if !$c.is_whitespace() {
                    at_line_start = false;
                }
            }
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '#' && at_line_start {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                bump!(c);
            }
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            bump!(c);
            continue;
        }
        match c {
            '(' => {
                chars.next();
                bump!(c);
                toks.push((Tok::Open, pos));
            }
            ')' => {
                chars.next();
                bump!(c);
                toks.push((Tok::Close, pos));
            }
            '/' => {
                chars.next();
                bump!(c);
                toks.push((Tok::Slash, pos));
            }
            '"' => {
                chars.next();
                bump!(c);
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    bump!(c);
                    match c {
                        '\\' => {
                            if let Some(n) = chars.next() {
                                bump!(n);
                                s.push(n);
                            }
                        }
                        '"' => {
                            closed = true;
                            break;
                        }
                        _ => s.push(c),
                    }
                }
                if !closed {
                    return Err(err(ParseErrorKind::UnterminatedString, pos));
                }
                // A trailing alignment marker may follow the closing quote.
                if chars.peek() == Some(&'~') {
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' {
                            break;
                        }
                        chars.next();
                        bump!(c);
                    }
                }
                toks.push((Tok::Str(s), pos));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    // `/` only separates when it stands alone or ends a variable.
                    if c == '/' && !s.is_empty() && !s.starts_with(':') {
                        break;
                    }
                    chars.next();
                    bump!(c);
                    s.push(c);
                }
                let s = strip_alignment(&s).to_string();
                if s.starts_with(':') {
                    toks.push((Tok::Role(s), pos));
                } else {
                    toks.push((Tok::Symbol(s), pos));
                }
            }
        }
    }
    Ok(toks)
}

enum Target {
    Node(usize),
    Var(String),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    vars: HashSet<String>,
    defined: HashMap<String, usize>,
    nodes: Vec<Node>,
    edges: Vec<(usize, String, Option<Target>)>,
    constants: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.i)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn new_constant(&mut self, value: String, quoted: bool) -> usize {
        let id = format!("_c{}", self.constants);
        self.constants += 1;
        self.nodes.push(Node::constant(id, value, quoted));
        self.nodes.len() - 1
    }

    /// Parses `( var / concept (:role target)* )`; the opening paren has
    /// already been consumed and sits at `open`.
    fn node(&mut self, open: Pos) -> Result<usize, ParseError> {
        let var = match self.next() {
            Some((Tok::Symbol(s), pos)) => (s, pos),
            Some((_, pos)) => return Err(err(ParseErrorKind::ExpectedVariable, pos)),
            None => return Err(err(ParseErrorKind::UnclosedParen, open)),
        };
        match self.next() {
            Some((Tok::Slash, _)) => {}
            Some((_, pos)) => return Err(err(ParseErrorKind::ExpectedSlash, pos)),
            None => return Err(err(ParseErrorKind::UnclosedParen, open)),
        }
        let concept = match self.next() {
            Some((Tok::Symbol(s), _)) | Some((Tok::Str(s), _)) => s,
            Some((_, pos)) => return Err(err(ParseErrorKind::ExpectedConcept, pos)),
            None => return Err(err(ParseErrorKind::UnclosedParen, open)),
        };
        if self.defined.contains_key(&var.0) {
            return Err(err(ParseErrorKind::DuplicateVariable(var.0), var.1));
        }
        self.nodes.push(Node::instance(var.0.clone(), concept));
        let idx = self.nodes.len() - 1;
        self.defined.insert(var.0, idx);

        loop {
            match self.next() {
                Some((Tok::Close, _)) => return Ok(idx),
                Some((Tok::Role(role), _)) => {
                    let slot = self.edges.len();
                    self.edges.push((idx, role, None));
                    let target = match self.next() {
                        Some((Tok::Open, pos)) => Target::Node(self.node(pos)?),
                        Some((Tok::Symbol(s), _)) => {
                            if self.vars.contains(&s) {
                                Target::Var(s)
                            } else {
                                Target::Node(self.new_constant(s, false))
                            }
                        }
                        Some((Tok::Str(s), _)) => Target::Node(self.new_constant(s, true)),
                        Some((Tok::Close, pos)) | Some((Tok::Role(_), pos)) | Some((Tok::Slash, pos)) => {
                            return Err(err(ParseErrorKind::ExpectedTarget, pos))
                        }
                        None => return Err(err(ParseErrorKind::UnclosedParen, open)),
                    };
                    self.edges[slot].2 = Some(target);
                }
                Some((Tok::Symbol(s), pos)) | Some((Tok::Str(s), pos)) => {
                    return Err(err(ParseErrorKind::ExpectedRelation(s), pos))
                }
                Some((Tok::Slash, pos)) => {
                    return Err(err(ParseErrorKind::ExpectedRelation("/".into()), pos))
                }
                Some((Tok::Open, pos)) => {
                    return Err(err(ParseErrorKind::ExpectedRelation("(".into()), pos))
                }
                None => return Err(err(ParseErrorKind::UnclosedParen, open)),
            }
        }
    }
}

/// Parses a single PENMAN expression into an [`AmrGraph`].
///
/// Variables may be re-mentioned anywhere (before or after their
/// definition); each re-mention adds an incoming edge to the existing node.
/// Bare symbols that are not variables become constant nodes.
pub fn parse_penman(text: &str) -> Result<AmrGraph, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(err(ParseErrorKind::Empty, Pos { line: 1, column: 1 }));
    }
    // Variables are the symbols directly between `(` and `/`.
    let mut vars = HashSet::new();
    for w in toks.windows(3) {
        if let (Tok::Open, Tok::Symbol(v), Tok::Slash) = (&w[0].0, &w[1].0, &w[2].0) {
            vars.insert(v.clone());
        }
    }
    let mut p = Parser {
        toks,
        i: 0,
        vars,
        defined: HashMap::new(),
        nodes: Vec::new(),
        edges: Vec::new(),
        constants: 0,
    };
    let root = match p.next() {
        Some((Tok::Open, pos)) => p.node(pos)?,
        Some((Tok::Close, pos)) => return Err(err(ParseErrorKind::UnexpectedCloseParen, pos)),
        Some((_, pos)) => return Err(err(ParseErrorKind::ExpectedVariable, pos)),
        None => unreachable!(),
    };
    if let Some((tok, pos)) = p.peek().cloned() {
        let kind = if tok == Tok::Close {
            ParseErrorKind::UnexpectedCloseParen
        } else {
            ParseErrorKind::TrailingInput
        };
        return Err(err(kind, pos));
    }
    let Parser {
        defined,
        nodes,
        edges: pending,
        ..
    } = p;
    let edges = pending
        .into_iter()
        .map(|(source, role, target)| {
            let target = match target.expect("every relation has a target") {
                Target::Node(t) => t,
                Target::Var(v) => defined[&v],
            };
            Edge {
                source,
                role,
                target,
            }
        })
        .collect();
    Ok(AmrGraph { nodes, edges, root })
}

fn is_plain_symbol(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with(':')
        && !s.starts_with('#')
        && !s
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/' | '~'))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Picks variable names: original ids when they are unambiguous, otherwise
/// fresh `v0, v1, ...` names for every instance node.
fn variable_names(graph: &AmrGraph) -> Vec<String> {
    let constants: HashSet<&str> = graph
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Constant { quoted: false }))
        .map(|n| n.label.as_str())
        .collect();
    let mut seen = HashSet::new();
    let keep = graph
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Instance)
        .all(|n| is_plain_symbol(&n.id) && !constants.contains(n.id.as_str()) && seen.insert(n.id.as_str()));
    let mut counter = 0;
    graph
        .nodes
        .iter()
        .map(|n| {
            if keep {
                n.id.clone()
            } else {
                loop {
                    let v = format!("v{counter}");
                    counter += 1;
                    if !constants.contains(v.as_str()) {
                        break v;
                    }
                }
            }
        })
        .collect()
}

/// Writes the graph in PENMAN notation. The first visit of a node prints its
/// subtree; later visits print only the variable.
pub fn serialize_penman(graph: &AmrGraph) -> String {
    let names = variable_names(graph);
    let out_edges = graph.outgoing();
    let mut printed = vec![false; graph.nodes.len()];
    let mut s = String::new();
    write_node(graph, &names, &out_edges, graph.root, 1, &mut printed, &mut s);
    s
}

fn write_node(
    graph: &AmrGraph,
    names: &[String],
    out_edges: &[Vec<usize>],
    node: usize,
    depth: usize,
    printed: &mut [bool],
    s: &mut String,
) {
    let n = &graph.nodes[node];
    if let NodeKind::Constant { quoted } = n.kind {
        if quoted || !is_plain_symbol(&n.label) {
            s.push_str(&quote(&n.label));
        } else {
            s.push_str(&n.label);
        }
        return;
    }
    if printed[node] {
        s.push_str(&names[node]);
        return;
    }
    printed[node] = true;
    let concept = if is_plain_symbol(&n.label) {
        n.label.clone()
    } else {
        quote(&n.label)
    };
    let _ = write!(s, "({} / {}", names[node], concept);
    for &e in &out_edges[node] {
        let edge = &graph.edges[e];
        s.push('\n');
        for _ in 0..depth {
            s.push_str("    ");
        }
        s.push_str(&edge.role);
        s.push(' ');
        write_node(graph, names, out_edges, edge.target, depth + 1, printed, s);
    }
    s.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::FIGURE_ONE_PENMAN;

    fn kind(text: &str) -> (ParseErrorKind, usize, usize) {
        let e = parse_penman(text).unwrap_err();
        (e.kind, e.line, e.column)
    }

    #[test]
    fn figure_one_structure() {
        let g = parse_penman(FIGURE_ONE_PENMAN).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        let h = g.find_id("h").unwrap();
        assert_eq!(g.indegrees()[h], 2);
        assert_eq!(g.nodes[g.root].label, "eat-01");
        let roles: Vec<_> = g.edges.iter().map(|e| e.role.as_str()).collect();
        assert_eq!(roles, [":arg0", ":arg1", ":instrument", ":part-of"]);
    }

    #[test]
    fn minimal_graph() {
        let g = parse_penman("(a / alpha)").unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.edges.is_empty());
        assert_eq!(g.nodes[g.root].id, "a");
        assert_eq!(serialize_penman(&g), "(a / alpha)");
    }

    #[test]
    fn constants_are_distinct_nodes() {
        let g = parse_penman(r#"(p / person :name (n / name :op1 "John" :op2 "Smith") :age 5 :polarity - :quant 5)"#)
            .unwrap();
        assert_eq!(g.node_count(), 7);
        let fives = g.nodes.iter().filter(|n| n.label == "5").count();
        assert_eq!(fives, 2);
        assert!(g.nodes.iter().any(|n| n.label == "John" && n.kind == NodeKind::Constant { quoted: true }));
        assert_eq!(g.reentrancy_count(), 0);
    }

    #[test]
    fn forward_reference_is_resolved() {
        let g = parse_penman("(w / want-01 :arg1 (g / go-02 :arg0 b) :arg0 (b / boy))").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.reentrancy_count(), 1);
    }

    #[test]
    fn alignment_markers_are_stripped() {
        let g = parse_penman("(e / eat-01~e.1 :arg0~e.0 (h / he~e.0))").unwrap();
        assert_eq!(g.nodes[0].label, "eat-01");
        assert_eq!(g.edges[0].role, ":arg0");
    }

    #[test]
    fn errors_are_positioned() {
        assert_eq!(kind(""), (ParseErrorKind::Empty, 1, 1));
        assert_eq!(kind("  \n# ::snt hi\n"), (ParseErrorKind::Empty, 1, 1));
        assert_eq!(kind("(a / b :x (c / d)").0, ParseErrorKind::UnclosedParen);
        assert_eq!(kind("(a / b :x (c / d)").1, 1);
        assert_eq!(kind("(a / b :x (c / d)").2, 1);
        assert_eq!(kind("(a / b))"), (ParseErrorKind::UnexpectedCloseParen, 1, 8));
        assert_eq!(
            kind("(a / b\n  :x (a / c))"),
            (ParseErrorKind::DuplicateVariable("a".into()), 2, 7)
        );
        assert_eq!(
            kind("(a / b arg0 (c / d))"),
            (ParseErrorKind::ExpectedRelation("arg0".into()), 1, 8)
        );
        assert_eq!(kind("(a / b :x \"open").0, ParseErrorKind::UnterminatedString);
        assert_eq!(kind("(a b)").0, ParseErrorKind::ExpectedSlash);
        assert_eq!(kind("(a / b) (c / d)").0, ParseErrorKind::TrailingInput);
    }

    #[test]
    fn serialize_prints_reentrancy_as_variable() {
        let g = parse_penman(FIGURE_ONE_PENMAN).unwrap();
        let text = serialize_penman(&g);
        assert_eq!(text.matches("(h / he)").count(), 1);
        assert!(text.contains(":part-of h)"));
        let back = parse_penman(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn quoted_constants_survive() {
        let g = parse_penman(r#"(n / name :op1 "New York" :op2 "a\"b")"#).unwrap();
        let back = parse_penman(&serialize_penman(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn ambiguous_variable_names_are_replaced() {
        // Variable `x` collides with the bare constant `x`.
        let g = AmrGraph::new(
            vec![Node::instance("x", "thing"), Node::constant("_c0", "x", false)],
            vec![Edge::new(0, ":mod", 1)],
            0,
        );
        let text = serialize_penman(&g);
        let back = parse_penman(&text).unwrap();
        assert_eq!(back.node_count(), 2);
        assert!(back.nodes[1].is_constant());
    }
}
