use std::collections::BTreeMap;
use std::fmt::Write;

use super::graph::{BpmnGraph, BpmnNode, EdgeKind, NodeKind};
use crate::error::{Error, Result};

pub const PERFORMER_COLOR: &str = "blue";
pub const RECIPIENT_COLOR: &str = "darkorange";

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_attrs(n: &BpmnNode) -> String {
    match n.kind {
        NodeKind::Task => format!("shape=box, style=rounded, label={}", quote(&n.label)),
        NodeKind::XorGateway => format!("shape=diamond, label=\"X\", tooltip={}", quote(&n.label)),
        NodeKind::AndGateway => format!("shape=diamond, label=\"+\", tooltip={}", quote(&n.label)),
        NodeKind::Actor => format!("shape=ellipse, label={}", quote(&n.label)),
        NodeKind::DataObject => format!("shape=note, label={}", quote(&n.label)),
        NodeKind::Annotation => format!("shape=box, style=dashed, label={}", quote(&n.label)),
        NodeKind::StartEvent => "shape=circle, label=\"\"".to_string(),
        NodeKind::EndEvent => "shape=doublecircle, label=\"\"".to_string(),
    }
}

/// DOT text for the graph: nodes by id, unconnected nodes declared inside a
/// `subgraph unconnected` block ranked at the source side, performer and
/// recipient edges colored and excluded from rank constraints.
pub fn emit_dot(graph: &BpmnGraph) -> String {
    let mut nodes: Vec<&BpmnNode> = graph.nodes.iter().collect();
    nodes.sort_by_key(|n| n.id);
    let mut edges: Vec<_> = graph.edges.iter().collect();
    edges.sort_by(|a, b| (a.source, a.target, a.kind, &a.label).cmp(&(b.source, b.target, b.kind, &b.label)));

    let mut out = String::new();
    out.push_str("digraph bpmn {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");
    let unconnected: Vec<&&BpmnNode> = nodes.iter().filter(|n| graph.unconnected.contains(&n.id)).collect();
    if !unconnected.is_empty() {
        out.push_str("  subgraph unconnected {\n");
        out.push_str("    rank=source;\n");
        for n in unconnected {
            let _ = writeln!(out, "    n{} [{}];", n.id, node_attrs(n));
        }
        out.push_str("  }\n");
    }
    for n in nodes.iter().filter(|n| !graph.unconnected.contains(&n.id)) {
        let _ = writeln!(out, "  n{} [{}];", n.id, node_attrs(n));
    }
    for e in edges {
        let mut attrs: Vec<String> = Vec::new();
        match e.kind {
            EdgeKind::SequenceFlow => {}
            EdgeKind::Performer => {
                attrs.push(format!("color={PERFORMER_COLOR}"));
                attrs.push("constraint=false".into());
            }
            EdgeKind::Recipient => {
                attrs.push(format!("color={RECIPIENT_COLOR}"));
                attrs.push("constraint=false".into());
            }
            EdgeKind::DataUse => attrs.push("style=dotted".into()),
            EdgeKind::Specification => {
                attrs.push("style=dotted".into());
                attrs.push("arrowhead=none".into());
            }
        }
        if !e.label.is_empty() {
            attrs.push(format!("label={}", quote(&e.label)));
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  n{} -> n{};", e.source, e.target);
        } else {
            let _ = writeln!(out, "  n{} -> n{} [{}];", e.source, e.target, attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}

/// Result of [`parse_dot`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DotGraph {
    pub name: Option<String>,
    pub directed: bool,
    /// Node statements by id, attributes merged in order of appearance.
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<DotEdge>,
    /// Subgraph name to the node ids declared or referenced inside it.
    pub subgraphs: BTreeMap<String, Vec<String>>,
    /// Top-level `key=value` statements and `graph [...]` attributes.
    pub attributes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DotEdge {
    pub source: String,
    pub target: String,
    pub attributes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Arrow,
    Line,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut out = Vec::new();
    let err = |line, msg: String| Error::Parse {
        path: "dot".into(),
        line,
        msg,
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                    if chars[i] == '\n' {
                        line += 1;
                    }
                    i += 1;
                }
                i += 2;
            }
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '=' => Tok::Eq,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                out.push((t, line));
                i += 1;
            }
            '-' if matches!(chars.get(i + 1), Some('>') | Some('-')) => {
                out.push((if chars[i + 1] == '>' { Tok::Arrow } else { Tok::Line }, line));
                i += 2;
            }
            '"' => {
                let start = line;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(start, "unterminated string".into())),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                            s.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Id(s), start));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let mut s = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_alphanumeric() || ch == '_' || ch == '.' || (ch == '-' && s.is_empty()) {
                        s.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Id(s), line));
            }
            other => return Err(err(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    directed: bool,
    out: DotGraph,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |(_, l)| *l)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: "dot".into(),
            line: self.line(),
            msg: msg.into(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    fn id(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn graph(mut self) -> Result<DotGraph> {
        if self.keyword("strict") {
            self.pos += 1;
        }
        if self.keyword("digraph") {
            self.directed = true;
        } else if !self.keyword("graph") {
            return Err(self.error("expected `graph` or `digraph`"));
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.out.name = Some(self.id()?);
        }
        self.out.directed = self.directed;
        self.expect(Tok::LBrace)?;
        self.stmt_list(None)?;
        self.expect(Tok::RBrace)?;
        if self.pos != self.toks.len() {
            return Err(self.error("trailing input after graph"));
        }
        Ok(self.out)
    }

    fn stmt_list(&mut self, sub: Option<&str>) -> Result<()> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt(sub)?;
            if self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>> {
        let mut attrs = BTreeMap::new();
        while self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            while self.peek() != Some(&Tok::RBracket) {
                let k = self.id()?;
                self.expect(Tok::Eq)?;
                let v = self.id()?;
                attrs.insert(k, v);
                if matches!(self.peek(), Some(Tok::Comma) | Some(Tok::Semi)) {
                    self.pos += 1;
                }
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(attrs)
    }

    fn note_member(&mut self, sub: Option<&str>, id: &str) {
        if let Some(s) = sub {
            let members = self.out.subgraphs.entry(s.to_string()).or_default();
            if !members.iter().any(|m| m == id) {
                members.push(id.to_string());
            }
        }
    }

    fn stmt(&mut self, sub: Option<&str>) -> Result<()> {
        if self.keyword("subgraph") || self.peek() == Some(&Tok::LBrace) {
            if self.keyword("subgraph") {
                self.pos += 1;
            }
            let name = if matches!(self.peek(), Some(Tok::Id(_))) {
                self.id()?
            } else {
                format!("_anonymous{}", self.out.subgraphs.len())
            };
            self.out.subgraphs.entry(name.clone()).or_default();
            self.expect(Tok::LBrace)?;
            self.stmt_list(Some(&name))?;
            return self.expect(Tok::RBrace);
        }
        if self.keyword("node") || self.keyword("edge") || self.keyword("graph") {
            let is_graph = self.keyword("graph");
            self.pos += 1;
            let attrs = self.attr_list()?;
            if is_graph && sub.is_none() {
                self.out.attributes.extend(attrs);
            }
            return Ok(());
        }
        let first = self.id()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                let v = self.id()?;
                if sub.is_none() {
                    self.out.attributes.insert(first, v);
                }
                Ok(())
            }
            Some(Tok::Arrow) | Some(Tok::Line) => {
                let mut chain = vec![first];
                while let Some(op) = self.peek().cloned() {
                    let ok = match op {
                        Tok::Arrow => self.directed,
                        Tok::Line => !self.directed,
                        _ => break,
                    };
                    if !ok {
                        return Err(self.error("edge operator does not match graph type"));
                    }
                    self.pos += 1;
                    chain.push(self.id()?);
                }
                let attrs = self.attr_list()?;
                for id in &chain {
                    self.out.nodes.entry(id.clone()).or_default();
                    self.note_member(sub, id);
                }
                for w in chain.windows(2) {
                    self.out.edges.push(DotEdge {
                        source: w[0].clone(),
                        target: w[1].clone(),
                        attributes: attrs.clone(),
                    });
                }
                Ok(())
            }
            _ => {
                let attrs = self.attr_list()?;
                self.out.nodes.entry(first.clone()).or_default().extend(attrs);
                self.note_member(sub, &first);
                Ok(())
            }
        }
    }
}

/// Parses the DOT subset: `[strict] (graph|digraph) [id] { ... }` with node,
/// edge (chained), attribute and `id=id` statements, nested subgraphs,
/// quoted strings and comments. Ports and HTML labels are not supported.
pub fn parse_dot(text: &str) -> Result<DotGraph> {
    let parser = Parser {
        toks: lex(text)?,
        pos: 0,
        directed: false,
        out: DotGraph::default(),
    };
    parser.graph()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpmn::graph::BpmnEdge;

    fn sample() -> BpmnGraph {
        let node = |id, kind, label: &str| BpmnNode {
            id,
            kind,
            label: label.into(),
            mentions: vec![id],
        };
        let mut g = BpmnGraph {
            nodes: vec![
                node(0, NodeKind::Actor, "the \"clerk\""),
                node(1, NodeKind::Task, "check request"),
                node(2, NodeKind::DataObject, "form"),
                node(3, NodeKind::XorGateway, "if"),
            ],
            edges: vec![
                BpmnEdge {
                    source: 0,
                    target: 1,
                    kind: EdgeKind::Performer,
                    label: String::new(),
                    conditions: vec![],
                },
                BpmnEdge {
                    source: 3,
                    target: 1,
                    kind: EdgeKind::SequenceFlow,
                    label: "ok".into(),
                    conditions: vec![],
                },
            ],
            ..Default::default()
        };
        g.normalize();
        g
    }

    #[test]
    fn shapes_and_unconnected_block() {
        let dot = emit_dot(&sample());
        assert!(dot.lines().any(|l| l.contains("n0 [") && l.contains("shape=ellipse")));
        let parsed = parse_dot(&dot).unwrap();
        assert_eq!(parsed.subgraphs["unconnected"], vec!["n2".to_string()]);
        assert_eq!(parsed.nodes["n0"]["label"], "the \"clerk\"");
        assert_eq!(parsed.nodes["n3"]["label"], "X");
        let perf = parsed.edges.iter().find(|e| e.source == "n0").unwrap();
        assert_eq!(perf.attributes["color"], PERFORMER_COLOR);
        assert_eq!(perf.attributes["constraint"], "false");
        assert_eq!(parsed.attributes["rankdir"], "LR");
    }

    #[test]
    fn empty_graph() {
        let dot = emit_dot(&BpmnGraph::default());
        let parsed = parse_dot(&dot).unwrap();
        assert!(parsed.nodes.is_empty() && parsed.edges.is_empty());
        assert!(parsed.directed);
    }

    #[test]
    fn deterministic() {
        assert_eq!(emit_dot(&sample()), emit_dot(&sample()));
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_dot("digraph { a -> }").is_err());
        assert!(parse_dot("digraph { a -- b }").is_err());
        assert!(parse_dot("digraph { \"a }").is_err());
        assert!(parse_dot("digraph { } x").is_err());
        let g = parse_dot("graph g { a -- b -- c [w=1]; /* c */ subgraph { d } }").unwrap();
        assert_eq!(g.edges.len(), 2);
        assert!(g.nodes.contains_key("d"));
    }
}
