//! The `.glc` text format, one statement per line:
//!
//! ```text
//! glc 1
//! node n0 lambda
//! node n1 dilation a^1*b^-2
//! edge n0.term_out -> n1.x_in
//! in x -> n0.in
//! out n1.out -> y
//! wire a -> b
//! loop 2
//! ```
//!
//! Node ids of the form `n<N>` are kept; other identifiers get the next free
//! numbers. Edges, leaves and loops are numbered in order of appearance.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::coefficient::Coefficient;
use crate::graph::{BuildError, Edge, EdgeId, Endpoint, GateKind, Graph, Leaf, LeafId, LeafKind, LoopId, NodeId, Port};

pub const VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GlcError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Validation(#[from] BuildError),
}

fn syntax(line: usize, msg: impl Into<String>) -> GlcError {
    GlcError::Syntax { line, msg: msg.into() }
}

enum Stmt {
    Node(String, GateKind),
    Edge(Ref, Ref),
    In(String, Ref),
    Out(Ref, String),
    Wire(String, String),
    Loops(usize),
}

struct Ref {
    node: String,
    port: Port,
}

fn parse_ref(line: usize, s: &str) -> Result<Ref, GlcError> {
    let (node, port) = s.rsplit_once('.').ok_or_else(|| syntax(line, format!("expected <node>.<port>, got `{s}`")))?;
    let port = port.parse().map_err(|_| syntax(line, format!("unknown port `{port}`")))?;
    if node.is_empty() {
        return Err(syntax(line, "empty node id"));
    }
    Ok(Ref { node: node.to_string(), port })
}

fn parse_kind(line: usize, words: &[&str]) -> Result<GateKind, GlcError> {
    match words {
        ["lambda"] => Ok(GateKind::Lambda),
        ["app"] => Ok(GateKind::App),
        ["fanout"] => Ok(GateKind::FanOut),
        ["term"] => Ok(GateKind::Termination),
        ["dilation", c] => c.parse::<Coefficient>().map(GateKind::Dilation).map_err(|e| syntax(line, e.to_string())),
        ["dilation"] => Err(syntax(line, "dilation needs a coefficient")),
        _ => Err(syntax(line, format!("unknown gate `{}`", words.join(" ")))),
    }
}

fn parse_stmt(line: usize, words: &[&str]) -> Result<Option<Stmt>, GlcError> {
    let arrow = |w: &str| if w == "->" { Ok(()) } else { Err(syntax(line, format!("expected `->`, got `{w}`"))) };
    let stmt = match words {
        [] => return Ok(None),
        ["glc", v] if *v == VERSION => return Ok(None),
        ["glc", v] => return Err(syntax(line, format!("unsupported version `{v}`"))),
        ["node", id, kind @ ..] => Stmt::Node(id.to_string(), parse_kind(line, kind)?),
        ["edge", a, ar, b] => {
            arrow(ar)?;
            Stmt::Edge(parse_ref(line, a)?, parse_ref(line, b)?)
        }
        ["in", name, ar, b] => {
            arrow(ar)?;
            Stmt::In(name.to_string(), parse_ref(line, b)?)
        }
        ["out", a, ar, name] => {
            arrow(ar)?;
            Stmt::Out(parse_ref(line, a)?, name.to_string())
        }
        ["wire", a, ar, b] => {
            arrow(ar)?;
            Stmt::Wire(a.to_string(), b.to_string())
        }
        ["loop", n] => Stmt::Loops(n.parse().map_err(|_| syntax(line, format!("bad loop count `{n}`")))?),
        [w, ..] => return Err(syntax(line, format!("unknown or malformed statement `{w}`"))),
    };
    Ok(Some(stmt))
}

fn numbered(s: &str) -> Option<u32> {
    let d = s.strip_prefix('n')?;
    if d.is_empty() || !d.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    d.parse().ok()
}

/// Parses and validates a document.
pub fn parse_glc(text: &str) -> Result<Graph, GlcError> {
    let mut stmts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        if let Some(s) = parse_stmt(i + 1, &words)? {
            stmts.push((i + 1, s));
        }
    }

    let mut ids: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut nodes = BTreeMap::new();
    let mut next = stmts
        .iter()
        .filter_map(|(_, s)| match s {
            Stmt::Node(id, _) => numbered(id).map(|n| n + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    for (line, s) in &stmts {
        if let Stmt::Node(name, kind) = s {
            let id = match numbered(name) {
                Some(n) => NodeId(n),
                None => {
                    next += 1;
                    NodeId(next - 1)
                }
            };
            if ids.insert(name.clone(), id).is_some() || nodes.insert(id, kind.clone()).is_some() {
                return Err(syntax(*line, format!("node `{name}` declared twice")));
            }
        }
    }

    let mut edges = Vec::new();
    let mut leaves = Vec::new();
    let mut loops = 0usize;
    let node_port = |line: usize, r: &Ref| -> Result<Endpoint, GlcError> {
        let n = ids.get(&r.node).ok_or_else(|| syntax(line, format!("undeclared node `{}`", r.node)))?;
        Ok(Endpoint::Port(*n, r.port))
    };
    let mut leaf = |kind: LeafKind, name: &str| {
        let id = LeafId(leaves.len() as u32);
        leaves.push((id, Leaf { kind, name: name.to_string() }));
        id
    };
    for (line, s) in &stmts {
        let edge = match s {
            Stmt::Node(..) => continue,
            Stmt::Loops(n) => {
                loops += n;
                continue;
            }
            Stmt::Edge(a, b) => Edge { source: node_port(*line, a)?, target: node_port(*line, b)? },
            Stmt::In(name, b) => {
                Edge { source: Endpoint::Input(leaf(LeafKind::Input, name)), target: node_port(*line, b)? }
            }
            Stmt::Out(a, name) => {
                Edge { source: node_port(*line, a)?, target: Endpoint::Output(leaf(LeafKind::Output, name)) }
            }
            Stmt::Wire(a, b) => Edge {
                source: Endpoint::Input(leaf(LeafKind::Input, a)),
                target: Endpoint::Output(leaf(LeafKind::Output, b)),
            },
        };
        edges.push((EdgeId(edges.len() as u32), edge));
    }
    let g = Graph::from_parts(nodes, edges, leaves, (0..loops as u32).map(LoopId));
    match g.validate().into_iter().next() {
        Some(v) => Err(GlcError::Validation(v.into())),
        None => Ok(g),
    }
}

fn port_ref(at: Endpoint) -> String {
    match at {
        Endpoint::Port(n, p) => format!("{n}.{p}"),
        _ => unreachable!("leaf endpoints are printed by name"),
    }
}

/// Prints a graph; nodes by id, then one line per edge in id order.
pub fn print_glc(g: &Graph) -> String {
    let mut s = format!("glc {VERSION}\n");
    for (n, k) in g.nodes() {
        writeln!(s, "node {n} {k}").unwrap();
    }
    let name = |l: LeafId| g.leaf(l).map(|x| x.name.as_str()).unwrap_or("?");
    for (_, e) in g.edges() {
        match (e.source, e.target) {
            (Endpoint::Input(a), Endpoint::Output(b)) => writeln!(s, "wire {} -> {}", name(a), name(b)),
            (Endpoint::Input(a), t) => writeln!(s, "in {} -> {}", name(a), port_ref(t)),
            (src, Endpoint::Output(b)) => writeln!(s, "out {} -> {}", port_ref(src), name(b)),
            (src, t) => writeln!(s, "edge {} -> {}", port_ref(src), port_ref(t)),
        }
        .unwrap();
    }
    if g.loop_count() > 0 {
        writeln!(s, "loop {}", g.loop_count()).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic_labeled;
    use crate::lambda::{encode, parse};
    use crate::macros::{termination_gadget, GadgetInput};

    #[test]
    fn loops_only() {
        let g = parse_glc("loop 2").unwrap();
        assert_eq!((g.node_count(), g.edge_count(), g.loop_count()), (0, 0, 2));
    }

    #[test]
    fn identity_document() {
        let g = parse_glc("glc 1\nnode n0 lambda\nedge n0.var_out -> n0.in\nout n0.term_out -> out\n").unwrap();
        assert!(is_isomorphic_labeled(&g, &encode(&parse("\\x.x").unwrap())));
    }

    #[test]
    fn gadget_document() {
        let g = parse_glc("node d1 dilation 1\nedge d1.out -> d1.y_in\nin x -> d1.x_in").unwrap();
        let want = crate::macros::relabel(&termination_gadget(&Coefficient::one(), GadgetInput::X), &[("1", "x")]);
        assert!(is_isomorphic_labeled(&g, &want));
    }

    #[test]
    fn print_parse_keeps_ids() {
        let g = encode(&parse("\\f.\\x.f (f x) y").unwrap());
        let h = parse_glc(&print_glc(&g)).unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), h.nodes().collect::<Vec<_>>());
        assert!(is_isomorphic_labeled(&g, &h));
        assert_eq!(print_glc(&h), print_glc(&g));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse_glc("node n0 lambda\nnode n1 warp").unwrap_err(), syntax(2, "unknown gate `warp`"));
        assert!(matches!(parse_glc("edge n0.out -> n1.in"), Err(GlcError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_glc("node a lambda\nin x -> a.in"),
            Err(GlcError::Validation(BuildError::DanglingPort(_)))
        ));
        assert!(matches!(parse_glc("node a lambda\nin x -> a.x_in"), Err(GlcError::Validation(_))));
        assert!(matches!(parse_glc("glc 9"), Err(GlcError::Syntax { line: 1, .. })));
    }
}
