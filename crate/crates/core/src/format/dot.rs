//! Graphviz output. The text depends only on the graph, so equal graphs
//! print byte-identical documents.

use std::fmt::Write;

use crate::graph::{Endpoint, GateKind, Graph, LeafKind};

fn node_attrs(k: &GateKind) -> (String, &'static str) {
    match k {
        GateKind::Lambda => ("λ".into(), "triangle"),
        GateKind::App => ("∧".into(), "invtriangle"),
        GateKind::FanOut => ("Υ".into(), "diamond"),
        GateKind::Dilation(c) => (format!("ε̄ {c}"), "box"),
        GateKind::Termination => ("⊤".into(), "square"),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn end(at: Endpoint) -> (String, Option<&'static str>) {
    match at {
        Endpoint::Port(n, p) => (n.to_string(), Some(p.name())),
        Endpoint::Input(l) | Endpoint::Output(l) => (l.to_string(), None),
    }
}

pub fn to_dot(g: &Graph) -> String {
    let mut s = String::from("digraph glc {\n");
    for (n, k) in g.nodes() {
        let (label, shape) = node_attrs(k);
        writeln!(s, "  {n} [label=\"{}\", shape={shape}];", escape(&label)).unwrap();
    }
    for (l, leaf) in g.leaves() {
        let dir = match leaf.kind {
            LeafKind::Input => "in",
            LeafKind::Output => "out",
        };
        writeln!(s, "  {l} [label=\"{}\", shape=plaintext, class={dir}];", escape(&leaf.name)).unwrap();
    }
    for (id, e) in g.edges() {
        let ((a, pa), (b, pb)) = (end(e.source), end(e.target));
        let mut attrs = vec![format!("id=\"{id}\"")];
        if let Some(p) = pa {
            attrs.push(format!("taillabel=\"{p}\""));
        }
        if let Some(p) = pb {
            attrs.push(format!("headlabel=\"{p}\""));
        }
        writeln!(s, "  {a} -> {b} [{}];", attrs.join(", ")).unwrap();
    }
    for l in g.loops() {
        writeln!(s, "  {l} [shape=point, style=invis];").unwrap();
        writeln!(s, "  {l} -> {l} [id=\"{l}\"];").unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{encode, parse};

    #[test]
    fn empty_graph() {
        assert_eq!(to_dot(&Graph::new()), "digraph glc {\n}\n");
    }

    #[test]
    fn identity() {
        let d = to_dot(&encode(&parse("\\x.x").unwrap()));
        assert_eq!(d.matches(" -> ").count(), 2);
        assert_eq!(d.matches("shape=triangle").count(), 1);
        assert!(d.contains("n0 -> n0 [id=\"e0\", taillabel=\"var_out\", headlabel=\"in\"];"), "{d}");
    }

    #[test]
    fn deterministic() {
        let t = parse("(\\x.x x) (\\y.y)").unwrap();
        assert_eq!(to_dot(&encode(&t)), to_dot(&encode(&t)));
    }
}
