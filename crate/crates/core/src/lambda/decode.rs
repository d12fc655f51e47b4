use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{Endpoint, GateKind, Graph, NodeId, Port};

use super::term::fresh_name;
use super::Term;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("not in the lambda sector: {0}")]
    NotLambdaSector(String),
    #[error("directed cycle through {0:?}")]
    CyclicDecoration(Vec<NodeId>),
    #[error("variable of {0} used outside its body")]
    ScopeEscape(NodeId),
    #[error("not a term: {0}")]
    NotATerm(String),
}

/// Largest term decode will build while unfolding shared subterms.
const MAX_SIZE: usize = 1 << 20;

/// Reads a term off a lambda-sector graph with exactly one output leaf.
///
/// Each λ gate reached through `term_out` gets a fresh binder name; its
/// `var_out`, possibly through fan-outs of any shape, names the variable.
/// A fan-out fed by a non-variable shares that subterm, which is unfolded.
/// Input leaves are free variables. Parts of the graph that never reach the
/// output (garbage behind terminations, loops) are ignored.
pub fn decode(g: &Graph) -> Result<Term, DecodeError> {
    if let Some((n, k)) = g.nodes().find(|(_, k)| matches!(k, GateKind::Dilation(_))) {
        return Err(DecodeError::NotLambdaSector(format!("{n} is a {k}")));
    }
    if let Some(cycle) = value_cycle(g) {
        return Err(DecodeError::CyclicDecoration(cycle));
    }
    let outs: Vec<_> = g.output_leaves().collect();
    let [(out, _)] = outs[..] else {
        return Err(DecodeError::NotATerm(format!("expected one output leaf, found {}", outs.len())));
    };
    let root = g
        .edge_at(Endpoint::Output(out))
        .and_then(|e| g.edge(e))
        .map(|e| e.source)
        .ok_or_else(|| DecodeError::NotATerm("output leaf is not connected".into()))?;
    let avoid: BTreeSet<String> = g.input_leaves().map(|(_, name)| name.to_string()).collect();
    let mut d = Decoder { g, avoid, scope: Vec::new(), names: HashMap::new(), size: 0 };
    d.value(root)
}

struct Decoder<'a> {
    g: &'a Graph,
    avoid: BTreeSet<String>,
    scope: Vec<String>,
    names: HashMap<NodeId, Vec<String>>,
    size: usize,
}

impl Decoder<'_> {
    fn feeder(&self, n: NodeId, p: Port) -> Result<Endpoint, DecodeError> {
        self.g.feeder(n, p).ok_or_else(|| DecodeError::NotATerm(format!("{n}.{p} is not connected")))
    }

    fn value(&mut self, at: Endpoint) -> Result<Term, DecodeError> {
        self.size += 1;
        if self.size > MAX_SIZE {
            return Err(DecodeError::NotATerm("unfolded term is too large".into()));
        }
        match at {
            Endpoint::Input(leaf) => Ok(Term::Var(self.g.leaf(leaf).expect("leaf exists").name.clone())),
            Endpoint::Output(_) => Err(DecodeError::NotATerm("edge leaves an output leaf".into())),
            Endpoint::Port(n, p) => match (self.g.kind(n).expect("node exists"), p) {
                (GateKind::Lambda, Port::TermOut) => {
                    let name = fresh_name(&self.avoid, &self.scope);
                    self.scope.push(name.clone());
                    self.names.entry(n).or_default().push(name.clone());
                    let body = self.feeder(n, Port::In).and_then(|b| self.value(b));
                    self.names.get_mut(&n).unwrap().pop();
                    self.scope.pop();
                    Ok(Term::Lam(name, Box::new(body?)))
                }
                (GateKind::Lambda, Port::VarOut) => match self.names.get(&n).and_then(|v| v.last()) {
                    Some(name) => Ok(Term::Var(name.clone())),
                    None => Err(DecodeError::ScopeEscape(n)),
                },
                (GateKind::App, Port::Out) => {
                    let f = self.feeder(n, Port::FunIn)?;
                    let a = self.feeder(n, Port::ArgIn)?;
                    Ok(Term::app(self.value(f)?, self.value(a)?))
                }
                (GateKind::FanOut, _) => {
                    let src = self.feeder(n, Port::In)?;
                    self.value(src)
                }
                (k, p) => Err(DecodeError::NotATerm(format!("unexpected {k} output {p}"))),
            },
        }
    }
}

/// A directed cycle that does not pass through a λ `var_out`. Such a cycle
/// makes a value depend on itself.
fn value_cycle(g: &Graph) -> Option<Vec<NodeId>> {
    let mut indeg: HashMap<NodeId, usize> = g.nodes().map(|(n, _)| (n, 0)).collect();
    let succ = |n: NodeId| -> Vec<NodeId> {
        let kind = g.kind(n).expect("node exists");
        kind.outputs()
            .filter(|p| !(*kind == GateKind::Lambda && *p == Port::VarOut))
            .filter_map(|p| g.consumer(n, p).and_then(|c| c.node()))
            .collect()
    };
    for (n, _) in g.nodes() {
        for m in succ(n) {
            *indeg.get_mut(&m).unwrap() += 1;
        }
    }
    let mut ready: Vec<NodeId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    while let Some(n) = ready.pop() {
        indeg.remove(&n);
        for m in succ(n) {
            let d = indeg.get_mut(&m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(m);
            }
        }
    }
    if indeg.is_empty() {
        return None;
    }
    let mut cycle: Vec<NodeId> = indeg.into_keys().collect();
    cycle.sort();
    Some(cycle)
}

/// Membership of a graph in the two gate-defined sectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorReport {
    pub lambda_sector: bool,
    pub emergent_sector: bool,
    pub violations: Vec<String>,
}

/// Lambda sector: only λ, ∧, fan-out and termination gates. Emergent
/// sector: only fan-out, dilation and termination gates.
pub fn sector_of(g: &Graph) -> SectorReport {
    let mut r = SectorReport { lambda_sector: true, emergent_sector: true, violations: Vec::new() };
    for (n, k) in g.nodes() {
        match k {
            GateKind::Lambda | GateKind::App => {
                r.emergent_sector = false;
                r.violations.push(format!("{n}: {k} is outside the emergent sector"));
            }
            GateKind::Dilation(_) => {
                r.lambda_sector = false;
                r.violations.push(format!("{n}: {k} is outside the lambda sector"));
            }
            GateKind::FanOut | GateKind::Termination => {}
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::lambda::{encode, parse};

    fn round_trip(s: &str) {
        let t = parse(s).unwrap();
        let back = decode(&encode(&t)).unwrap();
        assert!(back.alpha_eq(&t), "{s} came back as {back}");
    }

    #[test]
    fn round_trips() {
        for s in [
            "\\f.\\x.f (f x)",
            "\\x.x",
            "\\x.y",
            "(\\x.x x) (\\x.x x)",
            "f f f",
            "\\x.\\x.x",
            "\\x y z.x z (y z)",
            "a (\\b.b a) a",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn dilation_is_rejected() {
        let mut b = GraphBuilder::new();
        b.node(GateKind::dilation("a"));
        b.complete_with_leaves();
        let g = b.build().unwrap();
        assert!(matches!(decode(&g), Err(DecodeError::NotLambdaSector(_))));
    }

    #[test]
    fn cycle_through_apps() {
        let mut b = GraphBuilder::new();
        let a1 = b.node(GateKind::App);
        let a2 = b.node(GateKind::App);
        let f = b.node(GateKind::FanOut);
        b.link(a1, Port::Out, a2, Port::FunIn);
        b.link(a2, Port::Out, f, Port::In);
        b.link(f, Port::LeftOut, a1, Port::FunIn);
        let out = b.output("out");
        b.edge(b.port(f, Port::RightOut), out);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        assert!(matches!(decode(&g), Err(DecodeError::CyclicDecoration(_))));
    }

    #[test]
    fn variable_at_the_root_escapes() {
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let out = b.output("out");
        b.edge(b.port(l, Port::VarOut), out);
        let t = b.node(GateKind::Termination);
        b.link(l, Port::TermOut, t, Port::In);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        assert!(matches!(decode(&g), Err(DecodeError::ScopeEscape(_))));
    }

    #[test]
    fn shared_subterm_is_unfolded() {
        // (\y.y) shared by both sides of an application
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let f = b.node(GateKind::FanOut);
        let a = b.node(GateKind::App);
        b.link(l, Port::VarOut, l, Port::In);
        b.link(l, Port::TermOut, f, Port::In);
        b.link(f, Port::LeftOut, a, Port::FunIn);
        b.link(f, Port::RightOut, a, Port::ArgIn);
        let out = b.output("out");
        b.edge(b.port(a, Port::Out), out);
        let g = b.build().unwrap();
        assert!(decode(&g).unwrap().alpha_eq(&parse("(\\y.y) (\\y.y)").unwrap()));
    }

    #[test]
    fn sectors() {
        let r = sector_of(&encode(&parse("\\x.x").unwrap()));
        assert!(r.lambda_sector && !r.emergent_sector);
        let mut b = GraphBuilder::new();
        b.node(GateKind::FanOut);
        b.node(GateKind::dilation("a"));
        b.complete_with_leaves();
        let r = sector_of(&b.build().unwrap());
        assert!(!r.lambda_sector && r.emergent_sector);
        assert_eq!(r.violations.len(), 1);
    }
}
