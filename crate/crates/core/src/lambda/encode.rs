use crate::graph::{Endpoint, GateKind, Graph, GraphBuilder, Port};

use super::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Binder {
    Bound(usize),
    Free(String),
}

/// A subterm's value: either a concrete output, or an occurrence of a
/// variable whose source is wired once the binder is known.
#[derive(Clone, Copy)]
enum Val {
    At(Endpoint),
    Occ(usize),
}

struct Encoder {
    b: GraphBuilder,
    scope: Vec<(String, usize)>,
    binders: usize,
    occs: Vec<(Binder, Option<Endpoint>)>,
}

/// Translates a term into the lambda sector.
///
/// Each abstraction becomes a λ gate whose `in` receives the body and whose
/// `term_out` carries the abstraction; each application becomes an ∧ gate.
/// A variable used several times is distributed by a left-leaning fan-out
/// tree from its source, in left-to-right order of occurrence; an unused
/// bound variable goes into a termination. Free variables are input leaves
/// named after the variable, and the result leaves through the output leaf
/// `out`.
pub fn encode(t: &Term) -> Graph {
    let mut e = Encoder { b: GraphBuilder::new(), scope: Vec::new(), binders: 0, occs: Vec::new() };
    let root = e.term(t);
    let mut free: Vec<String> = Vec::new();
    for (b, _) in &e.occs {
        if let Binder::Free(x) = b {
            if !free.contains(x) {
                free.push(x.clone());
            }
        }
    }
    let out = e.b.output("out");
    e.connect(root, out);
    for x in free {
        let src = e.b.input(x.clone());
        let targets = e.targets(&Binder::Free(x));
        e.distribute(src, targets);
    }
    e.b.build().expect("encoding produces a valid graph")
}

impl Encoder {
    fn term(&mut self, t: &Term) -> Val {
        match t {
            Term::Var(x) => {
                let binder = match self.scope.iter().rev().find(|(y, _)| y == x) {
                    Some((_, id)) => Binder::Bound(*id),
                    None => Binder::Free(x.clone()),
                };
                self.occs.push((binder, None));
                Val::Occ(self.occs.len() - 1)
            }
            Term::Lam(x, body) => {
                let l = self.b.node(GateKind::Lambda);
                let id = self.binders;
                self.binders += 1;
                self.scope.push((x.clone(), id));
                let v = self.term(body);
                self.scope.pop();
                let inp = self.b.port(l, Port::In);
                self.connect(v, inp);
                let targets = self.targets(&Binder::Bound(id));
                let src = self.b.port(l, Port::VarOut);
                self.distribute(src, targets);
                Val::At(Endpoint::Port(l, Port::TermOut))
            }
            Term::App(f, a) => {
                let n = self.b.node(GateKind::App);
                let vf = self.term(f);
                let va = self.term(a);
                self.connect(vf, Endpoint::Port(n, Port::FunIn));
                self.connect(va, Endpoint::Port(n, Port::ArgIn));
                Val::At(Endpoint::Port(n, Port::Out))
            }
        }
    }

    fn connect(&mut self, v: Val, target: Endpoint) {
        match v {
            Val::At(src) => {
                self.b.edge(src, target);
            }
            Val::Occ(i) => self.occs[i].1 = Some(target),
        }
    }

    fn targets(&self, b: &Binder) -> Vec<Endpoint> {
        self.occs
            .iter()
            .filter(|(x, _)| x == b)
            .map(|(_, t)| t.expect("occurrence connected before its binder closes"))
            .collect()
    }

    /// `src` feeds `u1..uk`: F1.right -> uk, F1.left -> F2, ..., and the last
    /// fan-out feeds u1 (left) and u2 (right).
    fn distribute(&mut self, src: Endpoint, targets: Vec<Endpoint>) {
        match targets.len() {
            0 => {
                let t = self.b.node(GateKind::Termination);
                self.b.edge(src, Endpoint::Port(t, Port::In));
            }
            1 => {
                self.b.edge(src, targets[0]);
            }
            k => {
                let mut cur = src;
                for i in (2..k).rev() {
                    let f = self.b.node(GateKind::FanOut);
                    self.b.edge(cur, Endpoint::Port(f, Port::In));
                    self.b.edge(Endpoint::Port(f, Port::RightOut), targets[i]);
                    cur = Endpoint::Port(f, Port::LeftOut);
                }
                let f = self.b.node(GateKind::FanOut);
                self.b.edge(cur, Endpoint::Port(f, Port::In));
                self.b.edge(Endpoint::Port(f, Port::LeftOut), targets[0]);
                self.b.edge(Endpoint::Port(f, Port::RightOut), targets[1]);
            }
        }
    }
}
