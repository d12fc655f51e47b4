use crate::coefficient::Coefficient;
use crate::graph::{Endpoint, GateKind, Graph, NodeId, Port, Wire};
use crate::rewrite::{Attach, Dst, Rewrite, Src};

use super::{stale, Direction, Inverse, MoveError, MoveKind, Planned, Site};

type R<T> = Result<T, MoveError>;

pub(crate) fn node_of(site: &Site) -> R<NodeId> {
    match site {
        Site::Node { node } => Ok(*node),
        other => Err(stale(format!("expected a node site, got {other}"))),
    }
}

/// The two node ports joined by an edge site.
pub(crate) fn edge_of(g: &Graph, site: &Site) -> R<(NodeId, Port, NodeId, Port)> {
    let Site::Edge { edge } = site else {
        return Err(stale(format!("expected an edge site, got {site}")));
    };
    let e = g.edge(*edge).ok_or_else(|| stale(format!("edge {edge} does not exist")))?;
    match (e.source, e.target) {
        (Endpoint::Port(a, pa), Endpoint::Port(b, pb)) => Ok((a, pa, b, pb)),
        _ => Err(stale(format!("edge {edge} touches a leaf"))),
    }
}

pub(crate) fn point_of(g: &Graph, site: &Site) -> R<Attach> {
    let Site::Point { at } = site else {
        return Err(stale(format!("expected a point site, got {site}")));
    };
    check_wire(g, at.wire)?;
    if at.slot != 0 {
        return Err(stale("a single attachment uses slot 0"));
    }
    Ok(*at)
}

pub(crate) fn check_wire(g: &Graph, w: Wire) -> R<()> {
    if g.has_wire(w) {
        Ok(())
    } else {
        Err(stale(format!("wire {w} does not exist")))
    }
}

fn pair_of(g: &Graph, site: &Site) -> R<(Attach, Attach)> {
    let Site::Pair { first, second } = site else {
        return Err(stale(format!("expected a pair site, got {site}")));
    };
    check_wire(g, first.wire)?;
    check_wire(g, second.wire)?;
    let ok = if first.wire == second.wire {
        matches!((first.slot, second.slot), (0, 1) | (1, 0))
    } else {
        first.slot == 0 && second.slot == 0
    };
    if ok {
        Ok((*first, *second))
    } else {
        Err(stale("attachment slots do not describe a valid pair"))
    }
}

fn expect(g: &Graph, n: NodeId, want: impl Fn(&GateKind) -> bool, what: &str) -> R<()> {
    match g.kind(n) {
        Some(k) if want(k) => Ok(()),
        Some(k) => Err(stale(format!("{n} is a {}, not a {what}", k.tag()))),
        None => Err(stale(format!("node {n} does not exist"))),
    }
}

fn coef(g: &Graph, n: NodeId) -> Option<&Coefficient> {
    g.kind(n).and_then(GateKind::coefficient)
}

fn consumer_node(g: &Graph, n: NodeId, p: Port) -> Option<NodeId> {
    g.consumer(n, p).and_then(Endpoint::node)
}

fn feeder_node(g: &Graph, n: NodeId, p: Port) -> Option<NodeId> {
    g.feeder(n, p).and_then(Endpoint::node)
}

fn consumer_is(g: &Graph, n: NodeId, p: Port, target: NodeId, tp: Port) -> bool {
    g.consumer(n, p) == Some(Endpoint::Port(target, tp))
}

fn is_termination(g: &Graph, at: Option<Endpoint>) -> Option<NodeId> {
    match at {
        Some(Endpoint::Port(t, Port::In)) if g.kind(t) == Some(&GateKind::Termination) => Some(t),
        _ => None,
    }
}

/// The gates and ports of a two-gate pattern that a beta-like move erases.
/// `top` plays the role of λ and `bottom` the role of ∧.
struct Shape {
    top: GateKind,
    bottom: GateKind,
    top_in: Port,
    var: Port,
    term: Port,
    fun: Port,
    arg: Port,
    out: Port,
}

impl Shape {
    fn lambda() -> Self {
        Shape {
            top: GateKind::Lambda,
            bottom: GateKind::App,
            top_in: Port::In,
            var: Port::VarOut,
            term: Port::TermOut,
            fun: Port::FunIn,
            arg: Port::ArgIn,
            out: Port::Out,
        }
    }

    fn dual(eps: &Coefficient) -> Self {
        Shape {
            top: GateKind::FanOut,
            bottom: GateKind::Dilation(eps.clone()),
            top_in: Port::In,
            var: Port::RightOut,
            term: Port::LeftOut,
            fun: Port::XIn,
            arg: Port::YIn,
            out: Port::Out,
        }
    }

    fn forward(&self, g: &Graph, site: &Site) -> R<Planned> {
        let (t, tp, b, bp) = edge_of(g, site)?;
        if tp != self.term || bp != self.fun {
            return Err(stale("edge does not join the pattern ports"));
        }
        expect(g, t, |k| *k == self.top, self.top.tag())?;
        expect(g, b, |k| *k == self.bottom, &self.bottom.to_string())?;
        Ok(Planned {
            rewrite: Rewrite {
                delete: vec![t, b],
                links: vec![
                    (Src::Feeder(t, self.top_in), Dst::Consumer(b, self.out)),
                    (Src::Feeder(b, self.arg), Dst::Consumer(t, self.var)),
                ],
                ..Default::default()
            },
            inverse: Inverse::Pair(0, 1),
        })
    }

    fn reverse(&self, g: &Graph, site: &Site) -> R<Planned> {
        let (p1, p2) = pair_of(g, site)?;
        Ok(Planned {
            rewrite: Rewrite {
                cuts: vec![p1, p2],
                new_nodes: vec![self.top.clone(), self.bottom.clone()],
                links: vec![
                    (Src::Up(0), Dst::New(0, self.top_in)),
                    (Src::New(1, self.out), Dst::Down(0)),
                    (Src::Up(1), Dst::New(1, self.arg)),
                    (Src::New(0, self.var), Dst::Down(1)),
                    (Src::New(0, self.term), Dst::New(1, self.fun)),
                ],
                ..Default::default()
            },
            inverse: Inverse::EdgeAt(0, self.term),
        })
    }
}

pub(crate) fn plan(g: &Graph, m: &MoveKind, site: &Site, dir: Direction) -> R<Planned> {
    use Direction::*;
    match (m, dir) {
        (MoveKind::Beta, Forward) => Shape::lambda().forward(g, site),
        (MoveKind::Beta, Reverse) => Shape::lambda().reverse(g, site),
        (MoveKind::BetaStar(e), Forward) => Shape::dual(e).forward(g, site),
        (MoveKind::BetaStar(e), Reverse) => Shape::dual(e).reverse(g, site),
        (MoveKind::ExtBeta(e), Forward) => ext_beta(g, site, e),
        (MoveKind::ExtBeta(e), Reverse) => ext_beta_reverse(g, site, e),
        (MoveKind::CoComm, _) => cocomm(g, site),
        (MoveKind::CoAssoc, Forward) => coassoc(g, site, true),
        (MoveKind::CoAssoc, Reverse) => coassoc(g, site, false),
        (MoveKind::PruneApp, Forward) => prune_app(g, site),
        (MoveKind::PruneLambda, Forward) => prune_lambda(g, site),
        (MoveKind::PruneDilation, Forward) => prune_dilation(g, site),
        (MoveKind::PruneFanOutOne, Forward) => prune_fanout_one(g, site),
        (MoveKind::PruneFanOutBoth, Forward) => prune_fanout_both(g, site),
        (MoveKind::LoopAdd, Forward) | (MoveKind::LoopRemove, Reverse) => add_loop(site),
        (MoveKind::LoopRemove, Forward) | (MoveKind::LoopAdd, Reverse) => remove_loop(g, site),
        (MoveKind::R1a(e), Forward) => r1a(g, site, e),
        (MoveKind::R1a(e), Reverse) => r1a_reverse(g, site, e),
        (MoveKind::R1b(e), Forward) => r1b(g, site, e),
        (MoveKind::R1b(e), Reverse) => r1b_reverse(g, site, e),
        (MoveKind::R2(e, mu), Forward) => r2(g, site, e, mu),
        (MoveKind::R2(e, mu), Reverse) => r2_reverse(g, site, e, mu),
        (MoveKind::Ext2, Forward) => ext2(g, site),
        (MoveKind::Ext2, Reverse) => ext2_reverse(g, site),
        (m, dir) => Err(if dir == Reverse {
            MoveError::DirectionForbidden(m.clone())
        } else {
            stale(format!("{m} is not a local move"))
        }),
    }
}

// 1 -> L.in; L.term_out -> A.fun_in; A.out -> F.in; F.left_out -> D.x_in;
// L.var_out -> D.y_in; 2 -> A.arg_in; D.out -> 3; F.right_out -> 4.
fn ext_beta(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let (l, lp, a, ap) = edge_of(g, site)?;
    if (lp, ap) != (Port::TermOut, Port::FunIn) {
        return Err(stale("edge does not join term_out to fun_in"));
    }
    expect(g, l, |k| *k == GateKind::Lambda, "lambda")?;
    expect(g, a, |k| *k == GateKind::App, "app")?;
    let f = consumer_node(g, a, Port::Out).ok_or_else(|| stale("app output is not a gate"))?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    if !consumer_is(g, a, Port::Out, f, Port::In) {
        return Err(stale("app output does not enter the fan-out"));
    }
    let d = consumer_node(g, f, Port::LeftOut).ok_or_else(|| stale("fan-out left branch is not a gate"))?;
    if !consumer_is(g, f, Port::LeftOut, d, Port::XIn) || coef(g, d) != Some(eps) {
        return Err(stale("fan-out left branch does not enter the dilation"));
    }
    if !consumer_is(g, l, Port::VarOut, d, Port::YIn) {
        return Err(stale("variable does not enter the dilation"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![l, a, f, d],
            links: vec![
                (Src::Feeder(l, Port::In), Dst::Consumer(d, Port::Out)),
                (Src::Feeder(a, Port::ArgIn), Dst::Consumer(f, Port::RightOut)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Pair(0, 1),
    })
}

fn ext_beta_reverse(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let (p1, p2) = pair_of(g, site)?;
    Ok(Planned {
        rewrite: Rewrite {
            cuts: vec![p1, p2],
            new_nodes: vec![GateKind::Lambda, GateKind::App, GateKind::FanOut, GateKind::Dilation(eps.clone())],
            links: vec![
                (Src::Up(0), Dst::New(0, Port::In)),
                (Src::New(3, Port::Out), Dst::Down(0)),
                (Src::Up(1), Dst::New(1, Port::ArgIn)),
                (Src::New(2, Port::RightOut), Dst::Down(1)),
                (Src::New(0, Port::TermOut), Dst::New(1, Port::FunIn)),
                (Src::New(1, Port::Out), Dst::New(2, Port::In)),
                (Src::New(2, Port::LeftOut), Dst::New(3, Port::XIn)),
                (Src::New(0, Port::VarOut), Dst::New(3, Port::YIn)),
            ],
            ..Default::default()
        },
        inverse: Inverse::EdgeAt(0, Port::TermOut),
    })
}

fn cocomm(g: &Graph, site: &Site) -> R<Planned> {
    let f = node_of(site)?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![f],
            new_nodes: vec![GateKind::FanOut],
            links: vec![
                (Src::Feeder(f, Port::In), Dst::New(0, Port::In)),
                (Src::New(0, Port::LeftOut), Dst::Consumer(f, Port::RightOut)),
                (Src::New(0, Port::RightOut), Dst::Consumer(f, Port::LeftOut)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(0),
    })
}

/// Forward: `P.left_out -> Q.in` becomes `P'.right_out -> Q'.in`. Reverse
/// is the mirror image.
fn coassoc(g: &Graph, site: &Site, forward: bool) -> R<Planned> {
    let (p, pp, q, qp) = edge_of(g, site)?;
    let (inner, outer) = if forward { (Port::LeftOut, Port::RightOut) } else { (Port::RightOut, Port::LeftOut) };
    if pp != inner || qp != Port::In || p == q {
        return Err(stale("edge does not join two fan-outs in the expected position"));
    }
    expect(g, p, |k| *k == GateKind::FanOut, "fanout")?;
    expect(g, q, |k| *k == GateKind::FanOut, "fanout")?;
    // Outer exits in left-to-right order a, b, c.
    let (a, b, c) = if forward {
        (Dst::Consumer(q, Port::LeftOut), Dst::Consumer(q, Port::RightOut), Dst::Consumer(p, Port::RightOut))
    } else {
        (Dst::Consumer(p, Port::LeftOut), Dst::Consumer(q, Port::LeftOut), Dst::Consumer(q, Port::RightOut))
    };
    let links = if forward {
        vec![
            (Src::Feeder(p, Port::In), Dst::New(0, Port::In)),
            (Src::New(0, outer), Dst::New(1, Port::In)),
            (Src::New(0, Port::LeftOut), a),
            (Src::New(1, Port::LeftOut), b),
            (Src::New(1, Port::RightOut), c),
        ]
    } else {
        vec![
            (Src::Feeder(p, Port::In), Dst::New(0, Port::In)),
            (Src::New(0, outer), Dst::New(1, Port::In)),
            (Src::New(1, Port::LeftOut), a),
            (Src::New(1, Port::RightOut), b),
            (Src::New(0, Port::RightOut), c),
        ]
    };
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![p, q],
            new_nodes: vec![GateKind::FanOut, GateKind::FanOut],
            links,
            ..Default::default()
        },
        inverse: Inverse::EdgeAt(0, outer),
    })
}

fn terminate(links: &mut Vec<(Src, Dst)>, new_nodes: &mut Vec<GateKind>, src: Src) {
    links.push((src, Dst::New(new_nodes.len(), Port::In)));
    new_nodes.push(GateKind::Termination);
}

fn prune_app(g: &Graph, site: &Site) -> R<Planned> {
    let a = node_of(site)?;
    expect(g, a, |k| *k == GateKind::App, "app")?;
    let t = is_termination(g, g.consumer(a, Port::Out)).ok_or_else(|| stale("app output is not terminated"))?;
    let (mut links, mut new_nodes) = (Vec::new(), Vec::new());
    terminate(&mut links, &mut new_nodes, Src::Feeder(a, Port::FunIn));
    terminate(&mut links, &mut new_nodes, Src::Feeder(a, Port::ArgIn));
    one_way(Rewrite { delete: vec![a, t], new_nodes, links, ..Default::default() })
}

fn prune_lambda(g: &Graph, site: &Site) -> R<Planned> {
    let l = node_of(site)?;
    expect(g, l, |k| *k == GateKind::Lambda, "lambda")?;
    let t1 = is_termination(g, g.consumer(l, Port::VarOut)).ok_or_else(|| stale("variable is not terminated"))?;
    let t2 = is_termination(g, g.consumer(l, Port::TermOut)).ok_or_else(|| stale("body is not terminated"))?;
    let (mut links, mut new_nodes) = (Vec::new(), Vec::new());
    terminate(&mut links, &mut new_nodes, Src::Feeder(l, Port::In));
    one_way(Rewrite { delete: vec![l, t1, t2], new_nodes, links, ..Default::default() })
}

fn prune_dilation(g: &Graph, site: &Site) -> R<Planned> {
    let d = node_of(site)?;
    expect(g, d, |k| matches!(k, GateKind::Dilation(_)), "dilation")?;
    let t = is_termination(g, g.consumer(d, Port::Out)).ok_or_else(|| stale("dilation output is not terminated"))?;
    let (mut links, mut new_nodes) = (Vec::new(), Vec::new());
    terminate(&mut links, &mut new_nodes, Src::Feeder(d, Port::XIn));
    terminate(&mut links, &mut new_nodes, Src::Feeder(d, Port::YIn));
    one_way(Rewrite { delete: vec![d, t], new_nodes, links, ..Default::default() })
}

fn prune_fanout_one(g: &Graph, site: &Site) -> R<Planned> {
    let f = node_of(site)?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    let left = is_termination(g, g.consumer(f, Port::LeftOut));
    let right = is_termination(g, g.consumer(f, Port::RightOut));
    let (t, other) = match (left, right) {
        (Some(t), None) => (t, Port::RightOut),
        (None, Some(t)) => (t, Port::LeftOut),
        _ => return Err(stale("fan-out does not have exactly one terminated branch")),
    };
    one_way(Rewrite {
        delete: vec![f, t],
        links: vec![(Src::Feeder(f, Port::In), Dst::Consumer(f, other))],
        ..Default::default()
    })
}

fn prune_fanout_both(g: &Graph, site: &Site) -> R<Planned> {
    let f = node_of(site)?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    let t1 = is_termination(g, g.consumer(f, Port::LeftOut)).ok_or_else(|| stale("left branch is not terminated"))?;
    let t2 = is_termination(g, g.consumer(f, Port::RightOut)).ok_or_else(|| stale("right branch is not terminated"))?;
    let (mut links, mut new_nodes) = (Vec::new(), Vec::new());
    terminate(&mut links, &mut new_nodes, Src::Feeder(f, Port::In));
    one_way(Rewrite { delete: vec![f, t1, t2], new_nodes, links, ..Default::default() })
}

fn one_way(rewrite: Rewrite) -> R<Planned> {
    Ok(Planned { rewrite, inverse: Inverse::Nothing })
}

fn add_loop(site: &Site) -> R<Planned> {
    if *site != Site::Anywhere {
        return Err(stale("adding a loop takes no site"));
    }
    Ok(Planned { rewrite: Rewrite { add_loops: 1, ..Default::default() }, inverse: Inverse::NewLoop })
}

fn remove_loop(g: &Graph, site: &Site) -> R<Planned> {
    let Site::Loop { id } = site else {
        return Err(stale(format!("expected a loop site, got {site}")));
    };
    if !g.has_loop(*id) {
        return Err(stale(format!("loop {id} does not exist")));
    }
    Ok(Planned { rewrite: Rewrite { remove_loops: vec![*id], ..Default::default() }, inverse: Inverse::Anywhere })
}

// S -> F.in; F.left_out -> D.x_in; F.right_out -> D.y_in; D.out -> T.
fn r1a(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let f = node_of(site)?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    let d = consumer_node(g, f, Port::LeftOut).ok_or_else(|| stale("left branch is not a gate"))?;
    if coef(g, d) != Some(eps)
        || !consumer_is(g, f, Port::LeftOut, d, Port::XIn)
        || !consumer_is(g, f, Port::RightOut, d, Port::YIn)
    {
        return Err(stale("fan-out does not feed both inputs of the dilation"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![f, d],
            links: vec![(Src::Feeder(f, Port::In), Dst::Consumer(d, Port::Out))],
            ..Default::default()
        },
        inverse: Inverse::Point(0),
    })
}

fn r1a_reverse(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let at = point_of(g, site)?;
    Ok(Planned {
        rewrite: Rewrite {
            cuts: vec![at],
            new_nodes: vec![GateKind::FanOut, GateKind::Dilation(eps.clone())],
            links: vec![
                (Src::Up(0), Dst::New(0, Port::In)),
                (Src::New(0, Port::LeftOut), Dst::New(1, Port::XIn)),
                (Src::New(0, Port::RightOut), Dst::New(1, Port::YIn)),
                (Src::New(1, Port::Out), Dst::Down(0)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(0),
    })
}

// S -> D.x_in; D.out -> F.in; F.left_out -> D.y_in; F.right_out -> T.
fn r1b(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let d = node_of(site)?;
    if coef(g, d) != Some(eps) {
        return Err(stale("not a dilation with the move's coefficient"));
    }
    let f = consumer_node(g, d, Port::Out).ok_or_else(|| stale("dilation output is not a gate"))?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    if !consumer_is(g, d, Port::Out, f, Port::In) || !consumer_is(g, f, Port::LeftOut, d, Port::YIn) {
        return Err(stale("no feedback through the fan-out"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![d, f],
            links: vec![(Src::Feeder(d, Port::XIn), Dst::Consumer(f, Port::RightOut))],
            ..Default::default()
        },
        inverse: Inverse::Point(0),
    })
}

fn r1b_reverse(g: &Graph, site: &Site, eps: &Coefficient) -> R<Planned> {
    let at = point_of(g, site)?;
    Ok(Planned {
        rewrite: Rewrite {
            cuts: vec![at],
            new_nodes: vec![GateKind::Dilation(eps.clone()), GateKind::FanOut],
            links: vec![
                (Src::Up(0), Dst::New(0, Port::XIn)),
                (Src::New(0, Port::Out), Dst::New(1, Port::In)),
                (Src::New(1, Port::LeftOut), Dst::New(0, Port::YIn)),
                (Src::New(1, Port::RightOut), Dst::Down(0)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(0),
    })
}

// S -> F.in; F.left_out -> D1.x_in; F.right_out -> D2.x_in; V -> D2.y_in;
// D2.out -> D1.y_in; D1.out -> T; D1 has ε and D2 has μ.
fn r2(g: &Graph, site: &Site, eps: &Coefficient, mu: &Coefficient) -> R<Planned> {
    let d1 = node_of(site)?;
    if coef(g, d1) != Some(eps) {
        return Err(stale("outer dilation has the wrong coefficient"));
    }
    let d2 = feeder_node(g, d1, Port::YIn).ok_or_else(|| stale("inner dilation missing"))?;
    if d2 == d1 || coef(g, d2) != Some(mu) || !consumer_is(g, d2, Port::Out, d1, Port::YIn) {
        return Err(stale("inner dilation missing or has the wrong coefficient"));
    }
    let f = feeder_node(g, d1, Port::XIn).ok_or_else(|| stale("shared input is not a fan-out"))?;
    expect(g, f, |k| *k == GateKind::FanOut, "fanout")?;
    if !consumer_is(g, f, Port::LeftOut, d1, Port::XIn) || !consumer_is(g, f, Port::RightOut, d2, Port::XIn) {
        return Err(stale("fan-out does not feed both first inputs"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![f, d1, d2],
            new_nodes: vec![GateKind::Dilation(eps * mu)],
            links: vec![
                (Src::Feeder(f, Port::In), Dst::New(0, Port::XIn)),
                (Src::Feeder(d2, Port::YIn), Dst::New(0, Port::YIn)),
                (Src::New(0, Port::Out), Dst::Consumer(d1, Port::Out)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(0),
    })
}

fn r2_reverse(g: &Graph, site: &Site, eps: &Coefficient, mu: &Coefficient) -> R<Planned> {
    let d = node_of(site)?;
    if coef(g, d) != Some(&(eps * mu)) {
        return Err(stale("dilation coefficient is not the product"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![d],
            new_nodes: vec![GateKind::FanOut, GateKind::Dilation(eps.clone()), GateKind::Dilation(mu.clone())],
            links: vec![
                (Src::Feeder(d, Port::XIn), Dst::New(0, Port::In)),
                (Src::New(0, Port::LeftOut), Dst::New(1, Port::XIn)),
                (Src::New(0, Port::RightOut), Dst::New(2, Port::XIn)),
                (Src::Feeder(d, Port::YIn), Dst::New(2, Port::YIn)),
                (Src::New(2, Port::Out), Dst::New(1, Port::YIn)),
                (Src::New(1, Port::Out), Dst::Consumer(d, Port::Out)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(1),
    })
}

fn ext2(g: &Graph, site: &Site) -> R<Planned> {
    let d = node_of(site)?;
    if !coef(g, d).is_some_and(Coefficient::is_one) {
        return Err(stale("not a dilation with coefficient 1"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![d],
            new_nodes: vec![GateKind::Termination],
            links: vec![
                (Src::Feeder(d, Port::XIn), Dst::New(0, Port::In)),
                (Src::Feeder(d, Port::YIn), Dst::Consumer(d, Port::Out)),
            ],
            ..Default::default()
        },
        inverse: Inverse::NodePoint(0, 1),
    })
}

fn ext2_reverse(g: &Graph, site: &Site) -> R<Planned> {
    let Site::NodePoint { node: t, at } = site else {
        return Err(stale(format!("expected a node and a point, got {site}")));
    };
    expect(g, *t, |k| *k == GateKind::Termination, "termination")?;
    check_wire(g, at.wire)?;
    if at.slot != 0 {
        return Err(stale("a single attachment uses slot 0"));
    }
    Ok(Planned {
        rewrite: Rewrite {
            delete: vec![*t],
            cuts: vec![*at],
            new_nodes: vec![GateKind::Dilation(Coefficient::one())],
            links: vec![
                (Src::Feeder(*t, Port::In), Dst::New(0, Port::XIn)),
                (Src::Up(0), Dst::New(0, Port::YIn)),
                (Src::New(0, Port::Out), Dst::Down(0)),
            ],
            ..Default::default()
        },
        inverse: Inverse::Node(0),
    })
}
