//! A fixed reduction strategy on lambda-sector graphs.
//!
//! Each round first settles the graph: fan-outs fed by an abstraction or an
//! application are resolved by copying the shared value, values that end in
//! a termination are collected, and loops are removed. Then the leftmost
//! beta redex, found by walking from the output leaf (function before
//! argument), is reduced. The strategy stops when no redex is left.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::graph::{EdgeId, Endpoint, GateKind, Graph, NodeId, Port, Wire};
use crate::moves::{self, Direction, MoveError, MoveKind, Site};
use crate::rewrite::{self, Attach, Dst, Rewrite, Src};

use super::sector_of;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("not in the lambda sector: {0}")]
    NotLambdaSector(String),
    #[error("no normal form within {fuel} beta steps")]
    Timeout { fuel: usize },
    #[error("graph grew past {0} nodes")]
    TooLarge(usize),
}

/// Node count at which normalization gives up.
pub const MAX_NODES: usize = 200_000;

/// Normalizes with at most `fuel` beta moves.
pub fn graph_normalize(g: &Graph, fuel: usize) -> Result<Graph, NormalizeError> {
    normalize_counting(g, fuel).map(|(g, _)| g)
}

/// As [`graph_normalize`], also returning the number of beta moves made.
pub fn normalize_counting(g: &Graph, fuel: usize) -> Result<(Graph, usize), NormalizeError> {
    let report = sector_of(g);
    if !report.lambda_sector {
        return Err(NormalizeError::NotLambdaSector(report.violations.join("; ")));
    }
    let mut g = g.clone();
    let mut betas = 0;
    loop {
        settle(&mut g)?;
        let Some(e) = leftmost_beta(&g) else { return Ok((g, betas)) };
        if betas == fuel {
            return Err(NormalizeError::Timeout { fuel });
        }
        moves::apply(&mut g, &MoveKind::Beta, &Site::Edge { edge: e }, Direction::Forward)
            .expect("leftmost redex is a beta site");
        betas += 1;
    }
}

/// Resolves sharing, prunes and removes loops until nothing changes.
pub fn settle(g: &mut Graph) -> Result<(), NormalizeError> {
    let mut stuck = HashSet::new();
    loop {
        if g.node_count() > MAX_NODES {
            return Err(NormalizeError::TooLarge(MAX_NODES));
        }
        if let Some(f) = shared_fanouts(g).into_iter().find(|f| !stuck.contains(f)) {
            if !resolve_sharing(g, f) {
                stuck.insert(f);
            }
            continue;
        }
        if prune_once(g) {
            continue;
        }
        let loops: Vec<_> = g.loops().collect();
        for l in loops {
            moves::apply(g, &MoveKind::LoopRemove, &Site::Loop { id: l }, Direction::Forward).expect("existing loop");
        }
        return Ok(());
    }
}

fn is_value(g: &Graph, at: Endpoint) -> bool {
    match at {
        Endpoint::Port(n, p) => {
            matches!((g.kind(n), p), (Some(GateKind::Lambda), Port::TermOut) | (Some(GateKind::App), Port::Out))
        }
        _ => false,
    }
}

/// Fan-outs whose input comes from an abstraction or application.
pub fn shared_fanouts(g: &Graph) -> Vec<NodeId> {
    g.nodes()
        .filter(|(n, k)| **k == GateKind::FanOut && g.feeder(*n, Port::In).is_some_and(|at| is_value(g, at)))
        .map(|(n, _)| n)
        .collect()
}

/// Global fan-out when the shared value is isolated, otherwise
/// [`duplicate_shared`].
pub fn resolve_sharing(g: &mut Graph, f: NodeId) -> bool {
    let Some(e) = g.edge_at(Endpoint::Port(f, Port::In)) else { return false };
    match moves::apply(g, &MoveKind::GlobalFanOut, &Site::Edge { edge: e }, Direction::Forward) {
        Ok(_) => true,
        Err(MoveError::NotIsolated(_)) => duplicate_shared(g, f),
        Err(_) => false,
    }
}

/// The subgraph computing the value on `exit`: everything upstream of the
/// edge's source whose outputs all stay inside it (terminations it feeds
/// included). Returns the nodes and the edges entering them from outside.
pub fn owned_value(g: &Graph, exit: EdgeId) -> Option<(BTreeSet<NodeId>, Vec<EdgeId>)> {
    let edge = g.edge(exit)?;
    let root = edge.source.node()?;
    let stop = edge.target.node();
    let mut set = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        for p in g.kind(n)?.inputs() {
            if let Some(m) = g.feeder(n, p).and_then(|at| at.node()) {
                if Some(m) != stop && set.insert(m) {
                    stack.push(m);
                }
            }
        }
    }
    let terms: Vec<NodeId> = set
        .iter()
        .flat_map(|&n| g.kind(n).unwrap().outputs().filter_map(move |p| g.consumer(n, p)))
        .filter_map(|at| at.node())
        .filter(|m| Some(*m) != stop && g.kind(*m) == Some(&GateKind::Termination))
        .collect();
    set.extend(terms);
    loop {
        let leaking: Vec<NodeId> = set
            .iter()
            .copied()
            .filter(|&n| {
                g.kind(n).unwrap().outputs().any(|p| {
                    let id = g.edge_at(Endpoint::Port(n, p));
                    id != Some(exit) && !g.consumer(n, p).and_then(|c| c.node()).is_some_and(|m| set.contains(&m))
                })
            })
            .collect();
        let orphans: Vec<NodeId> = set
            .iter()
            .copied()
            .filter(|&n| {
                g.kind(n) == Some(&GateKind::Termination)
                    && !g.feeder(n, Port::In).and_then(|at| at.node()).is_some_and(|m| set.contains(&m))
            })
            .collect();
        if leaking.is_empty() && orphans.is_empty() {
            break;
        }
        for n in leaking.into_iter().chain(orphans) {
            set.remove(&n);
        }
    }
    if !set.contains(&root) {
        return None;
    }
    let mut inputs = Vec::new();
    for &n in &set {
        for p in g.kind(n).unwrap().inputs() {
            let at = g.feeder(n, p)?;
            if !at.node().is_some_and(|m| set.contains(&m)) {
                inputs.push(g.edge_at(Endpoint::Port(n, p))?);
            }
        }
    }
    Some((set, inputs))
}

/// Copies the value entering fan-out `f`, which then disappears. Every wire
/// entering the value from outside gets a fan-out feeding both copies.
/// With no such wire this is exactly global fan-out.
pub fn duplicate_shared(g: &mut Graph, f: NodeId) -> bool {
    let Some(exit) = g.edge_at(Endpoint::Port(f, Port::In)) else { return false };
    let Some((set, inputs)) = owned_value(g, exit) else { return false };
    if [Port::LeftOut, Port::RightOut]
        .iter()
        .any(|&p| g.consumer(f, p).and_then(|c| c.node()).is_some_and(|m| set.contains(&m)))
    {
        return false;
    }
    let index: BTreeMap<NodeId, usize> = set.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let Endpoint::Port(root, root_port) = g.edge(exit).unwrap().source else { return false };
    let mut rw = Rewrite {
        delete: vec![f],
        new_nodes: set.iter().map(|n| g.kind(*n).unwrap().clone()).collect(),
        links: vec![
            (Src::Feeder(f, Port::In), Dst::Consumer(f, Port::LeftOut)),
            (Src::New(index[&root], root_port), Dst::Consumer(f, Port::RightOut)),
        ],
        ..Default::default()
    };
    for (_, e) in g.edges() {
        if let (Endpoint::Port(a, pa), Endpoint::Port(b, pb)) = (e.source, e.target) {
            if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
                rw.links.push((Src::New(i, pa), Dst::New(j, pb)));
            }
        }
    }
    for (k, id) in inputs.iter().enumerate() {
        let Endpoint::Port(b, pb) = g.edge(*id).unwrap().target else { unreachable!("enters a node") };
        let x = rw.new_nodes.len();
        rw.new_nodes.push(GateKind::FanOut);
        rw.cuts.push(Attach::on(Wire::Edge(*id)));
        rw.links.push((Src::Up(k), Dst::New(x, Port::In)));
        rw.links.push((Src::New(x, Port::LeftOut), Dst::Down(k)));
        rw.links.push((Src::New(x, Port::RightOut), Dst::New(index[&b], pb)));
    }
    rewrite::apply(g, &rw).is_ok()
}

/// Removes the value ending in termination `t`, terminating every wire that
/// entered it from outside.
pub fn prune_dead(g: &mut Graph, t: NodeId) -> bool {
    let Some(exit) = g.edge_at(Endpoint::Port(t, Port::In)) else { return false };
    if !is_value(g, g.edge(exit).unwrap().source) {
        return false;
    }
    let Some((set, inputs)) = owned_value(g, exit) else { return false };
    let mut rw = Rewrite { delete: set.iter().copied().chain([t]).collect(), ..Default::default() };
    for id in inputs {
        let Endpoint::Port(b, pb) = g.edge(id).unwrap().target else { unreachable!("enters a node") };
        rw.links.push((Src::Feeder(b, pb), Dst::New(rw.new_nodes.len(), Port::In)));
        rw.new_nodes.push(GateKind::Termination);
    }
    rewrite::apply(g, &rw).is_ok()
}

/// One pruning step: a local pruning move, then global pruning, then
/// [`prune_dead`].
fn prune_once(g: &mut Graph) -> bool {
    let nodes: Vec<(NodeId, GateKind)> = g.nodes().map(|(n, k)| (n, k.clone())).collect();
    for (n, k) in &nodes {
        let kinds: &[MoveKind] = match k {
            GateKind::FanOut => &[MoveKind::PruneFanOutOne, MoveKind::PruneFanOutBoth],
            GateKind::App => &[MoveKind::PruneApp],
            GateKind::Lambda => &[MoveKind::PruneLambda],
            _ => &[],
        };
        for m in kinds {
            if moves::apply(g, m, &Site::Node { node: *n }, Direction::Forward).is_ok() {
                return true;
            }
        }
    }
    for (t, k) in &nodes {
        if *k != GateKind::Termination {
            continue;
        }
        let Some(e) = g.edge_at(Endpoint::Port(*t, Port::In)) else { continue };
        if moves::apply(g, &MoveKind::GlobalPrune, &Site::Edge { edge: e }, Direction::Forward).is_ok() {
            return true;
        }
    }
    nodes.iter().any(|(t, k)| *k == GateKind::Termination && prune_dead(g, *t))
}

/// The edge `λ.term_out -> ∧.fun_in` of the leftmost redex: the walk from
/// the output leaf enters bodies of abstractions and visits the function
/// of an application before its argument.
pub fn leftmost_beta(g: &Graph) -> Option<EdgeId> {
    let (out, _) = g.output_leaves().next()?;
    let root = g.edge(g.edge_at(Endpoint::Output(out))?)?.source;
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(at) = stack.pop() {
        let Endpoint::Port(n, p) = at else { continue };
        if !seen.insert(n) {
            continue;
        }
        match (g.kind(n)?, p) {
            (GateKind::Lambda, Port::TermOut) => stack.extend(g.feeder(n, Port::In)),
            (GateKind::App, Port::Out) => {
                let fun = g.feeder(n, Port::FunIn)?;
                if let Endpoint::Port(l, Port::TermOut) = fun {
                    if g.kind(l) == Some(&GateKind::Lambda) {
                        return g.edge_at(Endpoint::Port(n, Port::FunIn));
                    }
                }
                stack.extend(g.feeder(n, Port::ArgIn));
                stack.push(fun);
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;
    use crate::lambda::{decode, encode, parse, term_normalize, Strategy};

    fn norm(s: &str, fuel: usize) -> Result<Graph, NormalizeError> {
        graph_normalize(&encode(&parse(s).unwrap()), fuel)
    }

    fn agrees(s: &str) {
        let t = parse(s).unwrap();
        let expect = term_normalize(&t, Strategy::Normal, 500).unwrap();
        let g = graph_normalize(&encode(&t), 500).unwrap();
        let got = decode(&g).unwrap();
        assert!(got.alpha_eq(&expect), "{s}: graph gave {got}, terms gave {expect}");
    }

    #[test]
    fn identity_application() {
        let g = norm("(\\x.x) y", 10).unwrap();
        assert!(is_isomorphic(&g, &encode(&parse("y").unwrap())));
    }

    #[test]
    fn kestrel_leaves_a_terminated_input() {
        let g = norm("(\\x.\\y.x) a b", 10).unwrap();
        assert_eq!(decode(&g).unwrap(), parse("a").unwrap());
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.count_kind(|k| *k == GateKind::Termination), 1);
    }

    #[test]
    fn omega_times_out() {
        assert_eq!(norm("(\\x.x x) (\\x.x x)", 50), Err(NormalizeError::Timeout { fuel: 50 }));
    }

    #[test]
    fn agrees_with_terms() {
        for s in [
            "(\\x.x x) (\\y.y)",
            "(\\f x.f (f x)) (\\f x.f (f x))",
            "(\\m n f x.m f (n f x)) (\\f x.f (f x)) (\\f x.f x)",
            "(\\x.z) ((\\x.x x) (\\x.x x))",
            "\\a.(\\x.x a x) (\\y.a y)",
            "(\\x.\\y.x y y) (\\z.z w) q",
            "(\\x.\\y.y x) (\\z.z) (\\u.u u)",
            "\\y.(\\x.\\y.x) y",
        ] {
            agrees(s);
        }
    }

    #[test]
    fn open_sharing_copies_through_fanouts() {
        // the shared value \y.a y mentions the outer binder a
        let mut g = encode(&parse("\\a.(\\x.x x) (\\y.a y)").unwrap());
        let e = leftmost_beta(&g).unwrap();
        moves::apply(&mut g, &MoveKind::Beta, &Site::Edge { edge: e }, Direction::Forward).unwrap();
        let f = shared_fanouts(&g)[0];
        assert!(duplicate_shared(&mut g, f));
        assert!(shared_fanouts(&g).is_empty());
        assert!(g.is_valid());
        assert!(decode(&g).unwrap().alpha_eq(&parse("\\a.(\\y.a y) (\\y.a y)").unwrap()));
    }

    #[test]
    fn rejects_dilations() {
        let mut g = encode(&parse("\\x.x").unwrap());
        let mut b = crate::graph::GraphBuilder::new();
        b.node(GateKind::dilation("a"));
        b.complete_with_leaves();
        g.absorb(&b.build().unwrap());
        assert!(matches!(graph_normalize(&g, 5), Err(NormalizeError::NotLambdaSector(_))));
    }
}
