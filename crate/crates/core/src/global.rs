//! Moves with unbounded side conditions: global fan-out, global pruning and
//! ext1. Their local bounded variant (LocalFanOut) shares the same code.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::graph::{
    canonical_key, component_through, is_isomorphic, reachable_avoiding, ComponentError, Edge, EdgeId, Endpoint,
    GateKind, Graph, Leaf, LeafId, LeafKind, NodeId, Port, Wire,
};
use crate::moves::{self, stale, Direction, Inverse, MoveError, MoveKind, Outcome, Planned, Site};
use crate::rewrite::{Dst, Rewrite, Src};

type R<T> = Result<T, MoveError>;

impl From<ComponentError> for MoveError {
    fn from(e: ComponentError) -> Self {
        match e {
            ComponentError::NotIsolated(extra) => MoveError::NotIsolated(extra),
            other => MoveError::SiteStale(other.to_string()),
        }
    }
}

/// Global fan-out at the edge entering a fan-out (forward), or merging two
/// isomorphic isolated components (reverse, `Site::EdgePair`).
pub fn global_fanout(g: &Graph, site: &Site, dir: Direction) -> R<(Graph, Outcome)> {
    moves::applied(g, &MoveKind::GlobalFanOut, site, dir)
}

/// Removes the isolated component feeding the termination at edge `e`,
/// together with the termination.
pub fn global_prune(g: &Graph, e: EdgeId) -> R<(Graph, Outcome)> {
    moves::applied(g, &MoveKind::GlobalPrune, &Site::Edge { edge: e }, Direction::Forward)
}

/// ext1 with its path condition.
pub fn ext1(g: &Graph, site: &Site, dir: Direction) -> R<(Graph, Outcome)> {
    moves::applied(g, &MoveKind::Ext1, site, dir)
}

/// The ext1 replacement with the path condition ignored. Not a move of the
/// calculus; it shows what the condition protects against.
pub fn ext1_unchecked(g: &Graph, e: EdgeId) -> R<(Graph, Outcome)> {
    let planned = plan_ext1(g, &Site::Edge { edge: e }, Direction::Forward, false)?;
    let mut h = g.clone();
    let out = moves::run(&mut h, planned);
    Ok((h, out))
}

fn internal_edges(g: &Graph, comp: &BTreeSet<NodeId>) -> Vec<(EdgeId, Edge)> {
    let inside = |at: Endpoint| at.node().is_some_and(|n| comp.contains(&n));
    g.edges().filter(|(_, e)| inside(e.source) && inside(e.target)).map(|(id, e)| (id, *e)).collect()
}

fn check_bound(g: &Graph, comp: &BTreeSet<NodeId>, bound: Option<usize>) -> R<()> {
    if let Some(bound) = bound {
        let size = comp.len() + internal_edges(g, comp).len();
        if size > bound {
            return Err(MoveError::TooLarge { size, bound });
        }
    }
    Ok(())
}

/// Node set reached from the source of `e` without crossing `e`, provided
/// nothing else leaves it. `e`'s target must lie outside.
fn isolated_behind(g: &Graph, e: EdgeId) -> R<BTreeSet<NodeId>> {
    let edge = g.edge(e).ok_or_else(|| stale(format!("edge {e} does not exist")))?;
    let Endpoint::Port(root, _) = edge.source else {
        return Err(MoveError::NotIsolated(vec![]));
    };
    let mut set = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let kind = g.kind(n).expect("reached nodes exist");
        for &p in kind.ports() {
            let id = g.edge_at(Endpoint::Port(n, p)).expect("valid graph");
            if id == e {
                continue;
            }
            let edge = g.edge(id).expect("indexed edge");
            let other = if edge.source == Endpoint::Port(n, p) { edge.target } else { edge.source };
            match other.node() {
                Some(m) if Some(m) == g.edge(e).and_then(|x| x.target.node()) => {
                    return Err(MoveError::NotIsolated(vec![id]))
                }
                Some(m) => {
                    if set.insert(m) {
                        stack.push(m);
                    }
                }
                None => return Err(MoveError::NotIsolated(vec![id])),
            }
        }
    }
    if edge.target.node().is_some_and(|t| set.contains(&t)) {
        return Err(MoveError::NotIsolated(vec![e]));
    }
    Ok(set)
}

/// The component with its root edge ending on a single output leaf.
fn rooted(g: &Graph, comp: &BTreeSet<NodeId>, root_edge: EdgeId) -> Graph {
    let root = g.edge(root_edge).expect("root edge exists").source;
    let mut edges = internal_edges(g, comp);
    edges.push((root_edge, Edge { source: root, target: Endpoint::Output(LeafId(0)) }));
    Graph::from_parts(
        comp.iter().map(|&n| (n, g.kind(n).unwrap().clone())),
        edges,
        [(LeafId(0), Leaf { kind: LeafKind::Output, name: "root".into() })],
        [],
    )
}

pub(crate) fn plan_fanout(g: &Graph, site: &Site, dir: Direction, bound: Option<usize>) -> R<Planned> {
    match dir {
        Direction::Forward => {
            let Site::Edge { edge } = site else {
                return Err(stale(format!("expected an edge site, got {site}")));
            };
            let e = g.edge(*edge).ok_or_else(|| stale(format!("edge {edge} does not exist")))?;
            let f = match e.target {
                Endpoint::Port(f, Port::In) if g.kind(f) == Some(&GateKind::FanOut) => f,
                _ => return Err(stale("edge does not enter a fan-out")),
            };
            let comp = component_through(g, *edge)?;
            check_bound(g, &comp, bound)?;
            let index: BTreeMap<NodeId, usize> = comp.iter().enumerate().map(|(i, &n)| (n, i)).collect();
            let Endpoint::Port(root, root_port) = e.source else { unreachable!("component has a root") };
            let mut links = vec![
                (Src::Feeder(f, Port::In), Dst::Consumer(f, Port::LeftOut)),
                (Src::New(index[&root], root_port), Dst::Consumer(f, Port::RightOut)),
            ];
            for (_, ie) in internal_edges(g, &comp) {
                let (Endpoint::Port(a, pa), Endpoint::Port(b, pb)) = (ie.source, ie.target) else { continue };
                links.push((Src::New(index[&a], pa), Dst::New(index[&b], pb)));
            }
            Ok(Planned {
                rewrite: Rewrite {
                    delete: vec![f],
                    new_nodes: comp.iter().map(|n| g.kind(*n).unwrap().clone()).collect(),
                    links,
                    ..Default::default()
                },
                inverse: Inverse::EdgePair(0, 1),
            })
        }
        Direction::Reverse => {
            let Site::EdgePair { first, second } = site else {
                return Err(stale(format!("expected an edge pair, got {site}")));
            };
            if first == second {
                return Err(stale("the two edges must differ"));
            }
            let c1 = isolated_behind(g, *first)?;
            let c2 = isolated_behind(g, *second)?;
            if !c1.is_disjoint(&c2) {
                return Err(MoveError::NotIsomorphicPair);
            }
            check_bound(g, &c1, bound)?;
            let (Endpoint::Port(_, p1), Endpoint::Port(r2, p2)) =
                (g.edge(*first).unwrap().source, g.edge(*second).unwrap().source)
            else {
                unreachable!("isolated components have node roots")
            };
            if p1 != p2 || !is_isomorphic(&rooted(g, &c1, *first), &rooted(g, &c2, *second)) {
                return Err(MoveError::NotIsomorphicPair);
            }
            Ok(Planned {
                rewrite: Rewrite {
                    delete: c2.into_iter().collect(),
                    cuts: vec![moves::Attach::on(Wire::Edge(*first))],
                    new_nodes: vec![GateKind::FanOut],
                    links: vec![
                        (Src::Up(0), Dst::New(0, Port::In)),
                        (Src::New(0, Port::LeftOut), Dst::Down(0)),
                        (Src::New(0, Port::RightOut), Dst::Consumer(r2, p2)),
                    ],
                    ..Default::default()
                },
                inverse: Inverse::EdgeAt(0, Port::In),
            })
        }
    }
}

/// Edges grouped by the canonical key of the component behind them.
type Groups = BTreeMap<(Vec<u8>, Port), Vec<(EdgeId, BTreeSet<NodeId>)>>;

/// Ordered pairs of edges carrying isomorphic isolated components.
pub(crate) fn fanout_pairs(g: &Graph, bound: Option<usize>) -> Vec<Site> {
    let mut groups: Groups = BTreeMap::new();
    for (id, e) in g.edges() {
        let Endpoint::Port(_, p) = e.source else { continue };
        let Ok(comp) = isolated_behind(g, id) else { continue };
        if check_bound(g, &comp, bound).is_err() {
            continue;
        }
        let key = canonical_key(&rooted(g, &comp, id));
        groups.entry((key, p)).or_default().push((id, comp));
    }
    let mut out = Vec::new();
    for members in groups.values() {
        for (a, ca) in members {
            for (b, cb) in members {
                if a != b && ca.is_disjoint(cb) {
                    out.push(Site::EdgePair { first: *a, second: *b });
                }
            }
        }
    }
    out
}

pub(crate) fn plan_prune(g: &Graph, site: &Site) -> R<Planned> {
    let Site::Edge { edge } = site else {
        return Err(stale(format!("expected an edge site, got {site}")));
    };
    let e = g.edge(*edge).ok_or_else(|| stale(format!("edge {edge} does not exist")))?;
    let t = match e.target {
        Endpoint::Port(t, Port::In) if g.kind(t) == Some(&GateKind::Termination) => t,
        _ => return Err(stale("edge does not enter a termination")),
    };
    let mut delete: Vec<NodeId> = component_through(g, *edge)?.into_iter().collect();
    delete.push(t);
    Ok(Planned { rewrite: Rewrite { delete, ..Default::default() }, inverse: Inverse::Nothing })
}

/// Pattern `A.out -> L.in`, `L.var_out -> A.arg_in`; arrow 1 enters
/// `A.fun_in`, arrow 2 leaves `L.term_out`.
pub(crate) fn plan_ext1(g: &Graph, site: &Site, dir: Direction, checked: bool) -> R<Planned> {
    match dir {
        Direction::Forward => {
            let Site::Edge { edge } = site else {
                return Err(stale(format!("expected an edge site, got {site}")));
            };
            let e = g.edge(*edge).ok_or_else(|| stale(format!("edge {edge} does not exist")))?;
            let (a, l) = match (e.source, e.target) {
                (Endpoint::Port(a, Port::Out), Endpoint::Port(l, Port::In))
                    if g.kind(a) == Some(&GateKind::App) && g.kind(l) == Some(&GateKind::Lambda) =>
                {
                    (a, l)
                }
                _ => return Err(stale("edge does not join an app output to a lambda input")),
            };
            if g.consumer(l, Port::VarOut) != Some(Endpoint::Port(a, Port::ArgIn)) {
                return Err(stale("the variable is not the argument"));
            }
            if checked {
                forward_condition(g, l, a)?;
            }
            Ok(Planned {
                rewrite: Rewrite {
                    delete: vec![l, a],
                    links: vec![(Src::Feeder(a, Port::FunIn), Dst::Consumer(l, Port::TermOut))],
                    ..Default::default()
                },
                inverse: Inverse::Point(0),
            })
        }
        Direction::Reverse => {
            let Site::Point { at } = site else {
                return Err(stale(format!("expected a point site, got {site}")));
            };
            if !g.has_wire(at.wire) || at.slot != 0 {
                return Err(stale(format!("no attachment {at}")));
            }
            if checked {
                match at.wire {
                    Wire::Loop(_) => return Err(MoveError::PathExists(vec![])),
                    Wire::Edge(e) => {
                        let edge = g.edge(e).unwrap();
                        if let (Some(s), Some(t)) = (edge.source.node(), edge.target.node()) {
                            if let Some(path) = reachable_avoiding(g, t, s, &HashSet::new()) {
                                return Err(MoveError::PathExists([vec![e], path].concat()));
                            }
                        }
                    }
                }
            }
            Ok(Planned {
                rewrite: Rewrite {
                    cuts: vec![*at],
                    new_nodes: vec![GateKind::Lambda, GateKind::App],
                    links: vec![
                        (Src::Up(0), Dst::New(1, Port::FunIn)),
                        (Src::New(0, Port::TermOut), Dst::Down(0)),
                        (Src::New(1, Port::Out), Dst::New(0, Port::In)),
                        (Src::New(0, Port::VarOut), Dst::New(1, Port::ArgIn)),
                    ],
                    ..Default::default()
                },
                inverse: Inverse::EdgeAt(1, Port::Out),
            })
        }
    }
}

/// No oriented path from arrow 2 back to arrow 1 outside the pattern.
fn forward_condition(g: &Graph, l: NodeId, a: NodeId) -> R<()> {
    let one = g.edge_at(Endpoint::Port(a, Port::FunIn)).expect("valid graph");
    let two = g.edge_at(Endpoint::Port(l, Port::TermOut)).expect("valid graph");
    if one == two {
        return Err(MoveError::PathExists(vec![one]));
    }
    let s = g.edge(one).unwrap().source.node();
    let t = g.edge(two).unwrap().target.node();
    if let (Some(s), Some(t)) = (s, t) {
        let avoid = HashSet::from([l, a]);
        if let Some(path) = reachable_avoiding(g, t, s, &avoid) {
            return Err(MoveError::PathExists([vec![two], path, vec![one]].concat()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn eta_cycle() -> (Graph, NodeId, NodeId) {
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let a = b.node(GateKind::App);
        b.link(a, Port::Out, l, Port::In);
        b.link(l, Port::VarOut, a, Port::ArgIn);
        b.link(l, Port::TermOut, a, Port::FunIn);
        (b.build().unwrap(), l, a)
    }

    #[test]
    fn eta_counterexample() {
        let (g, _, a) = eta_cycle();
        let e = g.edge_at(Endpoint::Port(a, Port::Out)).unwrap();
        assert!(
            matches!(ext1(&g, &Site::Edge { edge: e }, Direction::Forward), Err(MoveError::PathExists(p)) if !p.is_empty())
        );
        let (h, _) = ext1_unchecked(&g, e).unwrap();
        assert_eq!((h.node_count(), h.edge_count(), h.loop_count()), (0, 0, 1));
        assert!(moves::enumerate_matches(&g, &MoveKind::Ext1, Direction::Forward).is_empty());
    }

    #[test]
    fn ext1_on_a_wire_and_back() {
        let mut b = GraphBuilder::new();
        let (i, o) = (b.input("f"), b.output("out"));
        b.edge(i, o);
        let g = b.build().unwrap();
        let sites = moves::enumerate_matches(&g, &MoveKind::Ext1, Direction::Reverse);
        assert_eq!(sites.len(), 1);
        let (h, out) = ext1(&g, &sites[0], Direction::Reverse).unwrap();
        assert_eq!(h.node_count(), 2);
        let (k, _) = ext1(&h, &out.inverse.unwrap(), Direction::Forward).unwrap();
        assert!(is_isomorphic(&k, &g));
    }

    #[test]
    fn global_prune_needs_isolation() {
        let mut b = GraphBuilder::new();
        let d = b.node(GateKind::dilation("a"));
        let t = b.node(GateKind::Termination);
        b.link(d, Port::Out, t, Port::In);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        let e = g.edge_at(Endpoint::Port(t, Port::In)).unwrap();
        assert!(matches!(global_prune(&g, e), Err(MoveError::NotIsolated(_))));
        assert_eq!(
            moves::apply(&mut g.clone(), &MoveKind::GlobalPrune, &Site::Edge { edge: e }, Direction::Reverse)
                .unwrap_err(),
            MoveError::DirectionForbidden(MoveKind::GlobalPrune)
        );
    }
}
