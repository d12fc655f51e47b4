use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use super::{EdgeId, Endpoint, GateKind, Graph, NodeId, Port};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("edge {0} does not exist or does not end on a fan-out or termination input")]
    BadAnchor(EdgeId),
    #[error("component is not isolated; extra boundary edges: {0:?}")]
    NotIsolated(Vec<EdgeId>),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// True iff a directed path leads from `from` to `to`. A node reaches itself.
pub fn reachable(g: &Graph, from: NodeId, to: NodeId) -> Result<bool, ComponentError> {
    for n in [from, to] {
        if g.kind(n).is_none() {
            return Err(ComponentError::UnknownNode(n));
        }
    }
    Ok(reachable_avoiding(g, from, to, &HashSet::new()).is_some())
}

/// Directed search that never enters a node of `avoid`. Returns the edges of
/// one witnessing path (empty when `from == to`).
pub fn reachable_avoiding(g: &Graph, from: NodeId, to: NodeId, avoid: &HashSet<NodeId>) -> Option<Vec<EdgeId>> {
    if avoid.contains(&from) || avoid.contains(&to) {
        return None;
    }
    let mut parent: HashMap<NodeId, Option<(NodeId, EdgeId)>> = HashMap::new();
    parent.insert(from, None);
    let mut queue = VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        if n == to {
            let mut path = Vec::new();
            let mut cur = n;
            while let Some(Some((prev, e))) = parent.get(&cur) {
                path.push(*e);
                cur = *prev;
            }
            path.reverse();
            return Some(path);
        }
        let kind = g.kind(n)?;
        for p in kind.outputs() {
            let Some(e) = g.edge_at(Endpoint::Port(n, p)) else { continue };
            let Some(next) = g.edge(e).and_then(|edge| edge.target.node()) else { continue };
            if avoid.contains(&next) || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some((n, e)));
            queue.push_back(next);
        }
    }
    None
}

/// The node set hanging off edge `e` (which must enter a fan-out or a
/// termination) that touches the rest of the graph through `e` alone.
/// Leaves count as external connections.
pub fn component_through(g: &Graph, e: EdgeId) -> Result<BTreeSet<NodeId>, ComponentError> {
    let edge = g.edge(e).ok_or(ComponentError::BadAnchor(e))?;
    let anchor = match edge.target {
        Endpoint::Port(n, Port::In) if matches!(g.kind(n), Some(GateKind::FanOut | GateKind::Termination)) => n,
        _ => return Err(ComponentError::BadAnchor(e)),
    };
    let Some(start) = edge.source.node() else {
        return Err(ComponentError::NotIsolated(vec![]));
    };
    if start == anchor {
        let extra = g
            .kind(anchor)
            .into_iter()
            .flat_map(|k| k.ports())
            .filter_map(|&p| g.edge_at(Endpoint::Port(anchor, p)))
            .filter(|&x| x != e)
            .collect();
        return Err(ComponentError::NotIsolated(extra));
    }
    let (set, boundary) = collect_component(g, start, e, anchor);
    if boundary.is_empty() {
        Ok(set)
    } else {
        Err(ComponentError::NotIsolated(boundary))
    }
}

/// Undirected flood from `start` that skips edge `skip` and does not enter
/// `stop`. Returns the node set and every other edge leaving it.
pub(crate) fn collect_component(
    g: &Graph,
    start: NodeId,
    skip: EdgeId,
    stop: NodeId,
) -> (BTreeSet<NodeId>, Vec<EdgeId>) {
    let mut set = BTreeSet::from([start]);
    let mut boundary = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        let Some(kind) = g.kind(n) else { continue };
        for &p in kind.ports() {
            let Some(eid) = g.edge_at(Endpoint::Port(n, p)) else { continue };
            if eid == skip {
                continue;
            }
            let edge = g.edge(eid).expect("indexed edge");
            let other = if edge.source == Endpoint::Port(n, p) { edge.target } else { edge.source };
            match other.node() {
                Some(m) if m == stop => {
                    boundary.insert(eid);
                }
                Some(m) => {
                    if set.insert(m) {
                        stack.push(m);
                    }
                }
                None => {
                    boundary.insert(eid);
                }
            }
        }
    }
    (set, boundary.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn chain() -> (Graph, [NodeId; 3]) {
        let mut b = GraphBuilder::new();
        let a = b.node(GateKind::FanOut);
        let bb = b.node(GateKind::FanOut);
        let c = b.node(GateKind::Termination);
        b.link(a, Port::LeftOut, bb, Port::In);
        b.link(bb, Port::LeftOut, c, Port::In);
        b.complete_with_leaves();
        (b.build().unwrap(), [a, bb, c])
    }

    #[test]
    fn reachability_follows_orientation() {
        let (g, [a, _, c]) = chain();
        assert!(reachable(&g, a, c).unwrap());
        assert!(!reachable(&g, c, a).unwrap());
        assert!(reachable(&g, a, a).unwrap());
        assert_eq!(reachable(&g, a, NodeId(99)), Err(ComponentError::UnknownNode(NodeId(99))));
    }

    #[test]
    fn eta_counterexample_reachability() {
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let a = b.node(GateKind::App);
        b.link(a, Port::Out, l, Port::In);
        b.link(l, Port::VarOut, a, Port::ArgIn);
        b.link(l, Port::TermOut, a, Port::FunIn);
        let g = b.build().unwrap();
        assert!(reachable(&g, l, a).unwrap());
        assert!(reachable(&g, a, l).unwrap());
    }

    #[test]
    fn leaves_make_a_component_non_isolated() {
        let mut b = GraphBuilder::new();
        let d = b.node(GateKind::dilation("a"));
        let t = b.node(GateKind::Termination);
        b.link(d, Port::Out, t, Port::In);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        let e = g.edge_at(Endpoint::Port(t, Port::In)).unwrap();
        match component_through(&g, e) {
            Err(ComponentError::NotIsolated(extra)) => assert_eq!(extra.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closed_component_into_fanout() {
        // λx.(x x) feeding a fan-out
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let a = b.node(GateKind::App);
        let f = b.node(GateKind::FanOut);
        let fo = b.node(GateKind::FanOut);
        b.link(l, Port::VarOut, f, Port::In);
        b.link(f, Port::LeftOut, a, Port::FunIn);
        b.link(f, Port::RightOut, a, Port::ArgIn);
        b.link(a, Port::Out, l, Port::In);
        b.link(l, Port::TermOut, fo, Port::In);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        let e = g.edge_at(Endpoint::Port(fo, Port::In)).unwrap();
        assert_eq!(component_through(&g, e).unwrap(), BTreeSet::from([l, a, f]));
        let inner = g.edge_at(Endpoint::Port(f, Port::In)).unwrap();
        assert!(matches!(component_through(&g, inner), Err(ComponentError::NotIsolated(_))));
        let bad = g.edge_at(Endpoint::Port(a, Port::FunIn)).unwrap();
        assert_eq!(component_through(&g, bad), Err(ComponentError::BadAnchor(bad)));
    }

    #[test]
    fn source_wired_twice_is_not_isolated() {
        // s.left_out feeds the anchor, s.right_out feeds the anchor's output side
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let s = b.node(GateKind::FanOut);
        let anchor = b.node(GateKind::FanOut);
        let d = b.node(GateKind::dilation("a"));
        b.link(l, Port::VarOut, l, Port::In);
        b.link(l, Port::TermOut, s, Port::In);
        b.link(s, Port::LeftOut, anchor, Port::In);
        b.link(s, Port::RightOut, d, Port::XIn);
        b.link(anchor, Port::LeftOut, d, Port::YIn);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        let e = g.edge_at(Endpoint::Port(anchor, Port::In)).unwrap();
        assert!(matches!(component_through(&g, e), Err(ComponentError::NotIsolated(v)) if !v.is_empty()));
    }
}
