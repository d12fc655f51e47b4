//! One surgery engine for every move.
//!
//! A [`Rewrite`] deletes some nodes, cuts some wires at marked points,
//! creates new nodes, and says how the loose ends are joined by *links*.
//! Everything outside the deleted nodes and the cut points is left alone.
//!
//! The loose ends are *joints*. An input joint is where a piece of old wire
//! runs into a deleted input port or into the upstream side of a cut; a link
//! may leave from there. An output joint is a deleted output port or the
//! downstream side of a cut; a link may arrive there. Old wire pieces and
//! links are chained together, and each chain becomes one edge, or a loop
//! when it closes on itself. Wire pieces whose two joints are both unused
//! vanish with the deleted nodes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Counters, Edge, EdgeId, Endpoint, GateKind, Graph, LoopId, NodeId, Port, Wire};

/// A marked point on a wire. On an edge, higher slots lie further
/// downstream; on a loop only the cyclic order of the slots matters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Attach {
    pub wire: Wire,
    pub slot: u32,
}

impl Attach {
    pub fn on(wire: Wire) -> Self {
        Attach { wire, slot: 0 }
    }
}

/// Where a link starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Src {
    /// Whatever fed input port `p` of deleted node `n`.
    Feeder(NodeId, Port),
    /// The upstream side of cut `i`.
    Up(usize),
    /// Output port of new node `i`.
    New(usize, Port),
}

/// Where a link ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dst {
    /// Whatever consumed output port `p` of deleted node `n`.
    Consumer(NodeId, Port),
    /// The downstream side of cut `i`.
    Down(usize),
    /// Input port of new node `i`.
    New(usize, Port),
}

#[derive(Clone, Debug, Default)]
pub struct Rewrite {
    pub delete: Vec<NodeId>,
    pub cuts: Vec<Attach>,
    pub new_nodes: Vec<GateKind>,
    pub links: Vec<(Src, Dst)>,
    pub add_loops: usize,
    pub remove_loops: Vec<LoopId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("node {0} does not exist")]
    MissingNode(NodeId),
    #[error("wire {0} does not exist")]
    MissingWire(Wire),
    #[error("malformed rewrite: {0}")]
    Pattern(String),
}

fn pattern(msg: impl Into<String>) -> RewriteError {
    RewriteError::Pattern(msg.into())
}

/// Everything needed to undo an applied rewrite exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    removed_nodes: Vec<(NodeId, GateKind)>,
    removed_edges: Vec<(EdgeId, Edge)>,
    removed_loops: Vec<LoopId>,
    added_nodes: Vec<NodeId>,
    added_edges: Vec<EdgeId>,
    added_loops: Vec<LoopId>,
    counters: Counters,
}

impl Patch {
    /// Restores the graph to its state before the rewrite, ids included.
    /// Must be applied to the graph the rewrite produced.
    pub fn revert(&self, g: &mut Graph) {
        for e in &self.added_edges {
            g.remove_edge(*e);
        }
        for n in &self.added_nodes {
            g.remove_node(*n);
        }
        for l in &self.added_loops {
            g.remove_loop(*l);
        }
        for (n, k) in &self.removed_nodes {
            g.insert_node(*n, k.clone());
        }
        for (e, edge) in &self.removed_edges {
            g.insert_edge(*e, *edge);
        }
        for l in &self.removed_loops {
            g.insert_loop(*l);
        }
        g.set_counters(self.counters);
    }

    pub fn added_nodes(&self) -> &[NodeId] {
        &self.added_nodes
    }

    pub fn removed_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.removed_nodes.iter().map(|(n, _)| *n)
    }

    pub fn added_loops(&self) -> &[LoopId] {
        &self.added_loops
    }
}

/// Result of [`apply`]: the undo patch, the ids given to the new nodes, and
/// for each link the wire it became part of together with its position
/// among the links on that wire.
#[derive(Clone, Debug)]
pub struct Applied {
    pub patch: Patch,
    pub new_nodes: Vec<NodeId>,
    pub link_sites: Vec<Attach>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Start {
    Real(Endpoint),
    DelOut(NodeId, Port),
    CutDown(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum End {
    Real(Endpoint),
    DelIn(NodeId, Port),
    CutUp(usize),
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    start: Start,
    end: End,
}

enum Chain {
    Open { source: Endpoint, target: Endpoint, links: Vec<usize> },
    Closed { links: Vec<usize> },
}

/// Checks a rewrite against `g` and performs it.
pub fn apply(g: &mut Graph, rw: &Rewrite) -> Result<Applied, RewriteError> {
    let plan = plan(g, rw)?;
    Ok(commit(g, rw, plan))
}

struct Plan {
    removed_edges: Vec<EdgeId>,
    removed_loops: Vec<LoopId>,
    chains: Vec<Chain>,
}

fn plan(g: &Graph, rw: &Rewrite) -> Result<Plan, RewriteError> {
    let mut deleted: HashMap<NodeId, &GateKind> = HashMap::new();
    for &n in &rw.delete {
        let k = g.kind(n).ok_or(RewriteError::MissingNode(n))?;
        if deleted.insert(n, k).is_some() {
            return Err(pattern(format!("node {n} deleted twice")));
        }
    }
    let mut on_wire: BTreeMap<Wire, Vec<(u32, usize)>> = BTreeMap::new();
    for (i, c) in rw.cuts.iter().enumerate() {
        if !g.has_wire(c.wire) {
            return Err(RewriteError::MissingWire(c.wire));
        }
        on_wire.entry(c.wire).or_default().push((c.slot, i));
    }
    for cs in on_wire.values_mut() {
        cs.sort();
        if cs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(pattern("two cuts share a slot"));
        }
    }
    for &l in &rw.remove_loops {
        if !g.has_loop(l) {
            return Err(RewriteError::MissingWire(Wire::Loop(l)));
        }
        if on_wire.contains_key(&Wire::Loop(l)) {
            return Err(pattern(format!("loop {l} is both cut and removed")));
        }
    }

    // Old wire pieces.
    let mut affected: BTreeMap<EdgeId, Edge> = BTreeMap::new();
    for (&n, k) in &deleted {
        for &p in k.ports() {
            let e = g.edge_at(Endpoint::Port(n, p)).ok_or_else(|| pattern(format!("{n}.{p} is not connected")))?;
            affected.insert(e, *g.edge(e).expect("indexed edge"));
        }
    }
    let mut removed_loops = Vec::new();
    let mut segments = Vec::new();
    for (&wire, cs) in &on_wire {
        match wire {
            Wire::Edge(e) => {
                affected.insert(e, *g.edge(e).expect("checked above"));
            }
            Wire::Loop(l) => {
                removed_loops.push(l);
                for k in 0..cs.len() {
                    let prev = cs[(k + cs.len() - 1) % cs.len()].1;
                    segments.push(Segment { start: Start::CutDown(prev), end: End::CutUp(cs[k].1) });
                }
            }
        }
    }
    for (&id, edge) in &affected {
        let start = match edge.source {
            Endpoint::Port(n, p) if deleted.contains_key(&n) => Start::DelOut(n, p),
            other => Start::Real(other),
        };
        let end = match edge.target {
            Endpoint::Port(n, p) if deleted.contains_key(&n) => End::DelIn(n, p),
            other => End::Real(other),
        };
        let cuts = on_wire.get(&Wire::Edge(id)).map(Vec::as_slice).unwrap_or(&[]);
        let mut cur = start;
        for &(_, c) in cuts {
            segments.push(Segment { start: cur, end: End::CutUp(c) });
            cur = Start::CutDown(c);
        }
        segments.push(Segment { start: cur, end });
    }
    removed_loops.extend(rw.remove_loops.iter().copied());

    // Links, keyed by their joints.
    let mut new_ports: HashMap<(usize, Port), u32> = HashMap::new();
    let mut link_from: HashMap<End, usize> = HashMap::new();
    let mut link_into: HashMap<Start, usize> = HashMap::new();
    for (i, &(src, dst)) in rw.links.iter().enumerate() {
        let joint_in = match src {
            Src::Feeder(n, p) => {
                check_deleted_port(&deleted, n, p, true)?;
                Some(End::DelIn(n, p))
            }
            Src::Up(c) => Some(End::CutUp(check_cut(rw, c)?)),
            Src::New(k, p) => {
                check_new_port(rw, k, p, false)?;
                *new_ports.entry((k, p)).or_default() += 1;
                None
            }
        };
        let joint_out = match dst {
            Dst::Consumer(n, p) => {
                check_deleted_port(&deleted, n, p, false)?;
                Some(Start::DelOut(n, p))
            }
            Dst::Down(c) => Some(Start::CutDown(check_cut(rw, c)?)),
            Dst::New(k, p) => {
                check_new_port(rw, k, p, true)?;
                *new_ports.entry((k, p)).or_default() += 1;
                None
            }
        };
        if let Some(j) = joint_in {
            if link_from.insert(j, i).is_some() {
                return Err(pattern(format!("{src:?} used by two links")));
            }
        }
        if let Some(j) = joint_out {
            if link_into.insert(j, i).is_some() {
                return Err(pattern(format!("{dst:?} used by two links")));
            }
        }
    }
    for (k, kind) in rw.new_nodes.iter().enumerate() {
        for &p in kind.ports() {
            match new_ports.get(&(k, p)).copied().unwrap_or(0) {
                1 => {}
                0 => return Err(pattern(format!("port {p} of new node {k} is not linked"))),
                _ => return Err(pattern(format!("port {p} of new node {k} is linked twice"))),
            }
        }
    }

    let seg_from: HashMap<Start, usize> = segments
        .iter()
        .enumerate()
        .filter(|(_, s)| !matches!(s.start, Start::Real(_)))
        .map(|(i, s)| (s.start, i))
        .collect();

    let mut seg_seen = vec![false; segments.len()];
    let mut link_seen = vec![false; rw.links.len()];
    let mut chains = Vec::new();

    // Walk from a link onwards until a real end. Returns the target endpoint
    // or `None` if the walk came back to `stop_link`.
    let walk = |mut link: usize,
                stop_link: Option<usize>,
                links: &mut Vec<usize>,
                seg_seen: &mut Vec<bool>,
                link_seen: &mut Vec<bool>|
     -> Result<Option<Endpoint>, RewriteError> {
        loop {
            if Some(link) == stop_link && !links.is_empty() {
                return Ok(None);
            }
            link_seen[link] = true;
            links.push(link);
            let start = match rw.links[link].1 {
                Dst::New(k, p) => return Ok(Some(new_endpoint(k, p))),
                Dst::Consumer(n, p) => Start::DelOut(n, p),
                Dst::Down(c) => Start::CutDown(c),
            };
            let s = *seg_from.get(&start).ok_or_else(|| pattern(format!("{start:?} has no wire")))?;
            seg_seen[s] = true;
            match segments[s].end {
                End::Real(t) => return Ok(Some(t)),
                j => {
                    link = *link_from.get(&j).ok_or_else(|| pattern(format!("loose end at {j:?}")))?;
                }
            }
        }
    };

    for i in 0..segments.len() {
        let Start::Real(source) = segments[i].start else { continue };
        seg_seen[i] = true;
        match segments[i].end {
            End::Real(target) => chains.push(Chain::Open { source, target, links: vec![] }),
            j => {
                let first = *link_from.get(&j).ok_or_else(|| pattern(format!("loose end at {j:?}")))?;
                let mut links = Vec::new();
                let target = walk(first, None, &mut links, &mut seg_seen, &mut link_seen)?.expect("open walk");
                chains.push(Chain::Open { source, target, links });
            }
        }
    }
    for i in 0..rw.links.len() {
        if let Src::New(k, p) = rw.links[i].0 {
            let mut links = Vec::new();
            let target = walk(i, None, &mut links, &mut seg_seen, &mut link_seen)?.expect("open walk");
            chains.push(Chain::Open { source: new_endpoint(k, p), target, links });
        }
    }
    for i in 0..rw.links.len() {
        if link_seen[i] {
            continue;
        }
        let mut links = Vec::new();
        match walk(i, Some(i), &mut links, &mut seg_seen, &mut link_seen)? {
            None => chains.push(Chain::Closed { links }),
            Some(_) => return Err(pattern("a chain has no real start")),
        }
    }
    for (i, s) in segments.iter().enumerate() {
        if seg_seen[i] {
            continue;
        }
        let dead_start = !link_into.contains_key(&s.start) && !matches!(s.start, Start::Real(_));
        let dead_end = !link_from.contains_key(&s.end) && !matches!(s.end, End::Real(_));
        if !(dead_start && dead_end) {
            return Err(pattern(format!("loose wire {:?} -> {:?}", s.start, s.end)));
        }
    }

    Ok(Plan { removed_edges: affected.into_keys().collect(), removed_loops, chains })
}

/// Placeholder endpoint for new nodes; node ids are assigned on commit.
fn new_endpoint(k: usize, p: Port) -> Endpoint {
    Endpoint::Port(NodeId(u32::MAX - k as u32), p)
}

fn check_deleted_port(
    deleted: &HashMap<NodeId, &GateKind>,
    n: NodeId,
    p: Port,
    input: bool,
) -> Result<(), RewriteError> {
    match deleted.get(&n) {
        Some(k) if k.has_port(p) && p.is_input() == input => Ok(()),
        Some(_) => Err(pattern(format!("{n}.{p} is not a usable port"))),
        None => Err(pattern(format!("{n} is not deleted"))),
    }
}

fn check_cut(rw: &Rewrite, c: usize) -> Result<usize, RewriteError> {
    if c < rw.cuts.len() {
        Ok(c)
    } else {
        Err(pattern(format!("no cut {c}")))
    }
}

fn check_new_port(rw: &Rewrite, k: usize, p: Port, input: bool) -> Result<(), RewriteError> {
    match rw.new_nodes.get(k) {
        Some(kind) if kind.has_port(p) && p.is_input() == input => Ok(()),
        _ => Err(pattern(format!("new node {k} has no usable port {p}"))),
    }
}

fn commit(g: &mut Graph, rw: &Rewrite, plan: Plan) -> Applied {
    let counters = g.counters();
    let mut patch = Patch {
        removed_nodes: Vec::new(),
        removed_edges: Vec::new(),
        removed_loops: Vec::new(),
        added_nodes: Vec::new(),
        added_edges: Vec::new(),
        added_loops: Vec::new(),
        counters,
    };
    for e in plan.removed_edges {
        let edge = g.remove_edge(e).expect("planned edge");
        patch.removed_edges.push((e, edge));
    }
    for l in plan.removed_loops {
        g.remove_loop(l);
        patch.removed_loops.push(l);
    }
    for &n in &rw.delete {
        let k = g.remove_node(n).expect("planned node");
        patch.removed_nodes.push((n, k));
    }
    let new_nodes: Vec<NodeId> = rw
        .new_nodes
        .iter()
        .map(|k| {
            let id = g.fresh_node();
            g.insert_node(id, k.clone());
            id
        })
        .collect();
    patch.added_nodes = new_nodes.clone();
    let resolve = |at: Endpoint| match at {
        Endpoint::Port(n, p) if n.0 > u32::MAX - rw.new_nodes.len() as u32 => {
            Endpoint::Port(new_nodes[(u32::MAX - n.0) as usize], p)
        }
        other => other,
    };
    let mut link_sites = vec![Attach { wire: Wire::Edge(EdgeId(0)), slot: 0 }; rw.links.len()];
    for chain in plan.chains {
        let (wire, links) = match chain {
            Chain::Open { source, target, links } => {
                let id = g.fresh_edge();
                g.insert_edge(id, Edge { source: resolve(source), target: resolve(target) });
                patch.added_edges.push(id);
                (Wire::Edge(id), links)
            }
            Chain::Closed { links } => {
                let id = g.fresh_loop();
                g.insert_loop(id);
                patch.added_loops.push(id);
                (Wire::Loop(id), links)
            }
        };
        for (pos, l) in links.into_iter().enumerate() {
            link_sites[l] = Attach { wire, slot: pos as u32 };
        }
    }
    for _ in 0..rw.add_loops {
        let id = g.fresh_loop();
        g.insert_loop(id);
        patch.added_loops.push(id);
    }
    Applied { patch, new_nodes, link_sites }
}
