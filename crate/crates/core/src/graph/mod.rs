//! The port-graph data model: five gate kinds, directed edges between
//! ports and leaves, and a multiset of loops.
//!
//! Every node port is attached to exactly one edge. Arrows that enter or
//! leave "nothing" end on a leaf; a lone edge from an input leaf to an
//! output leaf is a wire. Loops carry no endpoints at all.

mod canon;
mod query;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::Coefficient;

pub use canon::{
    canonical_form, canonical_key, canonical_key_labeled, is_isomorphic, is_isomorphic_labeled, refined_colors,
};
pub use query::{component_through, reachable, reachable_avoiding, ComponentError};

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                s.strip_prefix($prefix).and_then(|n| n.parse().ok()).map($name).ok_or(())
            }
        }
    };
}

id_type!(NodeId, "n");
id_type!(EdgeId, "e");
id_type!(LoopId, "l");
id_type!(LeafId, "f");

/// Port names. Which ports exist on a node is fixed by its [`GateKind`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    In,
    VarOut,
    TermOut,
    FunIn,
    ArgIn,
    Out,
    LeftOut,
    RightOut,
    XIn,
    YIn,
}

impl Port {
    pub const ALL: [Port; 10] = [
        Port::In,
        Port::VarOut,
        Port::TermOut,
        Port::FunIn,
        Port::ArgIn,
        Port::Out,
        Port::LeftOut,
        Port::RightOut,
        Port::XIn,
        Port::YIn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Port::In => "in",
            Port::VarOut => "var_out",
            Port::TermOut => "term_out",
            Port::FunIn => "fun_in",
            Port::ArgIn => "arg_in",
            Port::Out => "out",
            Port::LeftOut => "left_out",
            Port::RightOut => "right_out",
            Port::XIn => "x_in",
            Port::YIn => "y_in",
        }
    }

    pub fn is_input(self) -> bool {
        matches!(self, Port::In | Port::FunIn | Port::ArgIn | Port::XIn | Port::YIn)
    }

    pub fn is_output(self) -> bool {
        !self.is_input()
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Port {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Port::ALL.into_iter().find(|p| p.name() == s).ok_or(())
    }
}

/// The five elementary gates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Lambda,
    App,
    FanOut,
    Dilation(Coefficient),
    Termination,
}

impl GateKind {
    /// Ports in the local cyclic order of the gate.
    pub fn ports(&self) -> &'static [Port] {
        match self {
            GateKind::Lambda => &[Port::In, Port::VarOut, Port::TermOut],
            GateKind::App => &[Port::FunIn, Port::ArgIn, Port::Out],
            GateKind::FanOut => &[Port::In, Port::LeftOut, Port::RightOut],
            GateKind::Dilation(_) => &[Port::XIn, Port::YIn, Port::Out],
            GateKind::Termination => &[Port::In],
        }
    }

    pub fn has_port(&self, port: Port) -> bool {
        self.ports().contains(&port)
    }

    pub fn inputs(&self) -> impl Iterator<Item = Port> + '_ {
        self.ports().iter().copied().filter(|p| p.is_input())
    }

    pub fn outputs(&self) -> impl Iterator<Item = Port> + '_ {
        self.ports().iter().copied().filter(|p| p.is_output())
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GateKind::Lambda => "lambda",
            GateKind::App => "app",
            GateKind::FanOut => "fanout",
            GateKind::Dilation(_) => "dilation",
            GateKind::Termination => "term",
        }
    }

    pub fn coefficient(&self) -> Option<&Coefficient> {
        match self {
            GateKind::Dilation(c) => Some(c),
            _ => None,
        }
    }

    pub fn dilation(c: &str) -> Self {
        GateKind::Dilation(c.parse().expect("valid coefficient literal"))
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Dilation(c) => write!(f, "dilation {c}"),
            other => f.write_str(other.tag()),
        }
    }
}

/// One end of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Port(NodeId, Port),
    Input(LeafId),
    Output(LeafId),
}

impl Endpoint {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Endpoint::Port(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn port(self) -> Option<Port> {
        match self {
            Endpoint::Port(_, p) => Some(p),
            _ => None,
        }
    }

    fn can_be_source(self) -> bool {
        match self {
            Endpoint::Port(_, p) => p.is_output(),
            Endpoint::Input(_) => true,
            Endpoint::Output(_) => false,
        }
    }

    fn can_be_target(self) -> bool {
        match self {
            Endpoint::Port(_, p) => p.is_input(),
            Endpoint::Output(_) => true,
            Endpoint::Input(_) => false,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Port(n, p) => write!(f, "{n}.{p}"),
            Endpoint::Input(l) => write!(f, "input {l}"),
            Endpoint::Output(l) => write!(f, "output {l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: Endpoint,
    pub target: Endpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafKind {
    Input,
    Output,
}

/// A univalent boundary node. The name is metadata: unlabeled isomorphism
/// ignores it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leaf {
    pub kind: LeafKind,
    pub name: String,
}

/// Something an edge can be cut at: an edge or a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Wire {
    Edge(EdgeId),
    Loop(LoopId),
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wire::Edge(e) => e.fmt(f),
            Wire::Loop(l) => l.fmt(f),
        }
    }
}

/// An invariant violation reported by [`Graph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("port {0} is used by more than one edge")]
    DuplicatePort(Endpoint),
    #[error("port {0} does not exist")]
    UnknownPort(Endpoint),
    #[error("port {0} is not connected")]
    DanglingPort(Endpoint),
    #[error("edge {0} leaves {1}, which is not an output")]
    BadSource(EdgeId, Endpoint),
    #[error("edge {0} enters {1}, which is not an input")]
    BadTarget(EdgeId, Endpoint),
    #[error("leaf {0} is used by more than one edge")]
    DuplicateLeaf(LeafId),
    #[error("leaf {0} is not attached to any edge")]
    UnusedLeaf(LeafId),
    #[error("leaf {0} is undeclared")]
    UnknownLeaf(LeafId),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate port: {0}")]
    DuplicatePort(String),
    #[error("unknown port: {0}")]
    UnknownPort(String),
    #[error("dangling port: {0}")]
    DanglingPort(String),
    #[error("orientation: {0}")]
    Orientation(String),
    #[error("leaf: {0}")]
    Leaf(String),
}

impl From<Violation> for BuildError {
    fn from(v: Violation) -> Self {
        let msg = v.to_string();
        match v {
            Violation::DuplicatePort(_) => BuildError::DuplicatePort(msg),
            Violation::UnknownPort(_) => BuildError::UnknownPort(msg),
            Violation::DanglingPort(_) => BuildError::DanglingPort(msg),
            Violation::BadSource(..) | Violation::BadTarget(..) => BuildError::Orientation(msg),
            Violation::DuplicateLeaf(_) | Violation::UnusedLeaf(_) | Violation::UnknownLeaf(_) => BuildError::Leaf(msg),
        }
    }
}

/// A graph snapshot. Cloning is cheap enough for desk-scale work; moves
/// mutate in place under exclusive access and record a reversible patch.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: BTreeMap<NodeId, GateKind>,
    edges: BTreeMap<EdgeId, Edge>,
    loops: BTreeSet<LoopId>,
    leaves: BTreeMap<LeafId, Leaf>,
    next: Counters,
    index: HashMap<Endpoint, EdgeId>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct Counters {
    pub node: u32,
    pub edge: u32,
    pub looop: u32,
    pub leaf: u32,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.edges == other.edges
            && self.loops == other.loops
            && self.leaves == other.leaves
            && self.next == other.next
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assembles a graph without checking any invariant. Use
    /// [`Graph::validate`] afterwards, or [`GraphBuilder`] for checked
    /// construction.
    pub fn from_parts(
        nodes: impl IntoIterator<Item = (NodeId, GateKind)>,
        edges: impl IntoIterator<Item = (EdgeId, Edge)>,
        leaves: impl IntoIterator<Item = (LeafId, Leaf)>,
        loops: impl IntoIterator<Item = LoopId>,
    ) -> Self {
        let mut g = Graph {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
            leaves: leaves.into_iter().collect(),
            loops: loops.into_iter().collect(),
            ..Default::default()
        };
        g.next = Counters {
            node: g.nodes.keys().last().map_or(0, |n| n.0 + 1),
            edge: g.edges.keys().last().map_or(0, |e| e.0 + 1),
            looop: g.loops.iter().last().map_or(0, |l| l.0 + 1),
            leaf: g.leaves.keys().last().map_or(0, |l| l.0 + 1),
        };
        g.rebuild_index();
        g
    }

    fn rebuild_index(&mut self) {
        self.index.clear();
        for (&id, e) in &self.edges {
            self.index.insert(e.source, id);
            self.index.insert(e.target, id);
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &GateKind)> + '_ {
        self.nodes.iter().map(|(id, k)| (*id, k))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn loops(&self) -> impl Iterator<Item = LoopId> + '_ {
        self.loops.iter().copied()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (LeafId, &Leaf)> + '_ {
        self.leaves.iter().map(|(id, l)| (*id, l))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty() && self.loops.is_empty()
    }

    pub fn kind(&self, n: NodeId) -> Option<&GateKind> {
        self.nodes.get(&n)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn leaf(&self, l: LeafId) -> Option<&Leaf> {
        self.leaves.get(&l)
    }

    pub fn has_loop(&self, l: LoopId) -> bool {
        self.loops.contains(&l)
    }

    pub fn has_wire(&self, w: Wire) -> bool {
        match w {
            Wire::Edge(e) => self.edges.contains_key(&e),
            Wire::Loop(l) => self.loops.contains(&l),
        }
    }

    /// Edges and loops, in id order.
    pub fn wires(&self) -> impl Iterator<Item = Wire> + '_ {
        self.edges.keys().map(|&e| Wire::Edge(e)).chain(self.loops.iter().map(|&l| Wire::Loop(l)))
    }

    /// The edge attached at an endpoint.
    pub fn edge_at(&self, at: Endpoint) -> Option<EdgeId> {
        self.index.get(&at).copied()
    }

    /// The far end of the edge entering input port `port` of `n`.
    pub fn feeder(&self, n: NodeId, port: Port) -> Option<Endpoint> {
        let e = self.edge_at(Endpoint::Port(n, port))?;
        let edge = &self.edges[&e];
        (edge.target == Endpoint::Port(n, port)).then_some(edge.source)
    }

    /// The far end of the edge leaving output port `port` of `n`.
    pub fn consumer(&self, n: NodeId, port: Port) -> Option<Endpoint> {
        let e = self.edge_at(Endpoint::Port(n, port))?;
        let edge = &self.edges[&e];
        (edge.source == Endpoint::Port(n, port)).then_some(edge.target)
    }

    /// Node at the far end of `port`, if any.
    pub fn neighbor(&self, n: NodeId, port: Port) -> Option<NodeId> {
        if port.is_input() {
            self.feeder(n, port)?.node()
        } else {
            self.consumer(n, port)?.node()
        }
    }

    pub fn input_leaves(&self) -> impl Iterator<Item = (LeafId, &str)> + '_ {
        self.leaves.iter().filter(|(_, l)| l.kind == LeafKind::Input).map(|(id, l)| (*id, l.name.as_str()))
    }

    pub fn output_leaves(&self) -> impl Iterator<Item = (LeafId, &str)> + '_ {
        self.leaves.iter().filter(|(_, l)| l.kind == LeafKind::Output).map(|(id, l)| (*id, l.name.as_str()))
    }

    pub fn leaf_by_name(&self, kind: LeafKind, name: &str) -> Option<LeafId> {
        self.leaves.iter().find(|(_, l)| l.kind == kind && l.name == name).map(|(id, _)| *id)
    }

    pub fn count_kind(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.nodes.values().filter(|k| pred(k)).count()
    }

    /// Every invariant violation, empty iff the graph is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen: HashMap<Endpoint, u32> = HashMap::new();
        for (&id, e) in &self.edges {
            for (at, is_source) in [(e.source, true), (e.target, false)] {
                match at {
                    Endpoint::Port(n, p) => match self.nodes.get(&n) {
                        Some(k) if k.has_port(p) => {}
                        _ => {
                            out.push(Violation::UnknownPort(at));
                            continue;
                        }
                    },
                    Endpoint::Input(l) | Endpoint::Output(l) => {
                        let expected =
                            if matches!(at, Endpoint::Input(_)) { LeafKind::Input } else { LeafKind::Output };
                        match self.leaves.get(&l) {
                            Some(leaf) if leaf.kind == expected => {}
                            _ => {
                                out.push(Violation::UnknownLeaf(l));
                                continue;
                            }
                        }
                    }
                }
                if is_source && !at.can_be_source() {
                    out.push(Violation::BadSource(id, at));
                }
                if !is_source && !at.can_be_target() {
                    out.push(Violation::BadTarget(id, at));
                }
                *seen.entry(at).or_default() += 1;
            }
        }
        let mut dup: Vec<_> = seen.iter().filter(|(_, c)| **c > 1).map(|(a, _)| *a).collect();
        dup.sort();
        for at in dup {
            match at {
                Endpoint::Port(..) => out.push(Violation::DuplicatePort(at)),
                Endpoint::Input(l) | Endpoint::Output(l) => out.push(Violation::DuplicateLeaf(l)),
            }
        }
        for (&n, k) in &self.nodes {
            for &p in k.ports() {
                if !seen.contains_key(&Endpoint::Port(n, p)) {
                    out.push(Violation::DanglingPort(Endpoint::Port(n, p)));
                }
            }
        }
        for (&l, leaf) in &self.leaves {
            let at = match leaf.kind {
                LeafKind::Input => Endpoint::Input(l),
                LeafKind::Output => Endpoint::Output(l),
            };
            if !seen.contains_key(&at) {
                out.push(Violation::UnusedLeaf(l));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    // Mutation primitives. They keep the endpoint index in sync but do not
    // check graph invariants; the rewrite engine is responsible for that.

    pub(crate) fn counters(&self) -> Counters {
        self.next
    }

    pub(crate) fn set_counters(&mut self, c: Counters) {
        self.next = c;
    }

    pub(crate) fn fresh_node(&mut self) -> NodeId {
        let id = NodeId(self.next.node);
        self.next.node += 1;
        id
    }

    pub(crate) fn fresh_edge(&mut self) -> EdgeId {
        let id = EdgeId(self.next.edge);
        self.next.edge += 1;
        id
    }

    pub(crate) fn fresh_loop(&mut self) -> LoopId {
        let id = LoopId(self.next.looop);
        self.next.looop += 1;
        id
    }

    pub(crate) fn insert_node(&mut self, id: NodeId, kind: GateKind) {
        self.next.node = self.next.node.max(id.0 + 1);
        self.nodes.insert(id, kind);
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) -> Option<GateKind> {
        self.nodes.remove(&id)
    }

    pub(crate) fn insert_edge(&mut self, id: EdgeId, edge: Edge) {
        self.next.edge = self.next.edge.max(id.0 + 1);
        self.index.insert(edge.source, id);
        self.index.insert(edge.target, id);
        self.edges.insert(id, edge);
    }

    pub(crate) fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        let edge = self.edges.remove(&id)?;
        for at in [edge.source, edge.target] {
            if self.index.get(&at) == Some(&id) {
                self.index.remove(&at);
            }
        }
        Some(edge)
    }

    pub(crate) fn insert_loop(&mut self, id: LoopId) {
        self.next.looop = self.next.looop.max(id.0 + 1);
        self.loops.insert(id);
    }

    pub(crate) fn remove_loop(&mut self, id: LoopId) -> bool {
        self.loops.remove(&id)
    }

    /// Adds a new named leaf; used by builders and parsers.
    pub fn add_leaf(&mut self, kind: LeafKind, name: impl Into<String>) -> LeafId {
        let id = LeafId(self.next.leaf);
        self.next.leaf += 1;
        self.leaves.insert(id, Leaf { kind, name: name.into() });
        id
    }

    pub fn rename_leaf(&mut self, id: LeafId, name: impl Into<String>) {
        if let Some(l) = self.leaves.get_mut(&id) {
            l.name = name.into();
        }
    }

    /// Disjoint union; ids of `other` are shifted past this graph's counters.
    /// Returns the node id map applied to `other`.
    pub fn absorb(&mut self, other: &Graph) -> BTreeMap<NodeId, NodeId> {
        let base = self.next;
        let node_map: BTreeMap<NodeId, NodeId> = other.nodes.keys().map(|&n| (n, NodeId(base.node + n.0))).collect();
        let shift = |at: Endpoint| match at {
            Endpoint::Port(n, p) => Endpoint::Port(node_map[&n], p),
            Endpoint::Input(l) => Endpoint::Input(LeafId(base.leaf + l.0)),
            Endpoint::Output(l) => Endpoint::Output(LeafId(base.leaf + l.0)),
        };
        for (n, k) in &other.nodes {
            self.nodes.insert(node_map[n], k.clone());
        }
        for (l, leaf) in &other.leaves {
            self.leaves.insert(LeafId(base.leaf + l.0), leaf.clone());
        }
        for (e, edge) in &other.edges {
            let id = EdgeId(base.edge + e.0);
            self.insert_edge(id, Edge { source: shift(edge.source), target: shift(edge.target) });
        }
        for l in &other.loops {
            self.loops.insert(LoopId(base.looop + l.0));
        }
        self.next = Counters {
            node: base.node + other.next.node,
            edge: base.edge + other.next.edge,
            looop: base.looop + other.next.looop,
            leaf: base.leaf + other.next.leaf,
        };
        node_map
    }

    /// Joins output leaf `out` to input leaf `inp`, removing both leaves and
    /// composing their edges into one (or into a loop if they are the two
    /// ends of the same wire).
    pub fn splice(&mut self, out: LeafId, inp: LeafId) -> Result<(), BuildError> {
        let ea = self
            .edge_at(Endpoint::Output(out))
            .ok_or_else(|| BuildError::Leaf(format!("{out} is not an output leaf")))?;
        let eb = self
            .edge_at(Endpoint::Input(inp))
            .ok_or_else(|| BuildError::Leaf(format!("{inp} is not an input leaf")))?;
        let a = self.remove_edge(ea).expect("indexed edge");
        self.leaves.remove(&out);
        self.leaves.remove(&inp);
        if ea == eb {
            let l = self.fresh_loop();
            self.insert_loop(l);
            return Ok(());
        }
        let b = self.remove_edge(eb).expect("indexed edge");
        let id = self.fresh_edge();
        self.insert_edge(id, Edge { source: a.source, target: b.target });
        Ok(())
    }
}

/// Checked construction of graphs.
///
/// ```
/// use glc_core::graph::{GateKind, GraphBuilder, Port};
/// let mut b = GraphBuilder::new();
/// let l = b.node(GateKind::Lambda);
/// let x = b.input("x");
/// b.edge(x, b.port(l, Port::In));
/// let v = b.output("v");
/// b.edge(b.port(l, Port::VarOut), v);
/// let t = b.output("t");
/// b.edge(b.port(l, Port::TermOut), t);
/// assert!(b.build().is_ok());
/// ```
#[derive(Debug, Default)]
pub struct GraphBuilder {
    graph: Graph,
    pending: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, kind: GateKind) -> NodeId {
        let id = self.graph.fresh_node();
        self.graph.insert_node(id, kind);
        id
    }

    pub fn node_with_id(&mut self, id: NodeId, kind: GateKind) -> Result<NodeId, BuildError> {
        if self.graph.nodes.contains_key(&id) {
            return Err(BuildError::DuplicatePort(format!("node {id} declared twice")));
        }
        self.graph.insert_node(id, kind);
        Ok(id)
    }

    pub fn port(&self, n: NodeId, p: Port) -> Endpoint {
        Endpoint::Port(n, p)
    }

    /// A fresh input leaf, usable as an edge source.
    pub fn input(&mut self, name: impl Into<String>) -> Endpoint {
        Endpoint::Input(self.graph.add_leaf(LeafKind::Input, name))
    }

    /// A fresh output leaf, usable as an edge target.
    pub fn output(&mut self, name: impl Into<String>) -> Endpoint {
        Endpoint::Output(self.graph.add_leaf(LeafKind::Output, name))
    }

    pub fn edge(&mut self, source: Endpoint, target: Endpoint) -> &mut Self {
        self.pending.push(Edge { source, target });
        self
    }

    /// Port-to-port shorthand.
    pub fn link(&mut self, a: NodeId, pa: Port, b: NodeId, pb: Port) -> &mut Self {
        self.edge(Endpoint::Port(a, pa), Endpoint::Port(b, pb))
    }

    pub fn add_loops(&mut self, count: usize) -> &mut Self {
        for _ in 0..count {
            let l = self.graph.fresh_loop();
            self.graph.insert_loop(l);
        }
        self
    }

    /// Attaches a fresh leaf to every unconnected port. Input ports get input
    /// leaves named after the node and port; output ports get output leaves.
    pub fn complete_with_leaves(&mut self) -> &mut Self {
        let used: std::collections::HashSet<Endpoint> =
            self.pending.iter().flat_map(|e| [e.source, e.target]).collect();
        let free: Vec<(NodeId, Port)> = self
            .graph
            .nodes
            .iter()
            .flat_map(|(&n, k)| k.ports().iter().map(move |&p| (n, p)))
            .filter(|&(n, p)| !used.contains(&Endpoint::Port(n, p)))
            .collect();
        for (n, p) in free {
            let name = format!("{n}.{p}");
            if p.is_input() {
                let src = self.input(name);
                self.edge(src, Endpoint::Port(n, p));
            } else {
                let dst = self.output(name);
                self.edge(Endpoint::Port(n, p), dst);
            }
        }
        self
    }

    pub fn build(self) -> Result<Graph, BuildError> {
        let GraphBuilder { mut graph, pending } = self;
        for e in pending {
            let id = graph.fresh_edge();
            graph.edges.insert(id, e);
        }
        graph.rebuild_index();
        match graph.validate().into_iter().next() {
            Some(v) => Err(v.into()),
            None => Ok(graph),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_build() {
        let g = GraphBuilder::new().build().unwrap();
        assert_eq!((g.node_count(), g.edge_count(), g.loop_count()), (0, 0, 0));
        assert!(g.is_valid());
    }

    #[test]
    fn a_wire_is_a_graph() {
        let mut b = GraphBuilder::new();
        let (i, o) = (b.input("a"), b.output("b"));
        b.edge(i, o);
        let g = b.build().unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 1));
    }

    #[test]
    fn lone_lambda_on_leaves() {
        let mut b = GraphBuilder::new();
        b.node(GateKind::Lambda);
        b.complete_with_leaves();
        let g = b.build().unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 3));
        assert_eq!(g.input_leaves().count(), 1);
        assert_eq!(g.output_leaves().count(), 2);
    }

    #[test]
    fn build_errors_name_the_port() {
        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        let i = b.input("x");
        b.edge(i, b.port(l, Port::In));
        match b.build() {
            Err(BuildError::DanglingPort(msg)) => assert!(msg.contains("n0.var_out"), "{msg}"),
            other => panic!("{other:?}"),
        }

        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        b.link(l, Port::VarOut, l, Port::In);
        b.link(l, Port::TermOut, l, Port::In);
        assert!(matches!(b.build(), Err(BuildError::DuplicatePort(_))));

        let mut b = GraphBuilder::new();
        let l = b.node(GateKind::Lambda);
        b.link(l, Port::VarOut, l, Port::XIn);
        assert!(matches!(b.build(), Err(BuildError::UnknownPort(_))));
    }

    #[test]
    fn validate_reports_termination_output() {
        let g = Graph::from_parts(
            [(NodeId(0), GateKind::Termination), (NodeId(1), GateKind::Termination)],
            [(
                EdgeId(0),
                Edge { source: Endpoint::Port(NodeId(0), Port::Out), target: Endpoint::Port(NodeId(1), Port::In) },
            )],
            [],
            [],
        );
        let v = g.validate();
        assert!(v.contains(&Violation::UnknownPort(Endpoint::Port(NodeId(0), Port::Out))), "{v:?}");
        assert!(v.contains(&Violation::DanglingPort(Endpoint::Port(NodeId(0), Port::In))));
    }

    #[test]
    fn validate_reports_duplicate_port() {
        let a = Endpoint::Port(NodeId(0), Port::In);
        let g = Graph::from_parts(
            [(NodeId(0), GateKind::Termination)],
            [
                (EdgeId(0), Edge { source: Endpoint::Input(LeafId(0)), target: a }),
                (EdgeId(1), Edge { source: Endpoint::Input(LeafId(1)), target: a }),
            ],
            [
                (LeafId(0), Leaf { kind: LeafKind::Input, name: "a".into() }),
                (LeafId(1), Leaf { kind: LeafKind::Input, name: "b".into() }),
            ],
            [],
        );
        assert_eq!(g.validate(), vec![Violation::DuplicatePort(a)]);
    }

    #[test]
    fn splice_closes_a_wire_into_a_loop() {
        let mut b = GraphBuilder::new();
        let (i, o) = (b.input("a"), b.output("b"));
        b.edge(i, o);
        let mut g = b.build().unwrap();
        let out = g.leaf_by_name(LeafKind::Output, "b").unwrap();
        let inp = g.leaf_by_name(LeafKind::Input, "a").unwrap();
        g.splice(out, inp).unwrap();
        assert_eq!((g.edge_count(), g.loop_count()), (0, 1));
        assert!(g.is_valid());
    }
}
