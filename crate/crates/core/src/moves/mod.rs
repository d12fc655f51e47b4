//! The move catalog: pattern matching, application in either direction, and
//! scripted sequences of moves.
//!
//! Every move is planned as a [`Rewrite`] and run through the shared engine,
//! so all moves share one undo mechanism. Applying a move also reports the
//! site at which the opposite direction undoes it, when there is one.

mod local;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::Coefficient;
use crate::global;
use crate::graph::{EdgeId, Endpoint, GateKind, Graph, LoopId, NodeId, Port, Wire};
use crate::rewrite::{self, Patch, Rewrite, RewriteError};

pub use crate::rewrite::Attach;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "move", content = "params", rename_all = "snake_case")]
pub enum MoveKind {
    Beta,
    ExtBeta(Coefficient),
    BetaStar(Coefficient),
    CoComm,
    CoAssoc,
    LocalFanOut(usize),
    PruneApp,
    PruneLambda,
    PruneDilation,
    PruneFanOutOne,
    PruneFanOutBoth,
    LoopAdd,
    LoopRemove,
    R1a(Coefficient),
    R1b(Coefficient),
    R2(Coefficient, Coefficient),
    Ext2,
    GlobalFanOut,
    GlobalPrune,
    Ext1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        })
    }
}

/// Where a move applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum Site {
    Edge { edge: EdgeId },
    Node { node: NodeId },
    Point { at: Attach },
    Pair { first: Attach, second: Attach },
    NodePoint { node: NodeId, at: Attach },
    EdgePair { first: EdgeId, second: EdgeId },
    Loop { id: LoopId },
    Anywhere,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("site no longer matches: {0}")]
    SiteStale(String),
    #[error("{0} has no reverse direction")]
    DirectionForbidden(MoveKind),
    #[error("component is not isolated; extra boundary edges: {0:?}")]
    NotIsolated(Vec<EdgeId>),
    #[error("the two components are not isomorphic")]
    NotIsomorphicPair,
    #[error("an oriented path closes the pattern: {0:?}")]
    PathExists(Vec<EdgeId>),
    #[error("component of size {size} exceeds the bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

pub(crate) fn stale(msg: impl Into<String>) -> MoveError {
    MoveError::SiteStale(msg.into())
}

/// How to locate the undoing site once the rewrite has run. Indices refer
/// to the rewrite's new nodes and links.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Inverse {
    Nothing,
    Anywhere,
    Node(usize),
    EdgeAt(usize, Port),
    Pair(usize, usize),
    Point(usize),
    NodePoint(usize, usize),
    EdgePair(usize, usize),
    NewLoop,
}

pub(crate) struct Planned {
    pub rewrite: Rewrite,
    pub inverse: Inverse,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub patch: Patch,
    pub new_nodes: Vec<NodeId>,
    /// Site where `(kind, direction.flip())` restores the previous graph up
    /// to isomorphism. `None` for one-way moves.
    pub inverse: Option<Site>,
}

impl MoveKind {
    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::Beta => "beta",
            MoveKind::ExtBeta(_) => "ext-beta",
            MoveKind::BetaStar(_) => "beta-star",
            MoveKind::CoComm => "cocomm",
            MoveKind::CoAssoc => "coassoc",
            MoveKind::LocalFanOut(_) => "local-fanout",
            MoveKind::PruneApp => "prune-app",
            MoveKind::PruneLambda => "prune-lambda",
            MoveKind::PruneDilation => "prune-dilation",
            MoveKind::PruneFanOutOne => "prune-fanout-one",
            MoveKind::PruneFanOutBoth => "prune-fanout-both",
            MoveKind::LoopAdd => "loop-add",
            MoveKind::LoopRemove => "loop-remove",
            MoveKind::R1a(_) => "r1a",
            MoveKind::R1b(_) => "r1b",
            MoveKind::R2(..) => "r2",
            MoveKind::Ext2 => "ext2",
            MoveKind::GlobalFanOut => "global-fanout",
            MoveKind::GlobalPrune => "global-prune",
            MoveKind::Ext1 => "ext1",
        }
    }

    pub fn is_bidirectional(&self) -> bool {
        !matches!(
            self,
            MoveKind::PruneApp
                | MoveKind::PruneLambda
                | MoveKind::PruneDilation
                | MoveKind::PruneFanOutOne
                | MoveKind::PruneFanOutBoth
                | MoveKind::GlobalPrune
        )
    }

    /// Only valid on uniform idempotent quasigroups.
    pub fn uniform_only(&self) -> bool {
        matches!(self, MoveKind::R1b(_))
    }

    /// Moves that take no parameter, in catalog order.
    pub fn plain() -> Vec<MoveKind> {
        vec![
            MoveKind::Beta,
            MoveKind::CoComm,
            MoveKind::CoAssoc,
            MoveKind::PruneApp,
            MoveKind::PruneLambda,
            MoveKind::PruneDilation,
            MoveKind::PruneFanOutOne,
            MoveKind::PruneFanOutBoth,
            MoveKind::LoopAdd,
            MoveKind::LoopRemove,
            MoveKind::Ext2,
            MoveKind::GlobalFanOut,
            MoveKind::GlobalPrune,
            MoveKind::Ext1,
        ]
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self {
            MoveKind::ExtBeta(c) | MoveKind::BetaStar(c) | MoveKind::R1a(c) | MoveKind::R1b(c) => {
                write!(f, ":{c}")
            }
            MoveKind::R2(e, m) => write!(f, ":{e},{m}"),
            MoveKind::LocalFanOut(n) => write!(f, ":{n}"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot parse move `{0}`")]
pub struct ParseMoveError(pub String);

impl FromStr for MoveKind {
    type Err = ParseMoveError;

    /// `name` or `name:params`, e.g. `beta`, `beta-star:a`, `r2:a,b^-1`,
    /// `local-fanout:6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMoveError(s.to_string());
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let coef =
            |p: Option<&str>| -> Result<Coefficient, ParseMoveError> { p.unwrap_or("1").parse().map_err(|_| err()) };
        let plain = |m: MoveKind| if params.is_none() { Ok(m) } else { Err(err()) };
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "beta" => plain(MoveKind::Beta),
            "ext-beta" | "extbeta" => Ok(MoveKind::ExtBeta(coef(params)?)),
            "beta-star" | "betastar" => Ok(MoveKind::BetaStar(coef(params)?)),
            "cocomm" | "co-comm" => plain(MoveKind::CoComm),
            "coassoc" | "co-assoc" => plain(MoveKind::CoAssoc),
            "local-fanout" => params.and_then(|p| p.parse().ok()).map(MoveKind::LocalFanOut).ok_or_else(err),
            "prune-app" => plain(MoveKind::PruneApp),
            "prune-lambda" => plain(MoveKind::PruneLambda),
            "prune-dilation" => plain(MoveKind::PruneDilation),
            "prune-fanout-one" => plain(MoveKind::PruneFanOutOne),
            "prune-fanout-both" => plain(MoveKind::PruneFanOutBoth),
            "loop-add" => plain(MoveKind::LoopAdd),
            "loop-remove" => plain(MoveKind::LoopRemove),
            "r1a" => Ok(MoveKind::R1a(coef(params)?)),
            "r1b" => Ok(MoveKind::R1b(coef(params)?)),
            "r2" => {
                let (e, m) = params.and_then(|p| p.split_once(',')).ok_or_else(err)?;
                Ok(MoveKind::R2(coef(Some(e))?, coef(Some(m))?))
            }
            "ext2" => plain(MoveKind::Ext2),
            "global-fanout" => plain(MoveKind::GlobalFanOut),
            "global-prune" => plain(MoveKind::GlobalPrune),
            "ext1" => plain(MoveKind::Ext1),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for Attach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.wire, self.slot)
    }
}

impl FromStr for Attach {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (w, slot) = s.split_once('#').ok_or(())?;
        let wire = if let Ok(e) = w.parse::<EdgeId>() { Wire::Edge(e) } else { Wire::Loop(w.parse::<LoopId>()?) };
        Ok(Attach { wire, slot: slot.parse().map_err(|_| ())? })
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Edge { edge } => write!(f, "{edge}"),
            Site::Node { node } => write!(f, "{node}"),
            Site::Point { at } => write!(f, "{at}"),
            Site::Pair { first, second } => write!(f, "{first},{second}"),
            Site::NodePoint { node, at } => write!(f, "{node}+{at}"),
            Site::EdgePair { first, second } => write!(f, "{first},{second}"),
            Site::Loop { id } => write!(f, "{id}"),
            Site::Anywhere => f.write_str("-"),
        }
    }
}

impl FromStr for Site {
    type Err = ();

    /// Inverse of `Display`: `e3`, `n2`, `l0`, `e3#0`, `e3#0,e5#0`,
    /// `n2+e3#0`, `e3,e5`, `-`.
    fn from_str(s: &str) -> Result<Self, ()> {
        let s = s.trim();
        if s == "-" {
            return Ok(Site::Anywhere);
        }
        if let Some((n, a)) = s.split_once('+') {
            return Ok(Site::NodePoint { node: n.parse()?, at: a.parse()? });
        }
        if let Some((a, b)) = s.split_once(',') {
            if s.contains('#') {
                return Ok(Site::Pair { first: a.parse()?, second: b.parse()? });
            }
            return Ok(Site::EdgePair { first: a.parse()?, second: b.parse()? });
        }
        if s.contains('#') {
            return Ok(Site::Point { at: s.parse()? });
        }
        if let Ok(edge) = s.parse() {
            return Ok(Site::Edge { edge });
        }
        if let Ok(node) = s.parse() {
            return Ok(Site::Node { node });
        }
        s.parse().map(|id| Site::Loop { id })
    }
}

/// All sites where `(m, dir)` applies, sorted and without duplicates.
///
/// Reverse moves that insert a pattern on two wires use one attachment per
/// wire, plus both orders when both points lie on the same edge and a single
/// cyclic pair on a loop.
pub fn enumerate_matches(g: &Graph, m: &MoveKind, dir: Direction) -> Vec<Site> {
    if dir == Direction::Reverse && !m.is_bidirectional() {
        return Vec::new();
    }
    let mut out: Vec<Site> = match (m, dir) {
        (MoveKind::GlobalFanOut, Direction::Reverse) => global::fanout_pairs(g, None),
        (MoveKind::LocalFanOut(n), Direction::Reverse) => global::fanout_pairs(g, Some(*n)),
        (MoveKind::LoopAdd, Direction::Forward) | (MoveKind::LoopRemove, Direction::Reverse) => {
            vec![Site::Anywhere]
        }
        _ => candidates(g, m, dir).into_iter().filter(|s| plan(g, m, s, dir).is_ok()).collect(),
    };
    out.sort();
    out.dedup();
    out
}

fn candidates(g: &Graph, m: &MoveKind, dir: Direction) -> Vec<Site> {
    use Direction::*;
    use MoveKind::*;
    let edges = || g.edges().map(|(edge, _)| Site::Edge { edge }).collect::<Vec<_>>();
    let nodes_where = |p: &dyn Fn(&GateKind) -> bool| {
        g.nodes().filter(|(_, k)| p(k)).map(|(node, _)| Site::Node { node }).collect::<Vec<_>>()
    };
    let points = || g.wires().map(|w| Site::Point { at: Attach::on(w) }).collect::<Vec<_>>();
    match (m, dir) {
        (Beta | ExtBeta(_), Forward) => g
            .edges()
            .filter(|(_, e)| matches!(e.source, Endpoint::Port(_, Port::TermOut)))
            .map(|(edge, _)| Site::Edge { edge })
            .collect(),
        (BetaStar(_), Forward) => g
            .edges()
            .filter(|(_, e)| matches!(e.target, Endpoint::Port(_, Port::XIn)))
            .map(|(edge, _)| Site::Edge { edge })
            .collect(),
        (Beta | ExtBeta(_) | BetaStar(_), Reverse) => pairs(g),
        (CoAssoc | GlobalFanOut | LocalFanOut(_) | GlobalPrune | Ext1, Forward) | (CoAssoc, Reverse) => edges(),
        (CoComm, _) | (PruneFanOutOne | PruneFanOutBoth | R1a(_), Forward) => nodes_where(&|k| *k == GateKind::FanOut),
        (PruneApp, Forward) => nodes_where(&|k| *k == GateKind::App),
        (PruneLambda, Forward) => nodes_where(&|k| *k == GateKind::Lambda),
        (PruneDilation | R1b(_) | R2(..) | Ext2, Forward) | (R2(..), Reverse) => {
            nodes_where(&|k| matches!(k, GateKind::Dilation(_)))
        }
        (LoopRemove, Forward) | (LoopAdd, Reverse) => g.loops().map(|id| Site::Loop { id }).collect(),
        (R1a(_) | R1b(_) | Ext1, Reverse) => points(),
        (Ext2, Reverse) => g
            .nodes()
            .filter(|(_, k)| **k == GateKind::Termination)
            .flat_map(|(node, _)| g.wires().map(move |w| Site::NodePoint { node, at: Attach::on(w) }))
            .collect(),
        _ => Vec::new(),
    }
}

fn pairs(g: &Graph) -> Vec<Site> {
    let wires: Vec<Wire> = g.wires().collect();
    let mut out = Vec::new();
    for &a in &wires {
        for &b in &wires {
            if a != b {
                out.push(Site::Pair { first: Attach::on(a), second: Attach::on(b) });
            }
        }
        let at = |slot| Attach { wire: a, slot };
        out.push(Site::Pair { first: at(0), second: at(1) });
        if matches!(a, Wire::Edge(_)) {
            out.push(Site::Pair { first: at(1), second: at(0) });
        }
    }
    out
}

pub(crate) fn plan(g: &Graph, m: &MoveKind, site: &Site, dir: Direction) -> Result<Planned, MoveError> {
    if dir == Direction::Reverse && !m.is_bidirectional() {
        return Err(MoveError::DirectionForbidden(m.clone()));
    }
    match m {
        MoveKind::GlobalFanOut => global::plan_fanout(g, site, dir, None),
        MoveKind::LocalFanOut(n) => global::plan_fanout(g, site, dir, Some(*n)),
        MoveKind::GlobalPrune => global::plan_prune(g, site),
        MoveKind::Ext1 => global::plan_ext1(g, site, dir, true),
        _ => local::plan(g, m, site, dir),
    }
}

/// Applies a move in place.
pub fn apply(g: &mut Graph, m: &MoveKind, site: &Site, dir: Direction) -> Result<Outcome, MoveError> {
    let planned = plan(g, m, site, dir)?;
    Ok(run(g, planned))
}

/// Like [`apply`] but leaves `g` untouched and returns the new graph.
pub fn applied(g: &Graph, m: &MoveKind, site: &Site, dir: Direction) -> Result<(Graph, Outcome), MoveError> {
    let mut h = g.clone();
    let out = apply(&mut h, m, site, dir)?;
    Ok((h, out))
}

pub(crate) fn run(g: &mut Graph, planned: Planned) -> Outcome {
    let done = rewrite::apply(g, &planned.rewrite).expect("planned rewrites are well formed");
    let node = |i: usize| done.new_nodes[i];
    let inverse = match planned.inverse {
        Inverse::Nothing => None,
        Inverse::Anywhere => Some(Site::Anywhere),
        Inverse::Node(i) => Some(Site::Node { node: node(i) }),
        Inverse::EdgeAt(i, p) => g.edge_at(Endpoint::Port(node(i), p)).map(|edge| Site::Edge { edge }),
        Inverse::Pair(a, b) => {
            let (mut first, mut second) = (done.link_sites[a], done.link_sites[b]);
            if first.wire == second.wire && matches!(first.wire, Wire::Loop(_)) {
                first.slot = 0;
                second.slot = 1;
            }
            Some(Site::Pair { first, second })
        }
        Inverse::Point(a) => Some(Site::Point { at: done.link_sites[a] }),
        Inverse::NodePoint(i, a) => Some(Site::NodePoint { node: node(i), at: done.link_sites[a] }),
        Inverse::EdgePair(a, b) => match (done.link_sites[a].wire, done.link_sites[b].wire) {
            (Wire::Edge(first), Wire::Edge(second)) => Some(Site::EdgePair { first, second }),
            _ => None,
        },
        Inverse::NewLoop => done.patch.added_loops().first().map(|&id| Site::Loop { id }),
    };
    Outcome { patch: done.patch, new_nodes: done.new_nodes, inverse }
}

/// Every applicable `(move, direction, site)` on `g`. Parameterized moves
/// are instantiated with the coefficients present in the graph; reverse
/// directions that need a coefficient not determined by the graph are
/// omitted.
pub fn applicable_moves(g: &Graph) -> Vec<(MoveKind, Direction, Site)> {
    let mut coefs: Vec<Coefficient> = g.nodes().filter_map(|(_, k)| k.coefficient().cloned()).collect();
    coefs.sort();
    coefs.dedup();
    let mut kinds = MoveKind::plain();
    for c in &coefs {
        kinds.push(MoveKind::ExtBeta(c.clone()));
        kinds.push(MoveKind::BetaStar(c.clone()));
        kinds.push(MoveKind::R1a(c.clone()));
        kinds.push(MoveKind::R1b(c.clone()));
        for d in &coefs {
            kinds.push(MoveKind::R2(c.clone(), d.clone()));
        }
    }
    let mut out = Vec::new();
    for m in kinds {
        for dir in [Direction::Forward, Direction::Reverse] {
            let parametric_reverse = matches!(
                m,
                MoveKind::ExtBeta(_) | MoveKind::BetaStar(_) | MoveKind::R1a(_) | MoveKind::R1b(_) | MoveKind::R2(..)
            );
            if dir == Direction::Reverse && parametric_reverse {
                continue;
            }
            for s in enumerate_matches(g, &m, dir) {
                out.push((m.clone(), dir, s));
            }
        }
    }
    out
}

/// Chooses one site among the current matches of a script step.
pub type SitePredicate = dyn Fn(&Graph, &Site) -> bool + Send + Sync;

#[derive(Clone)]
pub enum Selector {
    /// The only match; anything else is an error.
    Unique,
    /// The k-th match in enumeration order.
    Index(usize),
    /// A fixed site, applied without enumerating.
    Exact(Site),
    /// The only match accepted by a predicate.
    Matching(Arc<SitePredicate>),
}

impl Selector {
    pub fn first() -> Self {
        Selector::Index(0)
    }

    pub fn matching(f: impl Fn(&Graph, &Site) -> bool + Send + Sync + 'static) -> Self {
        Selector::Matching(Arc::new(f))
    }

    /// The unique match that involves node `n`.
    pub fn anchored_at(n: NodeId) -> Self {
        Selector::matching(move |g, s| site_nodes(g, s).contains(&n))
    }
}

impl fmt::Debug for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Unique => f.write_str("Unique"),
            Selector::Index(k) => write!(f, "Index({k})"),
            Selector::Exact(s) => write!(f, "Exact({s})"),
            Selector::Matching(_) => f.write_str("Matching(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub kind: MoveKind,
    pub selector: Selector,
    pub direction: Direction,
}

impl Step {
    pub fn new(kind: MoveKind, selector: Selector, direction: Direction) -> Self {
        Step { kind, selector, direction }
    }

    pub fn forward(kind: MoveKind, selector: Selector) -> Self {
        Step::new(kind, selector, Direction::Forward)
    }

    pub fn reverse(kind: MoveKind, selector: Selector) -> Self {
        Step::new(kind, selector, Direction::Reverse)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("step {step}: no site matches")]
    SelectorEmpty { step: usize },
    #[error("step {step}: {count} sites match")]
    SelectorAmbiguous { step: usize, count: usize },
    #[error("step {step}: {error}")]
    Move { step: usize, error: MoveError },
}

impl ScriptError {
    pub fn step(&self) -> usize {
        match self {
            ScriptError::SelectorEmpty { step }
            | ScriptError::SelectorAmbiguous { step, .. }
            | ScriptError::Move { step, .. } => *step,
        }
    }
}

/// One applied step of a script.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub kind: MoveKind,
    pub direction: Direction,
    pub site: Site,
    pub outcome: Outcome,
}

/// Runs a script on a copy of `g`.
pub fn apply_script(g: &Graph, script: &[Step]) -> Result<(Graph, Vec<TraceEntry>), ScriptError> {
    let mut cur = g.clone();
    let mut trace = Vec::with_capacity(script.len());
    for (step, s) in script.iter().enumerate() {
        let site = select(&cur, s, step)?;
        let outcome =
            apply(&mut cur, &s.kind, &site, s.direction).map_err(|error| ScriptError::Move { step, error })?;
        trace.push(TraceEntry { kind: s.kind.clone(), direction: s.direction, site, outcome });
    }
    Ok((cur, trace))
}

/// Resolves a step's selector on `g`.
pub fn select(g: &Graph, s: &Step, step: usize) -> Result<Site, ScriptError> {
    if let Selector::Exact(site) = &s.selector {
        return Ok(site.clone());
    }
    let matches = enumerate_matches(g, &s.kind, s.direction);
    let chosen: Vec<Site> = match &s.selector {
        Selector::Index(k) => {
            return matches.get(*k).cloned().ok_or(ScriptError::SelectorEmpty { step });
        }
        Selector::Matching(f) => matches.into_iter().filter(|site| f(g, site)).collect(),
        _ => matches,
    };
    match chosen.len() {
        0 => Err(ScriptError::SelectorEmpty { step }),
        1 => Ok(chosen.into_iter().next().unwrap()),
        count => Err(ScriptError::SelectorAmbiguous { step, count }),
    }
}

/// Nodes named by a site, directly or as endpoints of its wires.
pub fn site_nodes(g: &Graph, s: &Site) -> Vec<NodeId> {
    let wire_nodes = |w: Wire| match w {
        Wire::Edge(e) => g
            .edge(e)
            .map(|edge| [edge.source.node(), edge.target.node()].into_iter().flatten().collect())
            .unwrap_or_default(),
        Wire::Loop(_) => Vec::new(),
    };
    let mut out: Vec<NodeId> = match s {
        Site::Edge { edge } => wire_nodes(Wire::Edge(*edge)),
        Site::Node { node } => vec![*node],
        Site::Point { at } => wire_nodes(at.wire),
        Site::Pair { first, second } => [wire_nodes(first.wire), wire_nodes(second.wire)].concat(),
        Site::NodePoint { node, at } => [vec![*node], wire_nodes(at.wire)].concat(),
        Site::EdgePair { first, second } => [wire_nodes(Wire::Edge(*first)), wire_nodes(Wire::Edge(*second))].concat(),
        Site::Loop { .. } | Site::Anywhere => Vec::new(),
    };
    out.sort();
    out.dedup();
    out
}
