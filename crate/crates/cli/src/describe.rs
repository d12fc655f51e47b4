//! Structural site descriptors.
//!
//! A descriptor names a site by the refined colors of the nodes it touches,
//! the ports and leaf names of its wires, and an ordinal among sites that
//! look the same. Ids do not enter it, so it survives renumbering.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use glc_core::graph::{refined_colors, Endpoint, Graph, NodeId, Wire};
use glc_core::moves::{applicable_moves, enumerate_matches, site_nodes, Attach, Direction, MoveKind, Site};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveEntry {
    pub move_kind: String,
    pub direction: Direction,
    pub descriptor: String,
    /// Id-based site, valid for the current graph only.
    pub site: String,
    pub anchor: String,
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
}

struct Ctx<'a> {
    g: &'a Graph,
    colors: BTreeMap<NodeId, u64>,
}

impl Ctx<'_> {
    fn new(g: &Graph) -> Ctx<'_> {
        Ctx { g, colors: refined_colors(g) }
    }

    fn end(&self, at: Endpoint, h: &mut DefaultHasher) {
        match at {
            Endpoint::Port(n, p) => (0u8, self.colors.get(&n), p.name()).hash(h),
            Endpoint::Input(l) | Endpoint::Output(l) => (1u8, self.g.leaf(l).map(|x| x.name.as_str())).hash(h),
        }
    }

    fn wire(&self, w: Wire, h: &mut DefaultHasher) {
        match w {
            Wire::Edge(e) => {
                let Some(edge) = self.g.edge(e) else { return 2u8.hash(h) };
                0u8.hash(h);
                self.end(edge.source, h);
                self.end(edge.target, h);
            }
            Wire::Loop(_) => 1u8.hash(h),
        }
    }

    fn attach(&self, a: &Attach, h: &mut DefaultHasher) {
        self.wire(a.wire, h);
        a.slot.hash(h);
    }

    fn fingerprint(&self, m: &MoveKind, dir: Direction, s: &Site) -> u64 {
        let mut h = DefaultHasher::new();
        (m.to_string(), dir.to_string()).hash(&mut h);
        match s {
            Site::Edge { edge } => self.wire(Wire::Edge(*edge), &mut h),
            Site::Node { node } => self.colors.get(node).hash(&mut h),
            Site::Point { at } => self.attach(at, &mut h),
            Site::Pair { first, second } => {
                self.attach(first, &mut h);
                self.attach(second, &mut h);
                (first.wire == second.wire).hash(&mut h);
            }
            Site::NodePoint { node, at } => {
                self.colors.get(node).hash(&mut h);
                self.attach(at, &mut h);
            }
            Site::EdgePair { first, second } => {
                self.wire(Wire::Edge(*first), &mut h);
                self.wire(Wire::Edge(*second), &mut h);
            }
            Site::Loop { .. } => "loop".hash(&mut h),
            Site::Anywhere => "anywhere".hash(&mut h),
        }
        h.finish()
    }

    fn end_text(&self, at: Endpoint) -> String {
        match at {
            Endpoint::Port(n, p) => match self.g.kind(n) {
                Some(k) => format!("{}({n}).{p}", k.tag()),
                None => format!("{n}.{p}"),
            },
            Endpoint::Input(l) => format!("in:{}", self.g.leaf(l).map_or("?", |x| x.name.as_str())),
            Endpoint::Output(l) => format!("out:{}", self.g.leaf(l).map_or("?", |x| x.name.as_str())),
        }
    }

    fn wire_text(&self, w: Wire) -> String {
        match w {
            Wire::Edge(e) => match self.g.edge(e) {
                Some(edge) => format!("{} -> {}", self.end_text(edge.source), self.end_text(edge.target)),
                None => format!("{e}?"),
            },
            Wire::Loop(l) => format!("loop {l}"),
        }
    }

    fn anchor(&self, s: &Site) -> String {
        let node = |n: &NodeId| match self.g.kind(*n) {
            Some(k) => format!("{}({n})", k.tag()),
            None => format!("{n}?"),
        };
        match s {
            Site::Edge { edge } => self.wire_text(Wire::Edge(*edge)),
            Site::Node { node: n } => node(n),
            Site::Point { at } => self.wire_text(at.wire),
            Site::Pair { first, second } if first.wire == second.wire => {
                format!("{} (cuts {} then {})", self.wire_text(first.wire), first.slot, second.slot)
            }
            Site::Pair { first, second } => {
                format!("[{}] and [{}]", self.wire_text(first.wire), self.wire_text(second.wire))
            }
            Site::NodePoint { node: n, at } => format!("{} with [{}]", node(n), self.wire_text(at.wire)),
            Site::EdgePair { first, second } => {
                format!("[{}] and [{}]", self.wire_text(Wire::Edge(*first)), self.wire_text(Wire::Edge(*second)))
            }
            Site::Loop { id } => format!("loop {id}"),
            Site::Anywhere => "anywhere".into(),
        }
    }

    fn edges(&self, s: &Site) -> Vec<String> {
        let wire = |w: Wire| match w {
            Wire::Edge(e) => Some(e.to_string()),
            Wire::Loop(_) => None,
        };
        let mut out: Vec<String> = match s {
            Site::Edge { edge } => vec![edge.to_string()],
            Site::Point { at } | Site::NodePoint { at, .. } => wire(at.wire).into_iter().collect(),
            Site::Pair { first, second } => [wire(first.wire), wire(second.wire)].into_iter().flatten().collect(),
            Site::EdgePair { first, second } => vec![first.to_string(), second.to_string()],
            _ => vec![],
        };
        out.dedup();
        out
    }
}

/// Entries for a list of `(move, direction, site)`, in the given order.
fn entries(g: &Graph, list: Vec<(MoveKind, Direction, Site)>) -> Vec<(Site, MoveEntry)> {
    let ctx = Ctx::new(g);
    let mut seen: HashMap<u64, usize> = HashMap::new();
    list.into_iter()
        .map(|(m, dir, s)| {
            let fp = ctx.fingerprint(&m, dir, &s);
            let k = seen.entry(fp).or_default();
            let descriptor = format!("{fp:016x}.{k}");
            *k += 1;
            let entry = MoveEntry {
                move_kind: m.to_string(),
                direction: dir,
                descriptor,
                site: s.to_string(),
                anchor: ctx.anchor(&s),
                nodes: site_nodes(g, &s).iter().map(|n| n.to_string()).collect(),
                edges: ctx.edges(&s),
            };
            (s, entry)
        })
        .collect()
}

/// Every applicable move on `g`.
pub fn move_entries(g: &Graph) -> Vec<MoveEntry> {
    entries(g, applicable_moves(g)).into_iter().map(|(_, e)| e).collect()
}

/// The entries of one move and direction.
pub fn entries_for(g: &Graph, m: &MoveKind, dir: Direction) -> Vec<(Site, MoveEntry)> {
    let list = enumerate_matches(g, m, dir).into_iter().map(|s| (m.clone(), dir, s)).collect();
    entries(g, list)
}

/// Whether `s` has the shape of a descriptor.
pub fn is_descriptor(s: &str) -> bool {
    s.split_once('.').is_some_and(|(fp, k)| {
        fp.len() == 16
            && fp.bytes().all(|b| b.is_ascii_hexdigit())
            && !k.is_empty()
            && k.bytes().all(|b| b.is_ascii_digit())
    })
}

/// The current site named by `descriptor`, if it still exists.
pub fn resolve(g: &Graph, m: &MoveKind, dir: Direction, descriptor: &str) -> Option<Site> {
    entries_for(g, m, dir).into_iter().find(|(_, e)| e.descriptor == descriptor).map(|(s, _)| s)
}
