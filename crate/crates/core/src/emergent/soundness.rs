//! Decoration checking of moves over generated emergent-sector graphs.
//!
//! The family for a move is rooted at its left-hand pattern (and at the
//! pattern of the reverse direction, obtained by applying the move once).
//! Each root is grown by up to `extra_steps` context steps: a gate feeding
//! an input leaf, a gate consuming an output leaf, a fan-out sharing one
//! source between two input leaves, or an output leaf joined to an input
//! leaf. Graphs that become cyclic or exceed `max_nodes` are dropped;
//! isomorphic graphs are kept once.

use std::collections::{BTreeMap, HashSet};

use crate::coefficient::Coefficient;
use crate::graph::{canonical_key, Endpoint, GateKind, Graph, GraphBuilder, LeafId, Port};
use crate::moves::{self, Direction, MoveKind, Site};
use crate::par::par_map;

use super::{decorate, ea_compare, DecorateError, EaTerm, EaVerdict};

/// `1`, `a`, `a⁻¹`, `b`, `ab`.
pub fn coefficient_set() -> Vec<Coefficient> {
    vec![
        Coefficient::one(),
        Coefficient::generator("a"),
        Coefficient::from_factors([("a", -1)]),
        Coefficient::generator("b"),
        Coefficient::from_factors([("a", 1), ("b", 1)]),
    ]
}

#[derive(Clone, Debug)]
pub struct Family {
    pub max_nodes: usize,
    pub extra_steps: usize,
    pub coefficients: Vec<Coefficient>,
}

impl Default for Family {
    fn default() -> Self {
        Family { max_nodes: 8, extra_steps: 2, coefficients: coefficient_set() }
    }
}

/// Moves whose soundness the decorations can witness, over `coefs`.
pub fn checkable_moves(coefs: &[Coefficient]) -> Vec<MoveKind> {
    let mut out: Vec<MoveKind> = coefs.iter().map(|c| MoveKind::R1a(c.clone())).collect();
    for e in coefs {
        for m in coefs {
            out.push(MoveKind::R2(e.clone(), m.clone()));
        }
    }
    out.extend([MoveKind::Ext2, MoveKind::CoComm, MoveKind::CoAssoc, MoveKind::PruneFanOutOne]);
    out
}

/// The left-hand pattern of a checkable move (or of `BetaStar`), with every
/// boundary port on its own leaf.
pub fn seed(m: &MoveKind) -> Option<Graph> {
    let mut b = GraphBuilder::new();
    match m {
        MoveKind::R1a(e) => {
            let f = b.node(GateKind::FanOut);
            let d = b.node(GateKind::Dilation(e.clone()));
            b.link(f, Port::LeftOut, d, Port::XIn).link(f, Port::RightOut, d, Port::YIn);
        }
        MoveKind::R2(e, mu) => {
            let f = b.node(GateKind::FanOut);
            let d1 = b.node(GateKind::Dilation(e.clone()));
            let d2 = b.node(GateKind::Dilation(mu.clone()));
            b.link(f, Port::LeftOut, d1, Port::XIn).link(f, Port::RightOut, d2, Port::XIn).link(
                d2,
                Port::Out,
                d1,
                Port::YIn,
            );
        }
        MoveKind::Ext2 => {
            b.node(GateKind::Dilation(Coefficient::one()));
        }
        MoveKind::CoComm => {
            b.node(GateKind::FanOut);
        }
        MoveKind::CoAssoc => {
            let p = b.node(GateKind::FanOut);
            let q = b.node(GateKind::FanOut);
            b.link(p, Port::LeftOut, q, Port::In);
        }
        MoveKind::PruneFanOutOne => {
            let f = b.node(GateKind::FanOut);
            let t = b.node(GateKind::Termination);
            b.link(f, Port::LeftOut, t, Port::In);
        }
        MoveKind::BetaStar(e) => {
            let f = b.node(GateKind::FanOut);
            let d = b.node(GateKind::Dilation(e.clone()));
            b.link(f, Port::LeftOut, d, Port::XIn);
        }
        _ => return None,
    }
    b.complete_with_leaves();
    Some(b.build().expect("seed patterns are valid"))
}

fn acyclic(g: &Graph) -> bool {
    !matches!(decorate(g, &BTreeMap::new()), Err(DecorateError::CyclicGraph(_)))
}

fn gate(kind: GateKind) -> Graph {
    let mut b = GraphBuilder::new();
    b.node(kind);
    b.complete_with_leaves();
    b.build().expect("single gate")
}

fn leaf_at(at: Option<Endpoint>) -> LeafId {
    match at {
        Some(Endpoint::Input(l) | Endpoint::Output(l)) => l,
        _ => unreachable!("fresh gate ports end on leaves"),
    }
}

/// Every graph one context step away from `g`.
fn grow(g: &Graph, coefs: &[Coefficient]) -> Vec<Graph> {
    let mut kinds = vec![GateKind::FanOut, GateKind::Termination];
    kinds.extend(coefs.iter().map(|c| GateKind::Dilation(c.clone())));
    let inputs: Vec<LeafId> = g.input_leaves().map(|(l, _)| l).collect();
    let outputs: Vec<LeafId> = g.output_leaves().map(|(l, _)| l).collect();
    let mut out = Vec::new();
    for kind in &kinds {
        let frag = gate(kind.clone());
        for &i in &inputs {
            for p in kind.outputs() {
                let mut h = g.clone();
                let map = h.absorb(&frag);
                let n = map.values().next().copied().unwrap();
                let l = leaf_at(h.consumer(n, p));
                h.splice(l, i).expect("leaves exist");
                out.push(h);
            }
        }
        for &o in &outputs {
            for p in kind.inputs() {
                let mut h = g.clone();
                let map = h.absorb(&frag);
                let n = map.values().next().copied().unwrap();
                let l = leaf_at(h.feeder(n, p));
                h.splice(o, l).expect("leaves exist");
                out.push(h);
            }
        }
    }
    let fan = gate(GateKind::FanOut);
    for (k, &i1) in inputs.iter().enumerate() {
        for &i2 in &inputs[k + 1..] {
            let mut h = g.clone();
            let map = h.absorb(&fan);
            let n = map.values().next().copied().unwrap();
            let left = leaf_at(h.consumer(n, Port::LeftOut));
            let right = leaf_at(h.consumer(n, Port::RightOut));
            h.splice(left, i1).expect("leaves exist");
            h.splice(right, i2).expect("leaves exist");
            out.push(h);
        }
    }
    for &o in &outputs {
        for &i in &inputs {
            let mut h = g.clone();
            if h.splice(o, i).is_ok() && h.loop_count() == 0 {
                out.push(h);
            }
        }
    }
    out
}

/// The generated family for `m`: its patterns grown by context steps.
pub fn family(m: &MoveKind, fam: &Family) -> Vec<Graph> {
    let Some(lhs) = seed(m) else { return Vec::new() };
    let mut roots = vec![lhs.clone()];
    if m.is_bidirectional() {
        if let Some(site) = moves::enumerate_matches(&lhs, m, Direction::Forward).first() {
            let (rhs, _) = moves::applied(&lhs, m, site, Direction::Forward).expect("enumerated site");
            roots.push(rhs);
        }
    }
    let mut seen = HashSet::new();
    let mut level: Vec<Graph> = roots.into_iter().filter(|g| seen.insert(canonical_key(g))).collect();
    let mut all = level.clone();
    for _ in 0..fam.extra_steps {
        let mut next = Vec::new();
        for g in &level {
            for h in grow(g, &fam.coefficients) {
                if h.node_count() <= fam.max_nodes && acyclic(&h) && seen.insert(canonical_key(&h)) {
                    next.push(h);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub graph: Graph,
    pub direction: Direction,
    pub site: Site,
    pub output: LeafId,
    pub before: EaTerm,
    pub after: EaTerm,
    pub verdict: EaVerdict,
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub kind: MoveKind,
    pub graphs: usize,
    pub sites: usize,
    pub comparisons: usize,
    pub failures: usize,
    pub undecided: usize,
    /// Sites whose result is cyclic and so cannot be decorated.
    pub skipped: usize,
    /// The first few failures.
    pub counterexamples: Vec<Counterexample>,
}

impl SoundnessReport {
    pub fn preserving(&self) -> bool {
        self.sites > 0 && self.failures == 0 && self.undecided == 0
    }
}

const KEEP: usize = 5;

#[derive(Default)]
struct Tally {
    sites: usize,
    comparisons: usize,
    failures: usize,
    undecided: usize,
    skipped: usize,
    examples: Vec<Counterexample>,
}

fn check_graph(g: &Graph, m: &MoveKind) -> Tally {
    let mut t = Tally::default();
    let inputs: BTreeMap<LeafId, EaTerm> =
        g.input_leaves().map(|(l, _)| (l, EaTerm::Gen(format!("v{}", l.0)))).collect();
    let Ok(before) = decorate(g, &inputs) else { return t };
    // A beta-like reverse may insert its pattern at any pair of points; the
    // forward direction already decides such a move.
    let both = m.is_bidirectional() && !matches!(m, MoveKind::BetaStar(_));
    let dirs: &[Direction] = if both { &[Direction::Forward, Direction::Reverse] } else { &[Direction::Forward] };
    for &dir in dirs {
        for site in moves::enumerate_matches(g, m, dir) {
            t.sites += 1;
            let Ok((h, _)) = moves::applied(g, m, &site, dir) else { continue };
            let Ok(after) = decorate(&h, &inputs) else {
                t.skipped += 1;
                continue;
            };
            for (leaf, b) in &before {
                t.comparisons += 1;
                let a = after.get(leaf).cloned().unwrap_or_else(|| EaTerm::gen("<missing>"));
                let verdict = ea_compare(b, &a);
                if verdict == EaVerdict::Equal {
                    continue;
                }
                if verdict == EaVerdict::Undecided {
                    t.undecided += 1;
                } else {
                    t.failures += 1;
                }
                if t.examples.len() < KEEP {
                    t.examples.push(Counterexample {
                        graph: g.clone(),
                        direction: dir,
                        site: site.clone(),
                        output: *leaf,
                        before: b.clone(),
                        after: a,
                        verdict,
                    });
                }
            }
        }
    }
    t
}

/// Checks `m` over its default family.
pub fn check_move_soundness(m: &MoveKind) -> SoundnessReport {
    check_move_soundness_with(m, &Family::default())
}

pub fn check_move_soundness_with(m: &MoveKind, fam: &Family) -> SoundnessReport {
    let graphs = family(m, fam);
    let tallies = par_map(&graphs, |g| check_graph(g, m));
    let mut r = SoundnessReport {
        kind: m.clone(),
        graphs: graphs.len(),
        sites: 0,
        comparisons: 0,
        failures: 0,
        undecided: 0,
        skipped: 0,
        counterexamples: Vec::new(),
    };
    for t in tallies {
        r.sites += t.sites;
        r.comparisons += t.comparisons;
        r.failures += t.failures;
        r.undecided += t.undecided;
        r.skipped += t.skipped;
        for ex in t.examples {
            if r.counterexamples.len() < KEEP {
                r.counterexamples.push(ex);
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Family {
        Family { max_nodes: 6, extra_steps: 1, coefficients: coefficient_set() }
    }

    #[test]
    fn seeds_have_a_site() {
        let coefs = coefficient_set();
        for m in checkable_moves(&coefs).iter().chain([&MoveKind::BetaStar(coefs[1].clone())]) {
            let g = seed(m).unwrap();
            assert!(!moves::enumerate_matches(&g, m, Direction::Forward).is_empty(), "{m}");
        }
    }

    #[test]
    fn families_are_acyclic_and_bounded() {
        let fam = small();
        let gs = family(&MoveKind::R2(Coefficient::generator("a"), Coefficient::generator("b")), &fam);
        assert!(gs.len() > 20);
        assert!(gs.iter().all(|g| g.node_count() <= 6 && acyclic(g) && g.is_valid()));
    }

    #[test]
    fn composition_is_sound() {
        let r = check_move_soundness_with(
            &MoveKind::R2(Coefficient::generator("a"), Coefficient::generator("b")),
            &small(),
        );
        assert!(r.preserving(), "{r:?}");
    }

    #[test]
    fn dual_beta_is_not_preserving() {
        let r = check_move_soundness_with(&MoveKind::BetaStar(Coefficient::generator("a")), &small());
        assert!(r.failures > 0);
        assert!(!r.counterexamples.is_empty());
    }
}
