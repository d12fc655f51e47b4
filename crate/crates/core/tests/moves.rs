mod common;

use std::collections::HashSet;

use glc_core::generate::{random_graph, random_term};
use glc_core::global::{ext1, global_fanout, global_prune};
use glc_core::graph::{
    canonical_key, is_isomorphic, is_isomorphic_labeled, Endpoint, GateKind, Graph, GraphBuilder, NodeId, Port, Wire,
};
use glc_core::lambda::{encode, parse, Term};
use glc_core::macros::{emergent_crossing, ext_beta_lhs, lambda_crossing, CrossingKind};
use glc_core::moves::{
    applicable_moves, applied, apply, apply_script, enumerate_matches, site_nodes, Attach, Direction, MoveError,
    MoveKind, ScriptError, Selector, Site, Step,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::coef;

fn term(s: &str) -> Graph {
    encode(&parse(s).unwrap())
}

fn bare_wire() -> Graph {
    glc_core::macros::wires(&[("in", "out")])
}

fn count(g: &Graph, kind: &GateKind) -> usize {
    g.count_kind(|k| k == kind)
}

#[test]
fn beta_on_identity_application() {
    let g = term("(\\x.x) y");
    let sites = enumerate_matches(&g, &MoveKind::Beta, Direction::Forward);
    assert_eq!(sites.len(), 1);
    let (h, _) = applied(&g, &MoveKind::Beta, &sites[0], Direction::Forward).unwrap();
    assert!(is_isomorphic_labeled(&h, &term("y")));
}

#[test]
fn reverse_beta_on_a_bare_wire() {
    let g = bare_wire();
    assert!(enumerate_matches(&g, &MoveKind::Beta, Direction::Forward).is_empty());
    let sites = enumerate_matches(&g, &MoveKind::Beta, Direction::Reverse);
    let keys: HashSet<Vec<u8>> =
        sites.iter().map(|s| canonical_key(&applied(&g, &MoveKind::Beta, s, Direction::Reverse).unwrap().0)).collect();
    assert_eq!(sites.len(), 2);
    assert_eq!(keys.len(), 2);

    // every pair of cut points on the wire, whether or not enumeration offers it
    let e = g.edges().next().unwrap().0;
    let mut brute = HashSet::new();
    for i in 0..3 {
        for j in 0..3 {
            let first = Attach { wire: Wire::Edge(e), slot: i };
            let second = Attach { wire: Wire::Edge(e), slot: j };
            if let Ok((h, _)) = applied(&g, &MoveKind::Beta, &Site::Pair { first, second }, Direction::Reverse) {
                assert!(h.is_valid());
                brute.insert(canonical_key(&h));
            }
        }
    }
    assert_eq!(brute, keys);
}

#[test]
fn ext2_needs_a_neutral_dilation() {
    for (c, want) in [("a", 0), ("1", 1)] {
        let mut b = GraphBuilder::new();
        b.node(GateKind::Dilation(coef(c)));
        b.complete_with_leaves();
        let g = b.build().unwrap();
        assert_eq!(enumerate_matches(&g, &MoveKind::Ext2, Direction::Forward).len(), want, "{c}");
    }
}

#[test]
fn foreign_sites_and_forbidden_directions() {
    let g = term("(\\x.x) y");
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let (t1, t2) = (b.node(GateKind::Termination), b.node(GateKind::Termination));
    b.link(l, Port::VarOut, t1, Port::In);
    b.link(l, Port::TermOut, t2, Port::In);
    b.complete_with_leaves();
    let other = b.build().unwrap();
    let site = enumerate_matches(&other, &MoveKind::PruneLambda, Direction::Forward);
    assert!(!site.is_empty());
    let err = apply(&mut g.clone(), &MoveKind::PruneLambda, &site[0], Direction::Forward).unwrap_err();
    assert!(matches!(err, MoveError::SiteStale(_)), "{err}");
    let err = apply(&mut other.clone(), &MoveKind::PruneLambda, &site[0], Direction::Reverse).unwrap_err();
    assert_eq!(err, MoveError::DirectionForbidden(MoveKind::PruneLambda));
}

#[test]
fn scripts() {
    let g = term("(\\x.x) y");
    let (same, trace) = apply_script(&g, &[]).unwrap();
    assert!(trace.is_empty());
    assert!(is_isomorphic_labeled(&same, &g));

    let beta = || Step::forward(MoveKind::Beta, Selector::first());
    assert!(matches!(apply_script(&g, &[beta(), beta()]), Err(ScriptError::SelectorEmpty { step: 1 })));

    let two = term("(\\x.x) ((\\x.x) y)");
    let any = Step::forward(MoveKind::Beta, Selector::matching(|_, _| true));
    assert!(matches!(apply_script(&two, &[any]), Err(ScriptError::SelectorAmbiguous { step: 0, count: 2 })));
}

#[test]
fn beta_on_the_eta_cycle_leaves_two_loops() {
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let a = b.node(GateKind::App);
    b.link(a, Port::Out, l, Port::In);
    b.link(l, Port::VarOut, a, Port::ArgIn);
    b.link(l, Port::TermOut, a, Port::FunIn);
    let g = b.build().unwrap();
    let (h, _) = apply_script(&g, &[Step::forward(MoveKind::Beta, Selector::first())]).unwrap();
    assert_eq!((h.node_count(), h.edge_count(), h.loop_count()), (0, 0, 2));
}

/// Nodes within `radius` links of `start`.
fn around(g: &Graph, start: Vec<NodeId>, radius: usize) -> HashSet<NodeId> {
    let mut seen: HashSet<NodeId> = start.into_iter().collect();
    for _ in 0..radius {
        let next: Vec<NodeId> = seen
            .iter()
            .flat_map(|&n| g.kind(n).unwrap().ports().iter().filter_map(move |&p| g.neighbor(n, p)))
            .collect();
        seen.extend(next);
    }
    seen
}

#[test]
fn local_moves_touch_only_their_pattern() {
    let coefs = [coef("1"), coef("a"), coef("b"), coef("a^1*b^1")];
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..300 {
        let g = random_graph(&mut rng, 10, &coefs);
        for (m, dir, site) in applicable_moves(&g) {
            if matches!(m, MoveKind::GlobalFanOut | MoveKind::GlobalPrune | MoveKind::LocalFanOut(_) | MoveKind::Ext1) {
                continue;
            }
            let (h, _) = applied(&g, &m, &site, dir).unwrap();
            let pattern = around(&g, site_nodes(&g, &site), 2);
            for (n, k) in g.nodes().filter(|(n, _)| !pattern.contains(n)) {
                assert_eq!(h.kind(n), Some(k), "{m} {dir} at {site} moved {n}");
            }
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn beta_turns_the_extended_pattern_into_the_emergent_crossing() {
    let a = coef("a");
    let g = ext_beta_lhs(&a);
    let (h, _) = apply_script(&g, &[Step::forward(MoveKind::Beta, Selector::first())]).unwrap();
    assert!(is_isomorphic_labeled(&h, &emergent_crossing(&a, CrossingKind::Over)));
    assert_eq!(enumerate_matches(&lambda_crossing(CrossingKind::Over), &MoveKind::Beta, Direction::Forward).len(), 1);
}

/// `λx.(x x)` with its result shared by a fan-out.
fn shared_self_application() -> (Graph, NodeId) {
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let a = b.node(GateKind::App);
    let f = b.node(GateKind::FanOut);
    let top = b.node(GateKind::FanOut);
    b.link(l, Port::VarOut, f, Port::In);
    b.link(f, Port::LeftOut, a, Port::FunIn);
    b.link(f, Port::RightOut, a, Port::ArgIn);
    b.link(a, Port::Out, l, Port::In);
    b.link(l, Port::TermOut, top, Port::In);
    let (o1, o2) = (b.output("u"), b.output("v"));
    b.edge(b.port(top, Port::LeftOut), o1);
    b.edge(b.port(top, Port::RightOut), o2);
    (b.build().unwrap(), top)
}

#[test]
fn global_fanout_copies_a_closed_term() {
    let (g, top) = shared_self_application();
    let e = g.edge_at(Endpoint::Port(top, Port::In)).unwrap();
    let (h, out) = global_fanout(&g, &Site::Edge { edge: e }, Direction::Forward).unwrap();
    assert_eq!(h.node_count(), 6);
    assert_eq!((count(&h, &GateKind::Lambda), count(&h, &GateKind::App), count(&h, &GateKind::FanOut)), (2, 2, 2));
    let single = term("\\x.x x");
    assert!(is_isomorphic(&h, &glc_core::macros::compose(&single, &single, &[]).unwrap()));
    let (back, _) = global_fanout(&h, &out.inverse.unwrap(), Direction::Reverse).unwrap();
    assert!(is_isomorphic_labeled(&back, &g));
}

#[test]
fn global_fanout_needs_an_isolated_component() {
    let mut b = GraphBuilder::new();
    let d = b.node(GateKind::dilation("a"));
    let f = b.node(GateKind::FanOut);
    b.link(d, Port::Out, f, Port::In);
    b.complete_with_leaves();
    let g = b.build().unwrap();
    let e = g.edge_at(Endpoint::Port(f, Port::In)).unwrap();
    let err = global_fanout(&g, &Site::Edge { edge: e }, Direction::Forward).unwrap_err();
    assert!(matches!(err, MoveError::NotIsolated(ref extra) if extra.len() == 2), "{err}");
}

#[test]
fn global_prune_removes_the_component_and_the_termination() {
    let single = term("\\x.x x");
    let mut b = GraphBuilder::new();
    b.node(GateKind::Termination);
    b.complete_with_leaves();
    let sink = b.build().unwrap();
    let in_name = sink.input_leaves().next().unwrap().1.to_string();
    let out_name = single.output_leaves().next().unwrap().1.to_string();
    let g = glc_core::macros::compose(&single, &sink, &[(out_name.as_str(), in_name.as_str())]).unwrap();
    assert_eq!(g.node_count(), single.node_count() + 1);
    let t = g.nodes().find(|(_, k)| **k == GateKind::Termination).map(|(n, _)| n).unwrap();
    let e = g.edge_at(Endpoint::Port(t, Port::In)).unwrap();
    let (h, _) = global_prune(&g, e).unwrap();
    assert!(h.is_empty(), "{h:?}");
}

#[test]
fn ext1_removes_an_eta_redex() {
    let g = term("\\x.f x");
    let sites = enumerate_matches(&g, &MoveKind::Ext1, Direction::Forward);
    assert_eq!(sites.len(), 1);
    let (h, _) = ext1(&g, &sites[0], Direction::Forward).unwrap();
    assert!(is_isomorphic_labeled(&h, &term("f")));

    let wire = bare_wire();
    let sites = enumerate_matches(&wire, &MoveKind::Ext1, Direction::Reverse);
    let (h, out) = ext1(&wire, &sites[0], Direction::Reverse).unwrap();
    assert_eq!((count(&h, &GateKind::Lambda), count(&h, &GateKind::App)), (1, 1));
    let (back, _) = ext1(&h, &out.inverse.unwrap(), Direction::Forward).unwrap();
    assert!(is_isomorphic_labeled(&back, &wire));
}

/// The lambda whose body is the whole result.
fn root_lambda(g: &Graph) -> Option<NodeId> {
    g.nodes()
        .filter(|(_, k)| **k == GateKind::Lambda)
        .map(|(n, _)| n)
        .find(|&n| matches!(g.consumer(n, Port::TermOut), Some(Endpoint::Output(_))))
}

#[test]
fn ext1_agrees_with_eta() {
    let mut rng = StdRng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 200 {
        let m = random_term(&mut rng, 12);
        if m.free_vars().contains("x") {
            continue;
        }
        let t = Term::lam("x", Term::app(m.clone(), Term::var("x")));
        let g = encode(&t);
        let l = root_lambda(&g).unwrap();
        let e = g.edge_at(Endpoint::Port(l, Port::In)).unwrap();
        let (h, _) = ext1(&g, &Site::Edge { edge: e }, Direction::Forward).unwrap();
        assert!(is_isomorphic_labeled(&h, &encode(&m)), "{t}");
        checked += 1;
    }
}
