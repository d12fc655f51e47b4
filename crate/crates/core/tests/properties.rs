mod common;

use std::collections::BTreeMap;

use glc_core::emergent::decorate_by_name;
use glc_core::format::{from_json, parse_glc, print_glc, to_dot, to_json};
use glc_core::generate::{random_graph, random_term};
use glc_core::graph::{
    canonical_key, canonical_key_labeled, is_isomorphic, is_isomorphic_labeled, Edge, Endpoint, GateKind, Graph, Leaf,
    NodeId,
};
use glc_core::lambda::{decode, encode, sector_of};
use glc_core::moves::{applied, enumerate_matches, Direction, MoveKind};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use common::{bidirectional_moves, coef, round_trip};

fn graph_from(seed: u64, max_nodes: usize) -> Graph {
    let coefs = [coef("1"), coef("a"), coef("b"), coef("a^1*b^1")];
    random_graph(&mut StdRng::seed_from_u64(seed), max_nodes, &coefs)
}

/// The same graph with node ids permuted and leaves renamed.
fn renumbered(g: &Graph, seed: u64) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    let old: Vec<NodeId> = g.nodes().map(|(n, _)| n).collect();
    let mut new: Vec<u32> = (0..old.len() as u32).map(|i| i * 3 + 1).collect();
    new.shuffle(&mut rng);
    let map: BTreeMap<NodeId, NodeId> = old.iter().zip(&new).map(|(&o, &n)| (o, NodeId(n))).collect();
    let end = |e: Endpoint| match e {
        Endpoint::Port(n, p) => Endpoint::Port(map[&n], p),
        other => other,
    };
    Graph::from_parts(
        g.nodes().map(|(n, k)| (map[&n], k.clone())),
        g.edges().map(|(id, e)| (id, Edge { source: end(e.source), target: end(e.target) })),
        g.leaves().map(|(id, l)| (id, Leaf { kind: l.kind, name: format!("renamed{}", id.0) })),
        g.loops(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn moves_undo(seed in any::<u64>(), which in 0usize..14, pick in any::<prop::sample::Index>()) {
        let g = graph_from(seed, 12);
        let m = &bidirectional_moves()[which];
        for dir in [Direction::Forward, Direction::Reverse] {
            let sites = enumerate_matches(&g, m, dir);
            if !sites.is_empty() {
                let site = pick.get(&sites);
                prop_assert!(round_trip(&g, m, site, dir).is_ok(), "{:?}", round_trip(&g, m, site, dir));
            }
        }
    }

    #[test]
    fn moves_keep_graphs_valid(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = graph_from(seed, 10);
        let all = glc_core::moves::applicable_moves(&g);
        if !all.is_empty() {
            let (m, dir, site) = pick.get(&all);
            let (h, _) = applied(&g, m, site, *dir).unwrap();
            prop_assert!(h.validate().is_empty());
        }
    }

    #[test]
    fn glc_round_trip_keeps_ids(seed in any::<u64>()) {
        let g = graph_from(seed, 12);
        let text = print_glc(&g);
        let back = parse_glc(&text).unwrap();
        prop_assert_eq!(print_glc(&back), text);
        prop_assert!(is_isomorphic_labeled(&back, &g));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = graph_from(seed, 12);
        let back = from_json(&to_json(&g)).unwrap();
        prop_assert_eq!(print_glc(&back), print_glc(&g));
        prop_assert_eq!(to_dot(&back), to_dot(&g));
    }

    #[test]
    fn keys_ignore_numbering(seed in any::<u64>(), perm in any::<u64>()) {
        let g = graph_from(seed, 12);
        let h = renumbered(&g, perm);
        prop_assert!(is_isomorphic(&g, &h));
        prop_assert_eq!(canonical_key(&g), canonical_key(&h));
        let relabeled = renumbered(&renumbered(&g, perm), perm ^ 1);
        prop_assert_eq!(canonical_key_labeled(&h), canonical_key_labeled(&relabeled));
    }

    #[test]
    fn keys_separate_one_changed_gate(seed in any::<u64>()) {
        let g = graph_from(seed, 8);
        let Some((n, GateKind::Dilation(c))) = g.nodes().find(|(_, k)| matches!(k, GateKind::Dilation(_))).map(|(n, k)| (n, k.clone())) else {
            return Ok(());
        };
        let changed = Graph::from_parts(
            g.nodes().map(|(m, k)| (m, if m == n { GateKind::Dilation(&c * &coef("z")) } else { k.clone() })),
            g.edges().map(|(id, e)| (id, *e)),
            g.leaves().map(|(id, l)| (id, l.clone())),
            g.loops(),
        );
        prop_assert!(!is_isomorphic(&g, &changed));
        prop_assert_ne!(canonical_key(&g), canonical_key(&changed));
    }

    #[test]
    fn encode_decode(seed in any::<u64>(), size in 1usize..30) {
        let t = random_term(&mut StdRng::seed_from_u64(seed), size);
        let g = encode(&t);
        prop_assert!(sector_of(&g).lambda_sector);
        prop_assert!(decode(&g).unwrap().alpha_eq(&t));
    }

    #[test]
    fn cocomm_keeps_decorations(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = graph_from(seed, 8);
        if g.nodes().any(|(_, k)| matches!(k, GateKind::Lambda | GateKind::App)) {
            return Ok(());
        }
        let Ok(before) = decorate_by_name(&g) else { return Ok(()) };
        let sites = enumerate_matches(&g, &MoveKind::CoComm, Direction::Forward);
        if !sites.is_empty() {
            let (h, _) = applied(&g, &MoveKind::CoComm, pick.get(&sites), Direction::Forward).unwrap();
            prop_assert_eq!(decorate_by_name(&h).unwrap(), before);
        }
    }
}
