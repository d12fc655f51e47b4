//! Seeded generators for terms and lambda-sector graphs.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::coefficient::Coefficient;
use crate::graph::{GateKind, Graph, GraphBuilder, NodeId, Port};
use crate::lambda::{encode, steps_to_normal, Term};

const FREE: [&str; 3] = ["a", "b", "c"];
const BOUND: [&str; 4] = ["x", "y", "z", "w"];

/// A random term with exactly `size` syntax nodes. Variables are mostly
/// bound when a binder is in scope, otherwise one of `a`, `b`, `c`.
pub fn random_term(rng: &mut impl Rng, size: usize) -> Term {
    fn go(rng: &mut impl Rng, size: usize, scope: &mut Vec<String>) -> Term {
        if size <= 1 {
            return if !scope.is_empty() && rng.gen_bool(0.85) {
                Term::Var(scope[rng.gen_range(0..scope.len())].clone())
            } else {
                Term::var(FREE[rng.gen_range(0..FREE.len())])
            };
        }
        if size == 2 || rng.gen_bool(0.4) {
            let x = BOUND[rng.gen_range(0..BOUND.len())].to_string();
            scope.push(x.clone());
            let body = go(rng, size - 1, scope);
            scope.pop();
            return Term::Lam(x, Box::new(body));
        }
        let left = rng.gen_range(1..size - 1);
        let f = go(rng, left, scope);
        let a = go(rng, size - 1 - left, scope);
        Term::app(f, a)
    }
    go(rng, size, &mut Vec::new())
}

/// `count` distinct random terms of size 1..=`max_size` that reach a normal
/// form within `fuel` normal-order steps.
pub fn normalizing_corpus(seed: u64, count: usize, max_size: usize, fuel: usize) -> Vec<Term> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out: Vec<Term> = Vec::new();
    while out.len() < count {
        let size = rng.gen_range(1..=max_size);
        let t = random_term(&mut rng, size);
        if steps_to_normal(&t, fuel).is_some() && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// `count` random terms of size 1..=`max_size`, normalizing or not.
pub fn term_corpus(seed: u64, count: usize, max_size: usize) -> Vec<Term> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_size);
            random_term(&mut rng, size)
        })
        .collect()
}

/// A lambda-sector graph with at least `nodes` gates: the disjoint union of
/// encodings of random terms.
pub fn random_lambda_graph(seed: u64, nodes: usize) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut g = Graph::new();
    while g.node_count() < nodes {
        let size = rng.gen_range(5..=40);
        g.absorb(&encode(&random_term(&mut rng, size)));
    }
    g
}

/// A random graph over all five gates with 1..=`max_nodes` nodes.
/// Dilations draw their coefficient from `coefs`. About two thirds of the
/// ports are linked; the rest end on leaves. Sometimes carries a loop.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, coefs: &[Coefficient]) -> Graph {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let mut b = GraphBuilder::new();
    let mut outs = Vec::new();
    let mut ins = Vec::new();
    for _ in 0..n {
        let kind = match rng.gen_range(0..5) {
            0 => GateKind::Lambda,
            1 => GateKind::App,
            2 => GateKind::FanOut,
            3 if !coefs.is_empty() => GateKind::Dilation(coefs[rng.gen_range(0..coefs.len())].clone()),
            3 => GateKind::Dilation(Coefficient::one()),
            _ => GateKind::Termination,
        };
        let id = b.node(kind.clone());
        outs.extend(kind.outputs().map(|p| (id, p)));
        ins.extend(kind.inputs().map(|p| (id, p)));
    }
    shuffle(rng, &mut ins);
    for (a, pa) in outs {
        if rng.gen_bool(0.67) {
            if let Some((c, pc)) = ins.pop() {
                b.link(a, pa, c, pc);
            }
        }
    }
    b.complete_with_leaves();
    if rng.gen_bool(0.1) {
        b.add_loops(1);
    }
    b.build().expect("generated graphs are valid")
}

fn shuffle<T>(rng: &mut impl Rng, v: &mut [T]) {
    for i in (1..v.len()).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
}

type Emit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Calls `f` on every graph with at most `max_nodes` gates drawn from
/// `kinds` (as a multiset), under every partial matching of output ports to
/// input ports. Unmatched ports end on leaves. Isomorphic graphs recur.
pub fn for_each_small_graph(max_nodes: usize, kinds: &[GateKind], mut f: impl FnMut(Graph)) {
    fn multisets(kinds: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in from..kinds {
            cur.push(k);
            multisets(kinds, size, k, cur, out);
            cur.pop();
        }
    }
    fn matchings(
        outs: &[(NodeId, Port)],
        ins: &[(NodeId, Port)],
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        emit: &mut Emit<'_>,
    ) {
        let i = cur.len();
        if i == outs.len() {
            emit(cur);
            return;
        }
        cur.push((i, usize::MAX));
        matchings(outs, ins, used, cur, emit);
        cur.pop();
        for j in 0..ins.len() {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                matchings(outs, ins, used, cur, emit);
                cur.pop();
                used[j] = false;
            }
        }
    }
    for size in 0..=max_nodes {
        let mut sets = Vec::new();
        multisets(kinds.len(), size, 0, &mut Vec::new(), &mut sets);
        for set in sets {
            let mut proto = GraphBuilder::new();
            let ids: Vec<NodeId> = set.iter().map(|&k| proto.node(kinds[k].clone())).collect();
            let outs: Vec<(NodeId, Port)> =
                ids.iter().zip(&set).flat_map(|(&n, &k)| kinds[k].outputs().map(move |p| (n, p))).collect();
            let ins: Vec<(NodeId, Port)> =
                ids.iter().zip(&set).flat_map(|(&n, &k)| kinds[k].inputs().map(move |p| (n, p))).collect();
            let mut emit = |m: &[(usize, usize)]| {
                let mut b = GraphBuilder::new();
                for &k in &set {
                    b.node(kinds[k].clone());
                }
                for &(i, j) in m {
                    if j != usize::MAX {
                        b.link(outs[i].0, outs[i].1, ins[j].0, ins[j].1);
                    }
                }
                b.complete_with_leaves();
                f(b.build().expect("enumerated graphs are valid"));
            };
            matchings(&outs, &ins, &mut vec![false; ins.len()], &mut Vec::new(), &mut emit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_are_exact() {
        let mut rng = StdRng::seed_from_u64(1);
        for n in 1..30 {
            assert_eq!(random_term(&mut rng, n).size(), n);
        }
    }

    #[test]
    fn corpora_are_deterministic() {
        assert_eq!(normalizing_corpus(7, 20, 15, 100), normalizing_corpus(7, 20, 15, 100));
        assert_eq!(term_corpus(7, 5, 10), term_corpus(7, 5, 10));
    }

    #[test]
    fn small_family_counts() {
        // one lambda: var_out unmatched or fed back into in
        let mut n = 0;
        for_each_small_graph(1, &[GateKind::Lambda], |_| n += 1);
        assert_eq!(n, 1 + 3);
        let mut n = 0;
        for_each_small_graph(2, &[GateKind::App, GateKind::Termination], |g| {
            assert!(g.is_valid());
            n += 1;
        });
        // sizes 0, 1 (A: 3, T: 1), 2 (AA: 21, AT: 4, TT: 1)
        assert_eq!(n, 1 + 3 + 1 + 21 + 4 + 1);
    }

    #[test]
    fn random_graphs_are_valid() {
        let mut rng = StdRng::seed_from_u64(9);
        let coefs = [Coefficient::generator("a")];
        for _ in 0..200 {
            let g = random_graph(&mut rng, 12, &coefs);
            assert!(g.is_valid());
            assert!((1..=12).contains(&g.node_count()));
        }
    }

    #[test]
    fn big_graph_is_valid() {
        let g = random_lambda_graph(3, 2000);
        assert!(g.node_count() >= 2000);
        assert!(g.is_valid());
    }
}
