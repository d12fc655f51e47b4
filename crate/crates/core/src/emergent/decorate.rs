use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::graph::{Endpoint, GateKind, Graph, LeafId, NodeId, Port};

use super::EaTerm;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecorateError {
    #[error("{0} is a {1}, outside the emergent sector")]
    NotEmergentSector(NodeId, String),
    #[error("directed cycle through {0:?}")]
    CyclicGraph(Vec<NodeId>),
}

/// Propagates decorations from the input leaves to the output leaves.
/// Fan-outs copy, a dilation `ε` with inputs `x`, `y` outputs `x ∘ε y`, and
/// terminations discard. Input leaves missing from `inputs` are decorated
/// with the generator named after the leaf. Loops are ignored.
pub fn decorate(g: &Graph, inputs: &BTreeMap<LeafId, EaTerm>) -> Result<BTreeMap<LeafId, EaTerm>, DecorateError> {
    if let Some((n, k)) = g.nodes().find(|(_, k)| matches!(k, GateKind::Lambda | GateKind::App)) {
        return Err(DecorateError::NotEmergentSector(n, k.to_string()));
    }
    let mut value: HashMap<Endpoint, EaTerm> = HashMap::new();
    for (l, name) in g.input_leaves() {
        value.insert(Endpoint::Input(l), inputs.get(&l).cloned().unwrap_or_else(|| EaTerm::gen(name)));
    }
    let mut missing: HashMap<NodeId, usize> = g.nodes().map(|(n, k)| (n, k.inputs().count())).collect();
    let mut ready: Vec<NodeId> = Vec::new();
    let feed = |at: Endpoint, missing: &mut HashMap<NodeId, usize>, ready: &mut Vec<NodeId>| {
        let Some(Endpoint::Port(n, _)) = g.edge_at(at).and_then(|e| g.edge(e)).map(|e| e.target) else { return };
        let m = missing.get_mut(&n).expect("node exists");
        *m -= 1;
        if *m == 0 {
            ready.push(n);
        }
    };
    for (l, _) in g.input_leaves() {
        feed(Endpoint::Input(l), &mut missing, &mut ready);
    }
    let mut done = HashSet::new();
    while let Some(n) = ready.pop() {
        done.insert(n);
        let input = |p: Port| -> EaTerm {
            let src = g.feeder(n, p).expect("valid graph");
            value[&src].clone()
        };
        let outs: Vec<(Port, EaTerm)> = match g.kind(n).expect("node exists") {
            GateKind::FanOut => {
                let x = input(Port::In);
                vec![(Port::LeftOut, x.clone()), (Port::RightOut, x)]
            }
            GateKind::Dilation(c) => vec![(Port::Out, EaTerm::dil(c, input(Port::XIn), input(Port::YIn)))],
            _ => vec![],
        };
        for (p, v) in outs {
            value.insert(Endpoint::Port(n, p), v);
            feed(Endpoint::Port(n, p), &mut missing, &mut ready);
        }
    }
    if done.len() < g.node_count() {
        let stuck = g.nodes().map(|(n, _)| n).filter(|n| !done.contains(n)).collect();
        return Err(DecorateError::CyclicGraph(stuck));
    }
    Ok(g.output_leaves()
        .map(|(l, _)| {
            let src = g.edge(g.edge_at(Endpoint::Output(l)).expect("valid graph")).unwrap().source;
            (l, value[&src].clone())
        })
        .collect())
}

/// [`decorate`] with every input named after its leaf, keyed by output name.
pub fn decorate_by_name(g: &Graph) -> Result<BTreeMap<String, EaTerm>, DecorateError> {
    let out = decorate(g, &BTreeMap::new())?;
    Ok(out.into_iter().map(|(l, t)| (g.leaf(l).unwrap().name.clone(), t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;
    use crate::emergent::ea_normalize;
    use crate::graph::GraphBuilder;

    #[test]
    fn crossing() {
        let mut b = GraphBuilder::new();
        let f = b.node(GateKind::FanOut);
        let d = b.node(GateKind::dilation("e"));
        let (x, y) = (b.input("x"), b.input("y"));
        b.edge(x, b.port(f, Port::In));
        b.link(f, Port::LeftOut, d, Port::XIn);
        b.edge(y, b.port(d, Port::YIn));
        let (o1, o2) = (b.output("pass"), b.output("dil"));
        b.edge(b.port(f, Port::RightOut), o1);
        b.edge(b.port(d, Port::Out), o2);
        let out = decorate_by_name(&b.build().unwrap()).unwrap();
        assert_eq!(out["pass"], EaTerm::gen("x"));
        assert_eq!(out["dil"], EaTerm::dil(&Coefficient::generator("e"), EaTerm::gen("x"), EaTerm::gen("y")));
    }

    #[test]
    fn r2_left_side() {
        let mut b = GraphBuilder::new();
        let f = b.node(GateKind::FanOut);
        let d1 = b.node(GateKind::dilation("e"));
        let d2 = b.node(GateKind::dilation("m"));
        let (x, y) = (b.input("x"), b.input("y"));
        b.edge(x, b.port(f, Port::In));
        b.link(f, Port::LeftOut, d1, Port::XIn);
        b.link(f, Port::RightOut, d2, Port::XIn);
        b.edge(y, b.port(d2, Port::YIn));
        b.link(d2, Port::Out, d1, Port::YIn);
        let o = b.output("o");
        b.edge(b.port(d1, Port::Out), o);
        let out = decorate_by_name(&b.build().unwrap()).unwrap();
        let (e, m) = (Coefficient::generator("e"), Coefficient::generator("m"));
        let (gx, gy) = (EaTerm::gen("x"), EaTerm::gen("y"));
        assert_eq!(out["o"], EaTerm::dil(&e, gx.clone(), EaTerm::dil(&m, gx.clone(), gy.clone())));
        assert_eq!(ea_normalize(&out["o"]), EaTerm::dil(&(&e * &m), gx, gy));
    }

    #[test]
    fn feedback_is_cyclic() {
        // S -> D.x_in; D.out -> F.in; F.left_out -> D.y_in
        let mut b = GraphBuilder::new();
        let d = b.node(GateKind::dilation("e"));
        let f = b.node(GateKind::FanOut);
        b.link(d, Port::Out, f, Port::In);
        b.link(f, Port::LeftOut, d, Port::YIn);
        b.complete_with_leaves();
        let err = decorate_by_name(&b.build().unwrap()).unwrap_err();
        assert_eq!(err, DecorateError::CyclicGraph(vec![d, f]));
    }

    #[test]
    fn lambda_gates_are_rejected() {
        let mut b = GraphBuilder::new();
        b.node(GateKind::Lambda);
        b.complete_with_leaves();
        assert!(matches!(decorate_by_name(&b.build().unwrap()), Err(DecorateError::NotEmergentSector(..))));
    }
}
