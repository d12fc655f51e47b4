//! Crossing macros and other small named fragments.
//!
//! Four-terminal fragments use input leaves `1`, `2` and output leaves `3`,
//! `4`, with strands `1 -> 3` and `2 -> 4` wherever that makes sense.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coefficient::Coefficient;
use crate::graph::{BuildError, GateKind, Graph, GraphBuilder, LeafId, LeafKind, Port};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Over,
    Under,
}

/// Which dilation input of the termination gadget is external.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetInput {
    #[default]
    X,
    Y,
}

fn dilation(c: &Coefficient) -> GateKind {
    GateKind::Dilation(c.clone())
}

/// The beta pattern read as a crossing. Over: `1 -> λ.in`, `∧.out -> 3`,
/// `2 -> ∧.arg_in`, `λ.var_out -> 4`. Under swaps the roles of the strands.
pub fn lambda_crossing(kind: CrossingKind) -> Graph {
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let a = b.node(GateKind::App);
    b.link(l, Port::TermOut, a, Port::FunIn);
    let (i1, i2) = (b.input("1"), b.input("2"));
    let (o3, o4) = (b.output("3"), b.output("4"));
    let (top_in, arg_in, out, var) = match kind {
        CrossingKind::Over => (i1, i2, o3, o4),
        CrossingKind::Under => (i2, i1, o4, o3),
    };
    b.edge(top_in, b.port(l, Port::In));
    b.edge(arg_in, b.port(a, Port::ArgIn));
    b.edge(b.port(a, Port::Out), out);
    b.edge(b.port(l, Port::VarOut), var);
    b.build().expect("fixed fragment")
}

/// Fan-out and dilation crossing. Over: `1 -> Υ.in`, `Υ.left_out -> ε.x_in`,
/// `2 -> ε.y_in`, `ε.out -> 3`, `Υ.right_out -> 4`; output 3 carries
/// `1 ∘ε 2` and 4 passes 1 through. Under is the mirror image.
pub fn emergent_crossing(eps: &Coefficient, kind: CrossingKind) -> Graph {
    let mut b = GraphBuilder::new();
    let f = b.node(GateKind::FanOut);
    let d = b.node(dilation(eps));
    let (i1, i2) = (b.input("1"), b.input("2"));
    let (o3, o4) = (b.output("3"), b.output("4"));
    let (fan_in, y_in, to_x, pass, out) = match kind {
        CrossingKind::Over => (i1, i2, Port::LeftOut, (Port::RightOut, o4), o3),
        CrossingKind::Under => (i2, i1, Port::RightOut, (Port::LeftOut, o3), o4),
    };
    b.edge(fan_in, b.port(f, Port::In));
    b.link(f, to_x, d, Port::XIn);
    b.edge(y_in, b.port(d, Port::YIn));
    b.edge(b.port(f, pass.0), pass.1);
    b.edge(b.port(d, Port::Out), out);
    b.build().expect("fixed fragment")
}

/// The over crossing with strand 4 fed back into input 2: the left side of
/// R1a, with input `1` and output `3`.
pub fn kink(eps: &Coefficient) -> Graph {
    let mut g = emergent_crossing(eps, CrossingKind::Over);
    splice_by_name(&mut g, "4", "2").expect("leaves exist");
    g
}

/// The four-gate pattern of the extended beta move: `1 -> λ.in`,
/// `λ.term_out -> ∧.fun_in`, `2 -> ∧.arg_in`, `∧.out -> Υ.in`,
/// `Υ.left_out -> ε.x_in`, `λ.var_out -> ε.y_in`, `ε.out -> 3`,
/// `Υ.right_out -> 4`.
pub fn ext_beta_lhs(eps: &Coefficient) -> Graph {
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let a = b.node(GateKind::App);
    let f = b.node(GateKind::FanOut);
    let d = b.node(dilation(eps));
    let (i1, i2) = (b.input("1"), b.input("2"));
    let (o3, o4) = (b.output("3"), b.output("4"));
    b.edge(i1, b.port(l, Port::In));
    b.link(l, Port::TermOut, a, Port::FunIn);
    b.edge(i2, b.port(a, Port::ArgIn));
    b.link(a, Port::Out, f, Port::In);
    b.link(f, Port::LeftOut, d, Port::XIn);
    b.link(l, Port::VarOut, d, Port::YIn);
    b.edge(b.port(d, Port::Out), o3);
    b.edge(b.port(f, Port::RightOut), o4);
    b.build().expect("fixed fragment")
}

/// The extended beta pattern with λ, ∧ and Υ, ε exchanged port for port:
/// `1 -> Υ.in`, `Υ.left_out -> ε.x_in`, `2 -> ε.y_in`, `ε.out -> λ.in`,
/// `λ.term_out -> ∧.fun_in`, `Υ.right_out -> ∧.arg_in`, `∧.out -> 3`,
/// `λ.var_out -> 4`.
pub fn dual_ext_beta_lhs(eps: &Coefficient) -> Graph {
    let mut b = GraphBuilder::new();
    let f = b.node(GateKind::FanOut);
    let d = b.node(dilation(eps));
    let l = b.node(GateKind::Lambda);
    let a = b.node(GateKind::App);
    let (i1, i2) = (b.input("1"), b.input("2"));
    let (o3, o4) = (b.output("3"), b.output("4"));
    b.edge(i1, b.port(f, Port::In));
    b.link(f, Port::LeftOut, d, Port::XIn);
    b.edge(i2, b.port(d, Port::YIn));
    b.link(d, Port::Out, l, Port::In);
    b.link(l, Port::TermOut, a, Port::FunIn);
    b.link(f, Port::RightOut, a, Port::ArgIn);
    b.edge(b.port(a, Port::Out), o3);
    b.edge(b.port(l, Port::VarOut), o4);
    b.build().expect("fixed fragment")
}

/// A dilation whose output feeds one of its own inputs; the other input is
/// the single input leaf `1`. One input, no outputs, like a termination.
pub fn termination_gadget(eps: &Coefficient, external: GadgetInput) -> Graph {
    let mut b = GraphBuilder::new();
    let d = b.node(dilation(eps));
    let (ext, fed) = match external {
        GadgetInput::X => (Port::XIn, Port::YIn),
        GadgetInput::Y => (Port::YIn, Port::XIn),
    };
    let i = b.input("1");
    b.edge(i, b.port(d, ext));
    b.link(d, Port::Out, d, fed);
    b.build().expect("fixed fragment")
}

/// Parallel wires `a -> b` for each `(a, b)`.
pub fn wires(pairs: &[(&str, &str)]) -> Graph {
    let mut b = GraphBuilder::new();
    for (i, o) in pairs {
        let (i, o) = (b.input(*i), b.output(*o));
        b.edge(i, o);
    }
    b.build().expect("wires are valid")
}

fn leaf_named(g: &Graph, kind: LeafKind, name: &str) -> Result<LeafId, BuildError> {
    g.leaf_by_name(kind, name).ok_or_else(|| BuildError::Leaf(format!("no {kind:?} leaf named `{name}`")))
}

/// Joins the output leaf `out` to the input leaf `inp`.
pub fn splice_by_name(g: &mut Graph, out: &str, inp: &str) -> Result<(), BuildError> {
    let o = leaf_named(g, LeafKind::Output, out)?;
    let i = leaf_named(g, LeafKind::Input, inp)?;
    g.splice(o, i)
}

/// Sequential composition: the disjoint union of `first` and `second` with
/// each output of `first` named in `joins` spliced into the named input of
/// `second`. Leaves keep their names.
pub fn compose(first: &Graph, second: &Graph, joins: &[(&str, &str)]) -> Result<Graph, BuildError> {
    let mut g = first.clone();
    let before: BTreeSet<LeafId> = g.leaves().map(|(l, _)| l).collect();
    g.absorb(second);
    for (out, inp) in joins {
        let o = g
            .leaves()
            .find(|(l, leaf)| before.contains(l) && leaf.kind == LeafKind::Output && leaf.name == *out)
            .map(|(l, _)| l)
            .ok_or_else(|| BuildError::Leaf(format!("no output leaf named `{out}`")))?;
        let i = g
            .leaves()
            .find(|(l, leaf)| !before.contains(l) && leaf.kind == LeafKind::Input && leaf.name == *inp)
            .map(|(l, _)| l)
            .ok_or_else(|| BuildError::Leaf(format!("no input leaf named `{inp}`")))?;
        g.splice(o, i)?;
    }
    Ok(g)
}

/// Renames leaves by the pairs in `mapping`, simultaneously.
pub fn relabel(g: &Graph, mapping: &[(&str, &str)]) -> Graph {
    let mut h = g.clone();
    let renames: Vec<(LeafId, String)> = g
        .leaves()
        .filter_map(|(l, leaf)| mapping.iter().find(|(from, _)| *from == leaf.name).map(|(_, to)| (l, to.to_string())))
        .collect();
    for (l, name) in renames {
        h.rename_leaf(l, name);
    }
    h
}
