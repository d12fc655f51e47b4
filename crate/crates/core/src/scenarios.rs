//! Checked derivations: each scenario builds a graph, runs a move script and
//! compares the result with an expected graph by canonical key.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coefficient::Coefficient;
use crate::emergent::{decorate_by_name, ea_equal};
use crate::format::to_dot;
use crate::global::{ext1, ext1_unchecked};
use crate::graph::{
    canonical_key, canonical_key_labeled, is_isomorphic, is_isomorphic_labeled, EdgeId, Endpoint, GateKind, Graph,
    GraphBuilder, LeafKind, Port, Wire,
};
use crate::lambda::{encode, parse};
use crate::macros::{
    compose, dual_ext_beta_lhs, emergent_crossing, ext_beta_lhs, kink, lambda_crossing, relabel, splice_by_name, wires,
    CrossingKind,
};
use crate::moves::{apply_script, enumerate_matches, Direction, MoveError, MoveKind, Selector, Site, Step, TraceEntry};
use crate::par::par_map;

/// How the final graph is compared with the expected one.
#[derive(Clone, Copy, Debug)]
pub enum Compare {
    /// Isomorphism with unnumbered leaves.
    Iso,
    /// Isomorphism matching leaf names.
    Labeled,
    /// Labeled, or labeled after renaming the result's leaves by the pairs.
    Relabel(&'static [(&'static str, &'static str)]),
    /// The result must differ from the expected graph (labeled).
    Distinct,
}

type Check = fn(&Graph, &Graph) -> Result<Vec<String>, String>;

pub struct Scenario {
    pub name: &'static str,
    pub notes: &'static str,
    pub compare: Compare,
    build: fn() -> Graph,
    script: fn() -> Vec<Step>,
    expected: fn() -> Graph,
    /// Extra assertions on (initial, final); returns detail lines.
    check: Option<Check>,
}

impl Scenario {
    pub fn initial(&self) -> Graph {
        (self.build)()
    }

    pub fn script(&self) -> Vec<Step> {
        (self.script)()
    }

    pub fn expected(&self) -> Graph {
        (self.expected)()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diff {
    pub result_key: String,
    pub expected_key: String,
    pub result_dot: String,
    pub expected_dot: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    PassUpToRelabeling { mapping: Vec<(String, String)> },
    Fail { reason: String, diff: Option<Box<Diff>> },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::PassUpToRelabeling { mapping } => {
                let m: Vec<String> = mapping.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "pass-up-to-relabeling ({})", m.join(", "))
            }
            Verdict::Fail { reason, .. } => write!(f, "fail: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub verdict: Verdict,
    pub steps: Vec<String>,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn diff(result: &Graph, expected: &Graph, labeled: bool) -> Box<Diff> {
    let key = if labeled { canonical_key_labeled } else { canonical_key };
    Box::new(Diff {
        result_key: hex(&key(result)),
        expected_key: hex(&key(expected)),
        result_dot: to_dot(result),
        expected_dot: to_dot(expected),
    })
}

fn compare(how: Compare, result: &Graph, expected: &Graph) -> Verdict {
    let fail =
        |reason: &str, labeled| Verdict::Fail { reason: reason.into(), diff: Some(diff(result, expected, labeled)) };
    match how {
        Compare::Iso if is_isomorphic(result, expected) => Verdict::Pass,
        Compare::Iso => fail("not isomorphic to the expected graph", false),
        Compare::Labeled | Compare::Relabel(_) if is_isomorphic_labeled(result, expected) => Verdict::Pass,
        Compare::Relabel(map) if is_isomorphic_labeled(&relabel(result, map), expected) => {
            Verdict::PassUpToRelabeling { mapping: map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect() }
        }
        Compare::Labeled | Compare::Relabel(_) => fail("not isomorphic to the expected graph", true),
        Compare::Distinct if !is_isomorphic_labeled(result, expected) => Verdict::Pass,
        Compare::Distinct => fail("expected a different outcome", true),
    }
}

fn describe(t: &TraceEntry) -> String {
    format!("{} {} at {}", t.kind, t.direction, t.site)
}

pub fn run(s: &Scenario) -> ScenarioReport {
    let initial = s.initial();
    let mut report = ScenarioReport { name: s.name.into(), verdict: Verdict::Pass, steps: vec![], details: vec![] };
    let (result, trace) = match apply_script(&initial, &s.script()) {
        Ok(x) => x,
        Err(e) => {
            report.verdict = Verdict::Fail { reason: format!("script: {e}"), diff: None };
            return report;
        }
    };
    report.steps = trace.iter().map(describe).collect();
    report.verdict = compare(s.compare, &result, &s.expected());
    if let Some(check) = s.check {
        match check(&initial, &result) {
            Ok(lines) => report.details = lines,
            Err(reason) if report.verdict.passed() => report.verdict = Verdict::Fail { reason, diff: None },
            Err(reason) => report.details.push(reason),
        }
    }
    report
}

pub fn catalog() -> &'static [Scenario] {
    CATALOG
}

pub fn find(name: &str) -> Result<&'static Scenario, ScenarioError> {
    CATALOG.iter().find(|s| s.name == name).ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
}

pub fn run_scenario(name: &str) -> Result<ScenarioReport, ScenarioError> {
    find(name).map(run)
}

/// Every scenario, in catalog order.
pub fn run_all() -> Vec<ScenarioReport> {
    par_map(CATALOG, run)
}

// Helpers shared by builders and selectors.

fn a() -> Coefficient {
    Coefficient::generator("a")
}

fn term(s: &str) -> Graph {
    encode(&parse(s).expect("fixed term"))
}

fn edge_from_input(g: &Graph, name: &str) -> Option<EdgeId> {
    g.edge_at(Endpoint::Input(g.leaf_by_name(LeafKind::Input, name)?))
}

fn edge_to_output(g: &Graph, name: &str) -> Option<EdgeId> {
    g.edge_at(Endpoint::Output(g.leaf_by_name(LeafKind::Output, name)?))
}

fn pair_on(first: Option<EdgeId>, second: Option<EdgeId>) -> impl Fn(&Site) -> bool {
    move |s| match (s, first, second) {
        (Site::Pair { first: p, second: q }, Some(x), Some(y)) => p.wire == Wire::Edge(x) && q.wire == Wire::Edge(y),
        _ => false,
    }
}

fn unique(kind: MoveKind) -> Step {
    Step::forward(kind, Selector::Unique)
}

fn run_steps(g: &Graph, steps: Vec<Step>) -> Result<Graph, String> {
    apply_script(g, &steps).map(|(h, _)| h).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn eta_cycle() -> Graph {
    let mut b = GraphBuilder::new();
    let l = b.node(GateKind::Lambda);
    let ap = b.node(GateKind::App);
    b.link(ap, Port::Out, l, Port::In);
    b.link(l, Port::VarOut, ap, Port::ArgIn);
    b.link(l, Port::TermOut, ap, Port::FunIn);
    b.build().expect("fixed graph")
}

fn loops(n: usize) -> Graph {
    let mut b = GraphBuilder::new();
    b.add_loops(n);
    b.build().expect("loops are valid")
}

/// `x -> Υ1.in`, `Υ1.left_out -> ε.x_in`, `y -> ε.y_in`, `Υ1.right_out -> Υ2.in`,
/// `Υ2.left_out -> ε⁻¹.x_in`, `ε.out -> ε⁻¹.y_in`, `Υ2.right_out -> x'`,
/// `ε⁻¹.out -> y'`.
fn r2a_configuration() -> Graph {
    let mut b = GraphBuilder::new();
    let f1 = b.node(GateKind::FanOut);
    let d1 = b.node(GateKind::Dilation(a()));
    let f2 = b.node(GateKind::FanOut);
    let d2 = b.node(GateKind::Dilation(a().inverse()));
    let (x, y) = (b.input("x"), b.input("y"));
    let (x2, y2) = (b.output("x'"), b.output("y'"));
    b.edge(x, b.port(f1, Port::In));
    b.link(f1, Port::LeftOut, d1, Port::XIn);
    b.edge(y, b.port(d1, Port::YIn));
    b.link(f1, Port::RightOut, f2, Port::In);
    b.link(f2, Port::LeftOut, d2, Port::XIn);
    b.link(d1, Port::Out, d2, Port::YIn);
    b.edge(b.port(f2, Port::RightOut), x2);
    b.edge(b.port(d2, Port::Out), y2);
    b.build().expect("fixed graph")
}

/// λx.x x feeding a fan-out with outputs `p` and `q`.
fn shared_self_application() -> Graph {
    let mut b = GraphBuilder::new();
    let f = b.node(GateKind::FanOut);
    let s = b.input("s");
    b.edge(s, b.port(f, Port::In));
    let (p, q) = (b.output("p"), b.output("q"));
    b.edge(b.port(f, Port::LeftOut), p);
    b.edge(b.port(f, Port::RightOut), q);
    compose(&term("\\x.x x"), &b.build().expect("fixed graph"), &[("out", "s")]).expect("leaves exist")
}

fn labelling(first: &'static str, second: &'static str) -> Vec<Step> {
    vec![Step::reverse(
        MoveKind::Beta,
        Selector::matching(move |g, s| pair_on(edge_from_input(g, first), edge_from_input(g, second))(s)),
    )]
}

fn check_labelling(initial: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    let other = run_steps(initial, labelling("b", "a"))?;
    ensure(is_isomorphic(result, &other), "the two outcomes should agree with unnumbered leaves")?;
    Ok(vec!["outcomes differ as labeled graphs and agree with unnumbered leaves".into()])
}

fn check_eta(initial: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    ensure(enumerate_matches(initial, &MoveKind::Ext1, Direction::Forward).is_empty(), "ext1 should have no site")?;
    let e = initial.edges().find(|(_, e)| e.target.port() == Some(Port::In)).map(|(id, _)| id).unwrap();
    let path = match ext1(initial, &Site::Edge { edge: e }, Direction::Forward) {
        Err(MoveError::PathExists(p)) => p,
        other => return Err(format!("ext1 should report PathExists, got {other:?}")),
    };
    let (replaced, _) = ext1_unchecked(initial, e).map_err(|e| e.to_string())?;
    ensure(replaced.node_count() == 0 && replaced.edge_count() == 0, "replacement should leave no nodes or edges")?;
    ensure(replaced.loop_count() == 1, "replacement by an edge should leave one loop")?;
    ensure(result.node_count() == 0 && result.edge_count() == 0, "beta should leave no nodes or edges")?;
    Ok(vec![
        format!("ext1 rejected: PathExists {path:?}"),
        format!("replacement by an edge: {} loop", replaced.loop_count()),
        format!("beta: {} loops", result.loop_count()),
    ])
}

fn check_ext_beta_pair(initial: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    let star_first = run_steps(initial, vec![unique(MoveKind::BetaStar(a()))])?;
    ensure(
        is_isomorphic_labeled(&star_first, &lambda_crossing(CrossingKind::Over)),
        "beta-star should give the lambda crossing",
    )?;
    let beta_first = run_steps(initial, vec![unique(MoveKind::Beta)])?;
    ensure(
        is_isomorphic_labeled(&beta_first, &emergent_crossing(&a(), CrossingKind::Over)),
        "beta should give the emergent crossing",
    )?;
    let other = run_steps(&beta_first, vec![unique(MoveKind::BetaStar(a()))])?;
    ensure(is_isomorphic_labeled(&other, result), "the two orders should meet")?;
    Ok(vec![
        "beta-star first passes through the lambda crossing".into(),
        "beta first passes through the emergent crossing".into(),
        "both orders end in the arrows 1 -> 3, 2 -> 4".into(),
    ])
}

fn check_r1a(_: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    ensure(is_isomorphic_labeled(result, &wires(&[("1", "3")])), "should end in a wire")?;
    Ok(vec!["beta-star leaves the wire and one loop; no co-commutativity step is needed".into()])
}

fn check_r2a(initial: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    let before = decorate_by_name(initial).map_err(|e| e.to_string())?;
    let after = decorate_by_name(result).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (name, t) in &before {
        let u = after.get(name).ok_or_else(|| format!("output {name} disappeared"))?;
        ensure(ea_equal(t, u), &format!("decoration of {name} changed: {t} vs {u}"))?;
        lines.push(format!("{name}: {t} = {u}"));
    }
    Ok(lines)
}

fn mystery_script(second: fn(&Graph) -> Option<EdgeId>) -> Vec<Step> {
    vec![
        unique(MoveKind::Beta),
        Step::reverse(MoveKind::Beta, Selector::matching(move |g, s| pair_on(edge_from_input(g, "1"), second(g))(s))),
        unique(MoveKind::ExtBeta(a())),
    ]
}

fn feedback_edge(g: &Graph) -> Option<EdgeId> {
    g.edges()
        .find(|(_, e)| match (e.source, e.target) {
            (Endpoint::Port(s, Port::Out), Endpoint::Port(t, Port::YIn)) => s == t,
            _ => false,
        })
        .map(|(id, _)| id)
}

fn check_mystery(initial: &Graph, result: &Graph) -> Result<Vec<String>, String> {
    let reduced = run_steps(initial, vec![unique(MoveKind::Beta)])?;
    ensure(
        is_isomorphic_labeled(&reduced, &emergent_crossing(&a(), CrossingKind::Over)),
        "beta should reduce the dual pattern to the emergent crossing",
    )?;
    let script = mystery_script(|g| edge_from_input(g, "2"));
    let lifted = run_steps(&reduced, script[1..2].to_vec())?;
    ensure(is_isomorphic_labeled(&lifted, &ext_beta_lhs(&a())), "reverse beta should rebuild the extended pattern")?;
    ensure(result.loop_count() == 0, "no loop is expected")?;

    let mut closed = dual_ext_beta_lhs(&a());
    splice_by_name(&mut closed, "3", "2").map_err(|e| e.to_string())?;
    let gadget = run_steps(&closed, vec![unique(MoveKind::Beta)])?;
    ensure(feedback_edge(&gadget).is_some(), "closing 3 into 2 should give a self-fed dilation")?;
    let end = run_steps(&closed, mystery_script(feedback_edge))?;
    ensure(is_isomorphic_labeled(&end, &wires(&[("1", "4")])), "the closed chain should end in the wire 1 -> 4")?;
    Ok(vec![
        "beta turns the dual pattern into the emergent crossing".into(),
        "reverse beta and the extended beta move erase the crossing: 1 -> 3, 2 -> 4".into(),
        format!("loops left for elimination: {}", result.loop_count()),
        "with 3 fed back into 2 the crossing is a dilation fed by its own output; the same chain gives 1 -> 4".into(),
    ])
}

static CATALOG: &[Scenario] = &[
    Scenario {
        name: "beta_on_identity_application",
        notes: "(λx.x) y reduces to y by one beta move.",
        compare: Compare::Labeled,
        build: || term("(\\x.x) y"),
        script: || vec![unique(MoveKind::Beta)],
        expected: || term("y"),
        check: None,
    },
    Scenario {
        name: "beta_single_arrow",
        notes: "Reverse beta on a single arrow, then forward beta, gives the arrow back.",
        compare: Compare::Labeled,
        build: || wires(&[("1", "3")]),
        script: || vec![Step::reverse(MoveKind::Beta, Selector::first()), unique(MoveKind::Beta)],
        expected: || wires(&[("1", "3")]),
        check: None,
    },
    Scenario {
        name: "beta_loop",
        notes: "Reverse beta on a loop, then forward beta, gives the loop back.",
        compare: Compare::Labeled,
        build: || loops(1),
        script: || vec![Step::reverse(MoveKind::Beta, Selector::Unique), unique(MoveKind::Beta)],
        expected: || loops(1),
        check: None,
    },
    Scenario {
        name: "labelling_dependence",
        notes: "Reverse beta on two arrows: the two orders of the arrows give different labeled outcomes.",
        compare: Compare::Distinct,
        build: || wires(&[("a", "a'"), ("b", "b'")]),
        script: || labelling("a", "b"),
        expected: || {
            let g = wires(&[("a", "a'"), ("b", "b'")]);
            run_steps(&g, labelling("b", "a")).expect("site exists")
        },
        check: Some(check_labelling),
    },
    Scenario {
        name: "gfo_implies_cocomm",
        notes: "Global fan-out of λx.x x, then the reverse move with the copies taken in the other order, \
                permutes the fan-out outputs.",
        compare: Compare::Labeled,
        build: shared_self_application,
        script: || {
            vec![
                unique(MoveKind::GlobalFanOut),
                Step::reverse(
                    MoveKind::GlobalFanOut,
                    Selector::matching(
                        |g, s| matches!(s, Site::EdgePair { first, .. } if Some(*first) == edge_to_output(g, "q")),
                    ),
                ),
            ]
        },
        expected: || {
            let g = shared_self_application();
            let e = edge_to_output(&g, "p").unwrap();
            let f = g.edge(e).unwrap().source.node().unwrap();
            run_steps(&g, vec![Step::forward(MoveKind::CoComm, Selector::Exact(Site::Node { node: f }))]).unwrap()
        },
        check: None,
    },
    Scenario {
        name: "eta_counterexample",
        notes: "The ext1 pattern closed by an arrow from 2 to 1: ext1 is refused, replacement by an edge would \
                leave one loop, and beta leaves two.",
        compare: Compare::Labeled,
        build: eta_cycle,
        script: || vec![unique(MoveKind::Beta)],
        expected: || loops(2),
        check: Some(check_eta),
    },
    Scenario {
        name: "ext_beta_eps1_is_beta",
        notes: "With coefficient 1, ext2 and pruning turn the extended pattern into the beta pattern; outputs 3 \
                and 4 come out exchanged.",
        compare: Compare::Relabel(&[("3", "4"), ("4", "3")]),
        build: || ext_beta_lhs(&Coefficient::one()),
        script: || vec![unique(MoveKind::Ext2), unique(MoveKind::PruneFanOutOne)],
        expected: || lambda_crossing(CrossingKind::Over),
        check: None,
    },
    Scenario {
        name: "ext_beta_equiv_pair",
        notes: "Beta-star then beta on the extended pattern equals the extended beta move; beta first meets it too.",
        compare: Compare::Labeled,
        build: || ext_beta_lhs(&a()),
        script: || vec![unique(MoveKind::BetaStar(a())), unique(MoveKind::Beta)],
        expected: || run_steps(&ext_beta_lhs(&a()), vec![unique(MoveKind::ExtBeta(a()))]).expect("site exists"),
        check: Some(check_ext_beta_pair),
    },
    Scenario {
        name: "beta_star_implies_R1a",
        notes: "Beta-star on the kink leaves a wire and a loop; erasing the loop is R1a.",
        compare: Compare::Labeled,
        build: || kink(&a()),
        script: || vec![unique(MoveKind::BetaStar(a())), unique(MoveKind::LoopRemove)],
        expected: || run_steps(&kink(&a()), vec![unique(MoveKind::R1a(a()))]).expect("site exists"),
        check: Some(check_r1a),
    },
    Scenario {
        name: "beta_star_implies_R2a",
        notes: "Two beta-star moves (ε, then ε⁻¹) undo x ∘ε⁻¹ (x ∘ε y) = y, leaving parallel wires.",
        compare: Compare::Labeled,
        build: r2a_configuration,
        script: || vec![unique(MoveKind::BetaStar(a())), unique(MoveKind::BetaStar(a().inverse()))],
        expected: || wires(&[("x", "x'"), ("y", "y'")]),
        check: Some(check_r2a),
    },
    Scenario {
        name: "mystery_move_chain",
        notes: "The dual of the extended pattern reduces by beta to the emergent crossing; reverse beta and the \
                extended beta move then replace the crossing by two arrows, with no loop left to eliminate.",
        compare: Compare::Labeled,
        build: || dual_ext_beta_lhs(&a()),
        script: || mystery_script(|g| edge_from_input(g, "2")),
        expected: || wires(&[("1", "3"), ("2", "4")]),
        check: Some(check_mystery),
    },
    Scenario {
        name: "reidemeister2_lambda",
        notes: "An over crossing followed by an under crossing reduces by two beta moves to parallel wires.",
        compare: Compare::Labeled,
        build: || {
            compose(
                &lambda_crossing(CrossingKind::Over),
                &lambda_crossing(CrossingKind::Under),
                &[("3", "1"), ("4", "2")],
            )
            .expect("leaves exist")
        },
        script: || vec![Step::forward(MoveKind::Beta, Selector::first()), unique(MoveKind::Beta)],
        expected: || wires(&[("1", "3"), ("2", "4")]),
        check: None,
    },
];
