//! JSON form of a graph.
//!
//! ```json
//! {
//!   "nodes":  [{"id": "n0", "kind": "lambda"}, {"id": "n1", "kind": "dilation", "coef": "a^1"}],
//!   "leaves": [{"id": "f0", "kind": "input", "name": "x"}],
//!   "edges":  [{"id": "e0", "source": {"node": "n0", "port": "term_out"}, "target": {"leaf": "f0"}}],
//!   "loops":  ["l0"]
//! }
//! ```
//!
//! `kind` is one of `lambda`, `app`, `fanout`, `dilation`, `term`; `coef`
//! appears on dilations only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BuildError, Edge, EdgeId, Endpoint, GateKind, Graph, Leaf, LeafId, LeafKind, LoopId, NodeId, Port};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<NodeJson>,
    pub leaves: Vec<LeafJson>,
    pub edges: Vec<EdgeJson>,
    pub loops: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafJson {
    pub id: String,
    pub kind: LeafKind,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    pub source: EndJson,
    pub target: EndJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndJson {
    Port { node: String, port: Port },
    Leaf { leaf: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("bad id `{0}`")]
    BadId(String),
    #[error("bad gate `{0}`")]
    BadKind(String),
    #[error("leaf `{0}` is undeclared")]
    UnknownLeaf(String),
    #[error("invalid graph: {0}")]
    Validation(#[from] BuildError),
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        let end = |at: Endpoint| match at {
            Endpoint::Port(n, p) => EndJson::Port { node: n.to_string(), port: p },
            Endpoint::Input(l) | Endpoint::Output(l) => EndJson::Leaf { leaf: l.to_string() },
        };
        GraphJson {
            nodes: g
                .nodes()
                .map(|(n, k)| NodeJson {
                    id: n.to_string(),
                    kind: k.tag().to_string(),
                    coef: k.coefficient().map(|c| c.to_string()),
                })
                .collect(),
            leaves: g
                .leaves()
                .map(|(l, leaf)| LeafJson { id: l.to_string(), kind: leaf.kind, name: leaf.name.clone() })
                .collect(),
            edges: g
                .edges()
                .map(|(id, e)| EdgeJson { id: id.to_string(), source: end(e.source), target: end(e.target) })
                .collect(),
            loops: g.loops().map(|l| l.to_string()).collect(),
        }
    }
}

fn id<T: std::str::FromStr>(s: &str) -> Result<T, JsonError> {
    s.parse().map_err(|_| JsonError::BadId(s.to_string()))
}

impl TryFrom<&GraphJson> for Graph {
    type Error = JsonError;

    fn try_from(j: &GraphJson) -> Result<Graph, JsonError> {
        let mut nodes = Vec::new();
        for n in &j.nodes {
            let kind = match (n.kind.as_str(), &n.coef) {
                ("lambda", None) => GateKind::Lambda,
                ("app", None) => GateKind::App,
                ("fanout", None) => GateKind::FanOut,
                ("term", None) => GateKind::Termination,
                ("dilation", Some(c)) => GateKind::Dilation(c.parse().map_err(|_| JsonError::BadKind(c.clone()))?),
                _ => return Err(JsonError::BadKind(n.kind.clone())),
            };
            nodes.push((id::<NodeId>(&n.id)?, kind));
        }
        let mut leaves = Vec::new();
        for l in &j.leaves {
            leaves.push((id::<LeafId>(&l.id)?, Leaf { kind: l.kind, name: l.name.clone() }));
        }
        let end = |e: &EndJson| -> Result<Endpoint, JsonError> {
            match e {
                EndJson::Port { node, port } => Ok(Endpoint::Port(id(node)?, *port)),
                EndJson::Leaf { leaf } => {
                    let l: LeafId = id(leaf)?;
                    match leaves.iter().find(|(x, _)| *x == l) {
                        Some((_, Leaf { kind: LeafKind::Input, .. })) => Ok(Endpoint::Input(l)),
                        Some(_) => Ok(Endpoint::Output(l)),
                        None => Err(JsonError::UnknownLeaf(leaf.clone())),
                    }
                }
            }
        };
        let mut edges = Vec::new();
        for e in &j.edges {
            edges.push((id::<EdgeId>(&e.id)?, Edge { source: end(&e.source)?, target: end(&e.target)? }));
        }
        let loops = j.loops.iter().map(|l| id::<LoopId>(l)).collect::<Result<Vec<_>, _>>()?;
        let g = Graph::from_parts(nodes, edges, leaves, loops);
        match g.validate().into_iter().next() {
            Some(v) => Err(JsonError::Validation(v.into())),
            None => Ok(g),
        }
    }
}

pub fn to_json(g: &Graph) -> serde_json::Value {
    serde_json::to_value(GraphJson::from(g)).expect("graph json is serializable")
}

pub fn from_json(v: &serde_json::Value) -> Result<Graph, JsonError> {
    let j: GraphJson = serde_json::from_value(v.clone()).map_err(|e| JsonError::BadKind(e.to_string()))?;
    Graph::try_from(&j)
}
