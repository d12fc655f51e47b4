//! Text formats: `.glc`, Graphviz DOT and JSON.

pub mod dot;
pub mod glc;
pub mod json;

pub use dot::to_dot;
pub use glc::{parse_glc, print_glc, GlcError};
pub use json::{from_json, to_json, GraphJson, JsonError};
