//! Command line and HTTP session service over `glc-core`.

pub mod describe;
pub mod error;
pub mod service;

use glc_core::format::parse_glc;
use glc_core::graph::{canonical_key, Graph};
use glc_core::lambda::{encode, parse};
use glc_core::moves::{Direction, MoveKind, Site};

pub use error::Error;

/// Reads a graph from `.glc` text, or encodes a lambda term when the text
/// does not look like a `.glc` document.
pub fn load_graph(text: &str) -> Result<Graph, Error> {
    if looks_like_glc(text) {
        Ok(parse_glc(text)?)
    } else {
        Ok(encode(&parse(text.trim())?))
    }
}

/// The first statement starts with a `.glc` keyword and has an argument.
fn looks_like_glc(text: &str) -> bool {
    const HEADS: [&str; 7] = ["glc", "node", "edge", "in", "out", "wire", "loop"];
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    let Some(line) = first else { return true };
    let mut words = line.split_whitespace();
    words.next().is_some_and(|w| HEADS.contains(&w)) && words.next().is_some()
}

pub fn parse_move(s: &str) -> Result<MoveKind, Error> {
    s.parse().map_err(|_| Error::UnknownMove(s.to_string()))
}

pub fn parse_direction(s: &str) -> Result<Direction, Error> {
    match s {
        "forward" => Ok(Direction::Forward),
        "reverse" => Ok(Direction::Reverse),
        _ => Err(Error::UnknownDirection(s.to_string())),
    }
}

pub fn parse_site(s: &str) -> Result<Site, Error> {
    s.parse().map_err(|_| Error::BadSite(s.to_string()))
}

/// Hex of the canonical key.
pub fn key_hex(g: &Graph) -> String {
    canonical_key(g).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_either_form() {
        let a = load_graph("\\x.x").unwrap();
        let b = load_graph("glc 1\nnode n0 lambda\nedge n0.var_out -> n0.in\nout n0.term_out -> r\n").unwrap();
        assert!(glc_core::graph::is_isomorphic(&a, &b));
        assert!(load_graph("in x -> y").is_err());
        assert!(matches!(load_graph("(\\x."), Err(Error::Term(_))));
        assert_eq!(load_graph("loop 2").unwrap().loop_count(), 2);
        assert_eq!(load_graph("x").unwrap().edge_count(), 1);
    }
}
