//! Untyped lambda terms and their graphs.

mod decode;
mod encode;
mod reduce;
mod strategy;
mod term;

pub use decode::{decode, sector_of, DecodeError, SectorReport};
pub use encode::encode;
pub use reduce::{step, steps_to_normal, term_normalize, Strategy, Timeout};
pub use strategy::{
    duplicate_shared, graph_normalize, leftmost_beta, normalize_counting, owned_value, prune_dead, resolve_sharing,
    settle, shared_fanouts, NormalizeError, MAX_NODES,
};
pub use term::{parse, SyntaxError, Term};
