pub mod coefficient;
pub mod emergent;
pub mod format;
pub mod generate;
pub mod global;
pub mod graph;
pub mod lambda;
pub mod macros;
pub mod moves;
pub mod par;
pub mod rewrite;
pub mod scenarios;
