//! The free emergent algebra and decorations of emergent-sector graphs.

mod decorate;
mod soundness;
mod term;

pub use decorate::{decorate, decorate_by_name, DecorateError};
pub use soundness::{
    check_move_soundness, check_move_soundness_with, checkable_moves, coefficient_set, family, seed, Counterexample,
    Family, SoundnessReport,
};
pub use term::{ea_compare, ea_equal, ea_normalize, EaTerm, EaVerdict};
