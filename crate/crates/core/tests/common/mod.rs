#![allow(dead_code)]

use glc_core::coefficient::Coefficient;
use glc_core::format::print_glc;
use glc_core::graph::{is_isomorphic_labeled, Graph};
use glc_core::moves::{applied, Direction, MoveKind, Site};

pub fn coef(s: &str) -> Coefficient {
    s.parse().expect("coefficient literal")
}

/// The bidirectional moves, parameterized over `a` and `b`.
pub fn bidirectional_moves() -> Vec<MoveKind> {
    let (a, b) = (coef("a"), coef("b"));
    let all = vec![
        MoveKind::Beta,
        MoveKind::ExtBeta(a.clone()),
        MoveKind::BetaStar(a.clone()),
        MoveKind::CoComm,
        MoveKind::CoAssoc,
        MoveKind::LocalFanOut(6),
        MoveKind::LoopAdd,
        MoveKind::LoopRemove,
        MoveKind::R1a(a.clone()),
        MoveKind::R1b(b.clone()),
        MoveKind::R2(a, b),
        MoveKind::Ext2,
        MoveKind::GlobalFanOut,
        MoveKind::Ext1,
    ];
    assert!(all.iter().all(MoveKind::is_bidirectional));
    all
}

/// Applies `(m, dir)` at `site`, then checks that the patch restores `g`
/// exactly and that the opposite direction at the reported inverse site
/// restores it up to labeled isomorphism.
pub fn round_trip(g: &Graph, m: &MoveKind, site: &Site, dir: Direction) -> Result<(), String> {
    let (h, out) = applied(g, m, site, dir).map_err(|e| format!("{m} {dir} at {site}: {e}"))?;
    let mut back = h.clone();
    out.patch.revert(&mut back);
    if print_glc(&back) != print_glc(g) || !back.is_valid() {
        return Err(format!("{m} {dir} at {site}: patch revert differs\n{}", print_glc(g)));
    }
    let inv = out.inverse.ok_or_else(|| format!("{m} {dir} at {site}: no inverse site"))?;
    let (undone, _) =
        applied(&h, m, &inv, dir.flip()).map_err(|e| format!("{m} {dir} at {site}: inverse at {inv}: {e}"))?;
    if !is_isomorphic_labeled(&undone, g) {
        return Err(format!("{m} {dir} at {site}: inverse at {inv} is not isomorphic\n{}", print_glc(g)));
    }
    Ok(())
}
