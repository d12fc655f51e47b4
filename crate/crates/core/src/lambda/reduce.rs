use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::term::Db;
use super::Term;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Leftmost-outermost.
    #[default]
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("no normal form within {fuel} steps")]
pub struct Timeout {
    pub fuel: usize,
}

/// Reduces to normal form with at most `fuel` beta steps.
pub fn term_normalize(t: &Term, strategy: Strategy, fuel: usize) -> Result<Term, Timeout> {
    let Strategy::Normal = strategy;
    let mut d = Db::from_term(t);
    for _ in 0..fuel {
        match d.step() {
            Some(next) => d = next,
            None => return Ok(d.to_term()),
        }
    }
    match d.step() {
        None => Ok(d.to_term()),
        Some(_) => Err(Timeout { fuel }),
    }
}

/// Number of normal-order steps to normal form, if within `fuel`.
pub fn steps_to_normal(t: &Term, fuel: usize) -> Option<usize> {
    let mut d = Db::from_term(t);
    for k in 0..=fuel {
        match d.step() {
            Some(next) => d = next,
            None => return Some(k),
        }
    }
    None
}

/// One normal-order step, if the term is not normal.
pub fn step(t: &Term) -> Option<Term> {
    Db::from_term(t).step().map(|d| d.to_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse;

    fn nf(s: &str, fuel: usize) -> Result<Term, Timeout> {
        term_normalize(&parse(s).unwrap(), Strategy::Normal, fuel)
    }

    #[test]
    fn small_reductions() {
        assert_eq!(nf("(\\x.x) y", 10).unwrap(), parse("y").unwrap());
        assert_eq!(nf("(\\x.\\y.x) a b", 10).unwrap(), parse("a").unwrap());
        assert_eq!(nf("(\\x.\\y.x) a b", 2).unwrap(), parse("a").unwrap());
        assert!(nf("(\\x.\\y.x) a b", 1).is_err());
    }

    #[test]
    fn omega_times_out() {
        assert_eq!(nf("(\\x.x x) (\\x.x x)", 50), Err(Timeout { fuel: 50 }));
    }

    #[test]
    fn normal_order_skips_divergent_argument() {
        assert_eq!(nf("(\\x.z) ((\\x.x x) (\\x.x x))", 5).unwrap(), parse("z").unwrap());
    }

    #[test]
    fn substitution_avoids_capture() {
        let r = nf("(\\x.\\y.x) y", 5).unwrap();
        assert!(r.alpha_eq(&parse("\\z.y").unwrap()));
    }

    #[test]
    fn church_arithmetic() {
        let plus = "(\\m n f x.m f (n f x))";
        let two = "(\\f x.f (f x))";
        let r = nf(&format!("{plus} {two} {two}"), 100).unwrap();
        assert!(r.alpha_eq(&parse("\\f x.f (f (f (f x)))").unwrap()));
        assert_eq!(steps_to_normal(&parse("(\\x.x) y").unwrap(), 5), Some(1));
    }
}
