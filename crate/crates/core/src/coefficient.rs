//! Elements of the free abelian group that decorates dilation gates.
//!
//! Written multiplicatively: `1` is the identity, `a^1*b^-2` is `a · b⁻²`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Div, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A normalized word in the free abelian group on string generators.
///
/// `shadow` is an optional positive rational `(numerator, denominator)` used
/// only for display; it takes no part in equality, hashing or arithmetic.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Coefficient {
    exponents: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shadow: Option<(u64, u64)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoefficientError {
    #[error("empty coefficient factor in `{0}`")]
    EmptyFactor(String),
    #[error("invalid generator symbol `{0}`")]
    BadSymbol(String),
    #[error("invalid exponent `{0}`")]
    BadExponent(String),
}

impl Coefficient {
    pub fn one() -> Self {
        Self::default()
    }

    /// The generator `sym` to the first power.
    pub fn generator(sym: &str) -> Self {
        Self::from_factors([(sym, 1)])
    }

    pub fn from_factors<'a, I>(factors: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, i64)>,
    {
        let mut exponents = BTreeMap::new();
        for (sym, exp) in factors {
            *exponents.entry(sym.to_string()).or_insert(0) += exp;
        }
        exponents.retain(|_, e| *e != 0);
        Self { exponents, shadow: None }
    }

    pub fn with_shadow(mut self, numerator: u64, denominator: u64) -> Self {
        if numerator > 0 && denominator > 0 {
            self.shadow = Some((numerator, denominator));
        }
        self
    }

    pub fn shadow(&self) -> Option<(u64, u64)> {
        self.shadow
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            exponents: self.exponents.iter().map(|(s, e)| (s.clone(), -e)).collect(),
            shadow: self.shadow.map(|(n, d)| (d, n)),
        }
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&str, i64)> {
        self.exponents.iter().map(|(s, e)| (s.as_str(), *e))
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        self.exponents == other.exponents
    }
}

impl Eq for Coefficient {}

impl Hash for Coefficient {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exponents.hash(state);
    }
}

impl PartialOrd for Coefficient {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coefficient {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exponents.cmp(&other.exponents)
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;

    // exponents add under multiplication
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut exponents = self.exponents.clone();
        for (sym, exp) in &rhs.exponents {
            *exponents.entry(sym.clone()).or_insert(0) += exp;
        }
        exponents.retain(|_, e| *e != 0);
        let shadow = match (self.shadow, rhs.shadow) {
            (Some((a, b)), Some((c, d))) => a.checked_mul(c).zip(b.checked_mul(d)).map(|(n, d)| reduce_ratio(n, d)),
            _ => None,
        };
        Coefficient { exponents, shadow }
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;

    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

impl Div for &Coefficient {
    type Output = Coefficient;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Coefficient) -> Coefficient {
        self * &rhs.inverse()
    }
}

fn reduce_ratio(n: u64, d: u64) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(n, d).max(1);
    (n / g, d / g)
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        for (i, (sym, exp)) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{sym}^{exp}")?;
        }
        Ok(())
    }
}

fn valid_symbol(sym: &str) -> bool {
    let mut chars = sym.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Coefficient {
    type Err = CoefficientError;

    /// Accepts `1`, or `*`-separated factors `sym` / `sym^int`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let mut factors = Vec::new();
        for factor in s.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(CoefficientError::EmptyFactor(s.to_string()));
            }
            let (sym, exp) = match factor.split_once('^') {
                Some((sym, exp)) => {
                    (sym.trim(), exp.trim().parse::<i64>().map_err(|_| CoefficientError::BadExponent(exp.to_string()))?)
                }
                None => (factor, 1),
            };
            if !valid_symbol(sym) {
                return Err(CoefficientError::BadSymbol(sym.to_string()));
            }
            factors.push((sym, exp));
        }
        Ok(Self::from_factors(factors))
    }
}
