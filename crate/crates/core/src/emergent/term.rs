use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::coefficient::Coefficient;

/// A term of the free emergent algebra. `Dil(ε, x, y)` is `x ∘ε y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EaTerm {
    Gen(String),
    Dil(Coefficient, Box<EaTerm>, Box<EaTerm>),
}

impl EaTerm {
    pub fn gen(name: &str) -> Self {
        EaTerm::Gen(name.to_string())
    }

    pub fn dil(c: &Coefficient, x: EaTerm, y: EaTerm) -> Self {
        EaTerm::Dil(c.clone(), Box::new(x), Box::new(y))
    }

    pub fn size(&self) -> usize {
        match self {
            EaTerm::Gen(_) => 1,
            EaTerm::Dil(_, x, y) => 1 + x.size() + y.size(),
        }
    }

    fn generators(&self, out: &mut BTreeSet<String>) {
        match self {
            EaTerm::Gen(a) => {
                out.insert(a.clone());
            }
            EaTerm::Dil(_, x, y) => {
                x.generators(out);
                y.generators(out);
            }
        }
    }

    fn coefficients(&self, out: &mut Vec<Coefficient>) {
        if let EaTerm::Dil(c, x, y) = self {
            if !c.is_one() && !out.contains(c) {
                out.push(c.clone());
            }
            x.coefficients(out);
            y.coefficients(out);
        }
    }
}

impl fmt::Display for EaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EaTerm::Gen(a) => f.write_str(a),
            EaTerm::Dil(c, x, y) => write!(f, "({x} ∘[{c}] {y})"),
        }
    }
}

/// `x ∘ε y` with the three rules applied at the root, assuming `x` and `y`
/// are normal.
fn root(c: Coefficient, x: EaTerm, y: EaTerm) -> EaTerm {
    if c.is_one() {
        return y;
    }
    if x == y {
        return x;
    }
    if let EaTerm::Dil(mu, x2, y2) = &y {
        if **x2 == x {
            return root(&c * mu, x, (**y2).clone());
        }
    }
    EaTerm::Dil(c, Box::new(x), Box::new(y))
}

/// Innermost normal form under `x ∘1 y = y`, `x ∘ε (x ∘μ y) = x ∘εμ y` and
/// `x ∘ε x = x`.
pub fn ea_normalize(t: &EaTerm) -> EaTerm {
    match t {
        EaTerm::Gen(_) => t.clone(),
        EaTerm::Dil(c, x, y) => root(c.clone(), ea_normalize(x), ea_normalize(y)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EaVerdict {
    Equal,
    NotEqual,
    Undecided,
}

/// States explored on each side by the bounded search.
const SEARCH_STATES: usize = 400;

/// Equal normal forms decide equality. Otherwise the terms are evaluated in
/// the affine model `x ∘ε y = x + ε(y - x)` over a prime field, which
/// satisfies the three rules: different values prove the terms different.
/// If the model cannot separate them, a bounded search applies the rules in
/// both directions (terms up to twice the larger size) looking for a common
/// term; failing that the answer is undecided.
pub fn ea_compare(a: &EaTerm, b: &EaTerm) -> EaVerdict {
    let (na, nb) = (ea_normalize(a), ea_normalize(b));
    if na == nb {
        return EaVerdict::Equal;
    }
    if (0..2).any(|seed| Model::new(seed).eval(&na) != Model::new(seed).eval(&nb)) {
        return EaVerdict::NotEqual;
    }
    if bounded_search(&na, &nb) {
        EaVerdict::Equal
    } else {
        EaVerdict::Undecided
    }
}

/// True only when equality is established.
pub fn ea_equal(a: &EaTerm, b: &EaTerm) -> bool {
    ea_compare(a, b) == EaVerdict::Equal
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

struct Model {
    seed: u64,
}

impl Model {
    fn new(seed: u64) -> Self {
        Model { seed }
    }

    fn hash(&self, tag: &str, s: &str) -> u64 {
        let mut h = DefaultHasher::new();
        (self.seed, tag, s).hash(&mut h);
        h.finish() % (P - 2) + 2
    }

    fn coef(&self, c: &Coefficient) -> u64 {
        c.exponents().fold(1, |acc, (s, e)| {
            let g = self.hash("coef", s);
            let g = if e < 0 { powmod(g, P - 2) } else { g };
            mulmod(acc, powmod(g, e.unsigned_abs()))
        })
    }

    fn eval(&self, t: &EaTerm) -> u64 {
        match t {
            EaTerm::Gen(a) => self.hash("gen", a),
            EaTerm::Dil(c, x, y) => {
                let (x, y) = (self.eval(x), self.eval(y));
                (x + mulmod(self.coef(c), (y + P - x) % P)) % P
            }
        }
    }
}

/// Every subterm position, as a path of 0 (left) / 1 (right) steps.
fn positions(t: &EaTerm, path: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, EaTerm)>) {
    out.push((path.clone(), t.clone()));
    if let EaTerm::Dil(_, x, y) = t {
        path.push(0);
        positions(x, path, out);
        path.pop();
        path.push(1);
        positions(y, path, out);
        path.pop();
    }
}

fn replace(t: &EaTerm, path: &[u8], with: &EaTerm) -> EaTerm {
    match (path.split_first(), t) {
        (None, _) => with.clone(),
        (Some((0, rest)), EaTerm::Dil(c, x, y)) => EaTerm::Dil(c.clone(), Box::new(replace(x, rest, with)), y.clone()),
        (Some((_, rest)), EaTerm::Dil(c, x, y)) => EaTerm::Dil(c.clone(), x.clone(), Box::new(replace(y, rest, with))),
        (Some(_), EaTerm::Gen(_)) => t.clone(),
    }
}

/// Single rule applications in either direction at one subterm.
fn rewrites(s: &EaTerm, gens: &[EaTerm], coefs: &[Coefficient]) -> Vec<EaTerm> {
    let mut out = Vec::new();
    if let EaTerm::Dil(c, x, y) = s {
        if c.is_one() {
            out.push((**y).clone());
        }
        if x == y {
            out.push((**x).clone());
        }
        if let EaTerm::Dil(mu, x2, y2) = &**y {
            if x2 == x {
                out.push(EaTerm::Dil(c * mu, x.clone(), y2.clone()));
            }
        }
        for k in coefs {
            let rest = &k.inverse() * c;
            out.push(EaTerm::Dil(k.clone(), x.clone(), Box::new(EaTerm::Dil(rest, x.clone(), y.clone()))));
        }
    }
    for z in gens {
        out.push(EaTerm::Dil(Coefficient::one(), Box::new(z.clone()), Box::new(s.clone())));
    }
    for k in coefs {
        out.push(EaTerm::Dil(k.clone(), Box::new(s.clone()), Box::new(s.clone())));
    }
    out
}

fn bounded_search(a: &EaTerm, b: &EaTerm) -> bool {
    let bound = 2 * a.size().max(b.size());
    let mut gens = BTreeSet::new();
    let mut coefs = Vec::new();
    for t in [a, b] {
        t.generators(&mut gens);
        t.coefficients(&mut coefs);
    }
    let gens: Vec<EaTerm> = gens.into_iter().map(EaTerm::Gen).collect();
    let explore = |start: &EaTerm| -> HashSet<EaTerm> {
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(t) = queue.pop_front() {
            let mut pos = Vec::new();
            positions(&t, &mut Vec::new(), &mut pos);
            for (path, sub) in pos {
                for r in rewrites(&sub, &gens, &coefs) {
                    let next = replace(&t, &path, &r);
                    if next.size() <= bound && seen.len() < SEARCH_STATES && seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        seen
    };
    let from_a = explore(a);
    explore(b).iter().any(|t| from_a.contains(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Coefficient {
        s.parse().unwrap()
    }

    fn g(s: &str) -> EaTerm {
        EaTerm::gen(s)
    }

    #[test]
    fn the_three_rules() {
        assert_eq!(ea_normalize(&EaTerm::dil(&c("1"), g("a"), g("b"))), g("b"));
        let nested = EaTerm::dil(&c("e"), g("a"), EaTerm::dil(&c("m"), g("a"), g("b")));
        assert_eq!(ea_normalize(&nested), EaTerm::dil(&c("e^1*m^1"), g("a"), g("b")));
        assert_eq!(ea_normalize(&EaTerm::dil(&c("e"), g("a"), g("a"))), g("a"));
    }

    #[test]
    fn inverse_cancels() {
        let t = EaTerm::dil(&c("e"), g("a"), EaTerm::dil(&c("e^-1"), g("a"), g("b")));
        assert!(ea_equal(&t, &g("b")));
    }

    #[test]
    fn distinct_generators_differ() {
        assert_eq!(ea_compare(&g("a"), &g("b")), EaVerdict::NotEqual);
        let t = EaTerm::dil(&c("e"), g("a"), g("b"));
        assert_eq!(ea_compare(&t, &g("b")), EaVerdict::NotEqual);
        assert!(ea_equal(&t, &ea_normalize(&t)));
    }

    #[test]
    fn normalizing_is_idempotent() {
        let t = EaTerm::dil(
            &c("a"),
            EaTerm::dil(&c("b"), g("x"), g("x")),
            EaTerm::dil(&c("a^-1"), g("x"), EaTerm::dil(&c("1"), g("y"), g("z"))),
        );
        let n = ea_normalize(&t);
        assert_eq!(ea_normalize(&n), n);
        assert!(n.size() <= t.size());
        assert_eq!(n, g("z"));
    }

    #[test]
    fn search_finds_rule_instances() {
        let t = EaTerm::dil(&c("e"), g("a"), EaTerm::dil(&c("m"), g("a"), g("b")));
        let u = EaTerm::dil(&c("e^1*m^1"), g("a"), g("b"));
        assert!(bounded_search(&t, &u));
        assert!(bounded_search(&g("a"), &EaTerm::dil(&c("e"), g("a"), g("a"))));
    }
}
