use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::Lam(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        Db::from_term(self) == Db::from_term(other)
    }
}

/// De Bruijn form; free variables keep their names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Db {
    Free(String),
    Bound(usize),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
}

impl Db {
    pub fn from_term(t: &Term) -> Db {
        fn go(t: &Term, scope: &mut Vec<String>) -> Db {
            match t {
                Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
                    Some(i) => Db::Bound(i),
                    None => Db::Free(x.clone()),
                },
                Term::Lam(x, b) => {
                    scope.push(x.clone());
                    let body = go(b, scope);
                    scope.pop();
                    Db::Lam(Box::new(body))
                }
                Term::App(f, a) => Db::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
            }
        }
        go(t, &mut Vec::new())
    }

    /// Back to named syntax with binder names that avoid the free names.
    pub fn to_term(&self) -> Term {
        fn free(d: &Db, out: &mut BTreeSet<String>) {
            match d {
                Db::Free(x) => {
                    out.insert(x.clone());
                }
                Db::Bound(_) => {}
                Db::Lam(b) => free(b, out),
                Db::App(f, a) => {
                    free(f, out);
                    free(a, out);
                }
            }
        }
        fn go(d: &Db, scope: &mut Vec<String>, avoid: &BTreeSet<String>) -> Term {
            match d {
                Db::Free(x) => Term::Var(x.clone()),
                Db::Bound(i) => Term::Var(scope[scope.len() - 1 - i].clone()),
                Db::Lam(b) => {
                    let name = fresh_name(avoid, scope);
                    scope.push(name.clone());
                    let body = go(b, scope, avoid);
                    scope.pop();
                    Term::Lam(name, Box::new(body))
                }
                Db::App(f, a) => Term::App(Box::new(go(f, scope, avoid)), Box::new(go(a, scope, avoid))),
            }
        }
        let mut avoid = BTreeSet::new();
        free(self, &mut avoid);
        go(self, &mut Vec::new(), &avoid)
    }

    fn shift(&self, by: isize, cutoff: usize) -> Db {
        match self {
            Db::Bound(i) if *i >= cutoff => Db::Bound((*i as isize + by) as usize),
            Db::Lam(b) => Db::Lam(Box::new(b.shift(by, cutoff + 1))),
            Db::App(f, a) => Db::App(Box::new(f.shift(by, cutoff)), Box::new(a.shift(by, cutoff))),
            other => other.clone(),
        }
    }

    fn subst(&self, depth: usize, arg: &Db) -> Db {
        match self {
            Db::Bound(i) if *i == depth => arg.shift(depth as isize, 0),
            Db::Bound(i) if *i > depth => Db::Bound(i - 1),
            Db::Lam(b) => Db::Lam(Box::new(b.subst(depth + 1, arg))),
            Db::App(f, a) => Db::App(Box::new(f.subst(depth, arg)), Box::new(a.subst(depth, arg))),
            other => other.clone(),
        }
    }

    /// One leftmost-outermost beta step.
    pub fn step(&self) -> Option<Db> {
        match self {
            Db::App(f, a) => {
                if let Db::Lam(body) = &**f {
                    return Some(body.subst(0, a));
                }
                if let Some(f2) = f.step() {
                    return Some(Db::App(Box::new(f2), a.clone()));
                }
                a.step().map(|a2| Db::App(f.clone(), Box::new(a2)))
            }
            Db::Lam(b) => b.step().map(|b2| Db::Lam(Box::new(b2))),
            _ => None,
        }
    }
}

/// First of `x`, `y`, `z`, `w`, `x1`, `y1`, ... not in `avoid` or `scope`.
pub(crate) fn fresh_name(avoid: &BTreeSet<String>, scope: &[String]) -> String {
    const BASE: [&str; 4] = ["x", "y", "z", "w"];
    (0..)
        .map(|k| match k / BASE.len() {
            0 => BASE[k % BASE.len()].to_string(),
            n => format!("{}{}", BASE[k % BASE.len()], n),
        })
        .find(|name| !avoid.contains(name) && !scope.contains(name))
        .expect("infinitely many names")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Lam(x, b) => write!(f, "\\{x}.{b}"),
            Term::App(fun, arg) => {
                match **fun {
                    Term::Lam(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    Term::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

/// Parses `\x.M` / `λx.M` (several binders allowed: `\x y.M`), left
/// associative application, and parentheses.
pub fn parse(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(t)
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> SyntaxError {
        SyntaxError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => self.pos += 1,
            _ => return None,
        }
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let mut acc: Option<Term> = None;
        loop {
            let next = match self.peek() {
                Some('\\' | 'λ') => Some(self.lambda()?),
                Some('(') => {
                    self.pos += 1;
                    let t = self.term()?;
                    if self.peek() != Some(')') {
                        return Err(self.error("expected `)`"));
                    }
                    self.pos += 1;
                    Some(t)
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => Some(Term::Var(self.ident().unwrap())),
                _ => None,
            };
            match next {
                Some(t) => {
                    acc = Some(match acc {
                        None => t,
                        Some(f) => Term::app(f, t),
                    })
                }
                None => return acc.ok_or_else(|| self.error("expected a term")),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, SyntaxError> {
        self.pos += 1;
        let mut binders = Vec::new();
        while let Some(x) = self.ident() {
            binders.push(x);
        }
        if binders.is_empty() {
            return Err(self.error("expected a binder"));
        }
        if self.peek() != Some('.') {
            return Err(self.error("expected `.`"));
        }
        self.pos += 1;
        let mut body = self.term()?;
        for x in binders.into_iter().rev() {
            body = Term::Lam(x, Box::new(body));
        }
        Ok(body)
    }
}
