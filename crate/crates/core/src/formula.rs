//! A small condition language for the per-case admissibility theorems.
//!
//! ```text
//! expr   := term ("or" term)*
//! term   := factor ("and" factor)*
//! factor := "not" factor | "(" expr ")" | atom
//! atom   := "true"
//!         | "size(" pool ")" ("=" | ">=") n
//!         | pool "=" set            e.g. T1={1,3}, T1={}
//!         | "member(" n "," pool ")"
//!         | "subset(" set "," pool ")"
//!         | "meets(" set "," pool ")"      set ∩ pool ≠ ∅
//!         | "min(" pool ")<=" n
//!         | "max(" pool ")>=" n
//!         | "nonempty(" pool ")"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::Pool;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula `{source_text}`: {message} at offset {offset}")]
pub struct FormulaError {
    pub source_text: String,
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    True,
    SizeEq(Pool, usize),
    SizeGe(Pool, usize),
    SetEq(Pool, BTreeSet<u32>),
    Member(u32, Pool),
    Subset(BTreeSet<u32>, Pool),
    Meets(BTreeSet<u32>, Pool),
    MinLe(Pool, u32),
    MaxGe(Pool, u32),
    Nonempty(Pool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Atom(Atom),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

/// Candidate labels split by pool.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoolSets([BTreeSet<u32>; 3]);

impl PoolSets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_labels(labels: &[u32], pool_of: &BTreeMap<u32, Pool>) -> Self {
        let mut s = Self::new();
        for l in labels {
            if let Some(p) = pool_of.get(l) {
                s.0[p.index()].insert(*l);
            }
        }
        s
    }

    pub fn get(&self, p: Pool) -> &BTreeSet<u32> {
        &self.0[p.index()]
    }
}

impl Atom {
    fn eval(&self, t: &PoolSets) -> bool {
        match self {
            Atom::True => true,
            Atom::SizeEq(p, n) => t.get(*p).len() == *n,
            Atom::SizeGe(p, n) => t.get(*p).len() >= *n,
            Atom::SetEq(p, s) => t.get(*p) == s,
            Atom::Member(l, p) => t.get(*p).contains(l),
            Atom::Subset(s, p) => s.is_subset(t.get(*p)),
            Atom::Meets(s, p) => !s.is_disjoint(t.get(*p)),
            Atom::MinLe(p, n) => t.get(*p).first().is_some_and(|m| m <= n),
            Atom::MaxGe(p, n) => t.get(*p).last().is_some_and(|m| m >= n),
            Atom::Nonempty(p) => !t.get(*p).is_empty(),
        }
    }

    fn labels(&self) -> Vec<u32> {
        match self {
            Atom::SetEq(_, s) | Atom::Subset(s, _) | Atom::Meets(s, _) => {
                s.iter().copied().collect()
            }
            Atom::Member(l, _) => vec![*l],
            _ => vec![],
        }
    }
}

impl Expr {
    pub fn eval(&self, t: &PoolSets) -> bool {
        match self {
            Expr::Atom(a) => a.eval(t),
            Expr::Not(e) => !e.eval(t),
            Expr::And(es) => es.iter().all(|e| e.eval(t)),
            Expr::Or(es) => es.iter().any(|e| e.eval(t)),
        }
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Expr::Atom(a) => f(a),
            Expr::Not(e) => e.visit_atoms(f),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.visit_atoms(f)),
        }
    }

    /// Candidate labels referenced anywhere in the expression, with the pool
    /// each reference assumes (None for pool-free atoms).
    pub fn label_refs(&self) -> Vec<(u32, Option<Pool>)> {
        let mut out = vec![];
        self.visit_atoms(&mut |a| {
            let pool = match a {
                Atom::SetEq(p, _) | Atom::Member(_, p) | Atom::Subset(_, p) | Atom::Meets(_, p) => {
                    Some(*p)
                }
                _ => None,
            };
            out.extend(a.labels().into_iter().map(|l| (l, pool)));
        });
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn set(s: &BTreeSet<u32>) -> String {
            let v: Vec<String> = s.iter().map(u32::to_string).collect();
            format!("{{{}}}", v.join(","))
        }
        match self {
            Expr::Atom(a) => match a {
                Atom::True => write!(f, "true"),
                Atom::SizeEq(p, n) => write!(f, "size({p})={n}"),
                Atom::SizeGe(p, n) => write!(f, "size({p})>={n}"),
                Atom::SetEq(p, s) => write!(f, "{p}={}", set(s)),
                Atom::Member(l, p) => write!(f, "member({l},{p})"),
                Atom::Subset(s, p) => write!(f, "subset({},{p})", set(s)),
                Atom::Meets(s, p) => write!(f, "meets({},{p})", set(s)),
                Atom::MinLe(p, n) => write!(f, "min({p})<={n}"),
                Atom::MaxGe(p, n) => write!(f, "max({p})>={n}"),
                Atom::Nonempty(p) => write!(f, "nonempty({p})"),
            },
            Expr::Not(e) => write!(f, "not ({e})"),
            Expr::And(es) => join(f, es, " and "),
            Expr::Or(es) => join(f, es, " or "),
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, es: &[Expr], sep: &str) -> fmt::Result {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        match e {
            Expr::And(_) | Expr::Or(_) => write!(f, "({e})")?,
            _ => write!(f, "{e}")?,
        }
    }
    Ok(())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError {
            source_text: self.src.to_string(),
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// Keyword followed by a non-identifier character.
    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        if r.starts_with(word)
            && !r[word.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), FormulaError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn number(&mut self) -> Result<u32, FormulaError> {
        self.skip_ws();
        let digits: String = self
            .rest()
            .chars()
            .take_while(char::is_ascii_digit)
            .collect();
        if digits.is_empty() {
            return self.err("expected a number");
        }
        self.pos += digits.len();
        digits.parse().or_else(|_| self.err("number out of range"))
    }

    fn pool(&mut self) -> Result<Pool, FormulaError> {
        for p in Pool::ALL {
            if self.eat_word(&p.to_string()) {
                return Ok(p);
            }
        }
        self.err("expected T1, T2 or T3")
    }

    fn set(&mut self) -> Result<BTreeSet<u32>, FormulaError> {
        self.expect("{")?;
        let mut s = BTreeSet::new();
        if self.eat("}") {
            return Ok(s);
        }
        loop {
            s.insert(self.number()?);
            if self.eat("}") {
                return Ok(s);
            }
            self.expect(",")?;
        }
    }

    fn expr(&mut self) -> Result<Expr, FormulaError> {
        let mut terms = vec![self.term()?];
        while self.eat_word("or") {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Or(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, FormulaError> {
        let mut fs = vec![self.factor()?];
        while self.eat_word("and") {
            fs.push(self.factor()?);
        }
        Ok(if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Expr::And(fs)
        })
    }

    fn factor(&mut self) -> Result<Expr, FormulaError> {
        if self.eat_word("not") {
            return Ok(Expr::Not(Box::new(self.factor()?)));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        self.atom().map(Expr::Atom)
    }

    fn atom(&mut self) -> Result<Atom, FormulaError> {
        if self.eat_word("true") {
            return Ok(Atom::True);
        }
        if self.eat("size(") {
            let p = self.pool()?;
            self.expect(")")?;
            if self.eat(">=") {
                return Ok(Atom::SizeGe(p, self.number()? as usize));
            }
            self.expect("=")?;
            return Ok(Atom::SizeEq(p, self.number()? as usize));
        }
        if self.eat("member(") {
            let l = self.number()?;
            self.expect(",")?;
            let p = self.pool()?;
            self.expect(")")?;
            return Ok(Atom::Member(l, p));
        }
        for (name, subset) in [("subset(", true), ("meets(", false)] {
            if self.eat(name) {
                let s = self.set()?;
                self.expect(",")?;
                let p = self.pool()?;
                self.expect(")")?;
                return Ok(if subset {
                    Atom::Subset(s, p)
                } else {
                    Atom::Meets(s, p)
                });
            }
        }
        if self.eat("min(") {
            let p = self.pool()?;
            self.expect(")")?;
            self.expect("<=")?;
            return Ok(Atom::MinLe(p, self.number()?));
        }
        if self.eat("max(") {
            let p = self.pool()?;
            self.expect(")")?;
            self.expect(">=")?;
            return Ok(Atom::MaxGe(p, self.number()?));
        }
        if self.eat("nonempty(") {
            let p = self.pool()?;
            self.expect(")")?;
            return Ok(Atom::Nonempty(p));
        }
        let save = self.pos;
        if let Ok(p) = self.pool() {
            if self.eat("=") {
                return Ok(Atom::SetEq(p, self.set()?));
            }
        }
        self.pos = save;
        self.err("unrecognised atom")
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, FormulaError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub guard: Expr,
    pub body: Expr,
}

/// Guarded clauses, tried in order, plus an optional global conjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremFormula {
    pub global: Option<Expr>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaOutcome {
    pub accepted: bool,
    /// Index of the clause whose guard matched, if any.
    pub clause: Option<usize>,
}

impl TheoremFormula {
    pub fn unguarded(body: Expr) -> Self {
        TheoremFormula {
            global: None,
            clauses: vec![Clause {
                guard: Expr::Atom(Atom::True),
                body,
            }],
        }
    }

    /// First matching guard decides; no match rejects.
    pub fn evaluate(&self, t: &PoolSets) -> FormulaOutcome {
        let Some(i) = self.clauses.iter().position(|c| c.guard.eval(t)) else {
            return FormulaOutcome {
                accepted: false,
                clause: None,
            };
        };
        let global = self.global.as_ref().is_none_or(|g| g.eval(t));
        FormulaOutcome {
            accepted: global && self.clauses[i].body.eval(t),
            clause: Some(i),
        }
    }

    pub fn exprs(&self) -> impl Iterator<Item = &Expr> {
        self.global
            .iter()
            .chain(self.clauses.iter().flat_map(|c| [&c.guard, &c.body]))
    }

    /// Every referenced label must exist and sit in the pool the atom names.
    pub fn check_labels(&self, pool_of: &BTreeMap<u32, Pool>) -> Result<(), String> {
        for e in self.exprs() {
            for (l, p) in e.label_refs() {
                match (pool_of.get(&l), p) {
                    (None, _) => return Err(format!("label {l} is not a candidate")),
                    (Some(actual), Some(p)) if *actual != p => {
                        return Err(format!("label {l} is in {actual}, formula expects {p}"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
