//! Words in the free loop: syntax trees, the fully parenthesized text form,
//! the degree homomorphism and evaluation in any [`LoopContext`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::LoopContext;
use crate::error::{Error, Result};

/// A free generator `x_i`, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorId(u32);

impl GeneratorId {
    pub fn new(index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidGenerator(0));
        }
        Ok(GeneratorId(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LoopTerm {
    One,
    Gen(GeneratorId),
    Mul(Box<LoopTerm>, Box<LoopTerm>),
    /// `LDiv(a, b)` is `a \ b`.
    LDiv(Box<LoopTerm>, Box<LoopTerm>),
    /// `RDiv(a, b)` is `a / b`.
    RDiv(Box<LoopTerm>, Box<LoopTerm>),
}

impl LoopTerm {
    /// Generator `x_i`. Panics if `i == 0`.
    pub fn gen(i: u32) -> Self {
        LoopTerm::Gen(GeneratorId::new(i).expect("generator index must be positive"))
    }

    pub fn mul(a: LoopTerm, b: LoopTerm) -> Self {
        LoopTerm::Mul(Box::new(a), Box::new(b))
    }

    pub fn ldiv(a: LoopTerm, b: LoopTerm) -> Self {
        LoopTerm::LDiv(Box::new(a), Box::new(b))
    }

    pub fn rdiv(a: LoopTerm, b: LoopTerm) -> Self {
        LoopTerm::RDiv(Box::new(a), Box::new(b))
    }

    /// Right-normed product `t1 (t2 (... tn))`; the identity for an empty list.
    pub fn right_normed(factors: impl IntoIterator<Item = LoopTerm>) -> Self {
        let mut v: Vec<LoopTerm> = factors.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return LoopTerm::One;
        };
        while let Some(t) = v.pop() {
            acc = LoopTerm::mul(t, acc);
        }
        acc
    }

    /// Right-normed power `y (y (... y))`, with `y^0 = 1`.
    pub fn power(base: &LoopTerm, n: usize) -> Self {
        LoopTerm::right_normed(std::iter::repeat_n(base.clone(), n))
    }

    /// Largest generator index occurring in the term (0 if none).
    pub fn max_generator(&self) -> u32 {
        match self {
            LoopTerm::One => 0,
            LoopTerm::Gen(g) => g.0,
            LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => {
                a.max_generator().max(b.max_generator())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LoopTerm::One | LoopTerm::Gen(_) => 0,
            LoopTerm::Mul(a, b) | LoopTerm::LDiv(a, b) | LoopTerm::RDiv(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Replaces every generator by the corresponding term.
    pub fn substitute(&self, f: &impl Fn(GeneratorId) -> LoopTerm) -> LoopTerm {
        match self {
            LoopTerm::One => LoopTerm::One,
            LoopTerm::Gen(g) => f(*g),
            LoopTerm::Mul(a, b) => LoopTerm::mul(a.substitute(f), b.substitute(f)),
            LoopTerm::LDiv(a, b) => LoopTerm::ldiv(a.substitute(f), b.substitute(f)),
            LoopTerm::RDiv(a, b) => LoopTerm::rdiv(a.substitute(f), b.substitute(f)),
        }
    }
}

impl fmt::Display for LoopTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopTerm::One => write!(f, "1"),
            LoopTerm::Gen(g) => write!(f, "{g}"),
            LoopTerm::Mul(a, b) => write!(f, "({a}*{b})"),
            LoopTerm::LDiv(a, b) => write!(f, "({a}\\{b})"),
            LoopTerm::RDiv(a, b) => write!(f, "({a}/{b})"),
        }
    }
}

/// Prints a term in the fully parenthesized grammar accepted by [`parse_term`].
pub fn format_term(t: &LoopTerm) -> String {
    t.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.into() })
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<LoopTerm> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'1') => {
                self.pos += 1;
                Ok(LoopTerm::One)
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    return self.err("expected digits after 'x'");
                }
                let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap_or_default();
                match text.parse::<u32>() {
                    Ok(0) => Err(Error::Parse {
                        position: start,
                        message: "unbound generator name x0 (generators start at x1)".into(),
                    }),
                    Ok(i) => Ok(LoopTerm::Gen(GeneratorId(i))),
                    Err(_) => Err(Error::Parse { position: start, message: format!("generator index {text} too large") }),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let lhs = self.expr()?;
                let op = match self.peek() {
                    Some(c @ (b'*' | b'\\' | b'/')) => {
                        self.pos += 1;
                        c
                    }
                    Some(c) => return self.err(format!("expected operator, found {:?}", c as char)),
                    None => return self.err("expected operator, found end of input"),
                };
                let rhs = self.expr()?;
                match self.peek() {
                    Some(b')') => self.pos += 1,
                    Some(c @ (b'*' | b'\\' | b'/')) => {
                        return self.err(format!(
                            "expected ')', found {:?}: chained products need explicit parentheses",
                            c as char
                        ))
                    }
                    Some(c) => return self.err(format!("expected ')', found {:?}", c as char)),
                    None => return self.err("expected ')', found end of input"),
                }
                Ok(match op {
                    b'*' => LoopTerm::mul(lhs, rhs),
                    b'\\' => LoopTerm::ldiv(lhs, rhs),
                    _ => LoopTerm::rdiv(lhs, rhs),
                })
            }
            Some(c) => self.err(format!("unexpected character {:?}", c as char)),
        }
    }
}

/// Parses the grammar `atom := "1" | "x" digits`, `expr := atom | "(" expr op expr ")"`
/// with `op` one of `*`, `\`, `/`. Whitespace is ignored.
pub fn parse_term(text: &str) -> Result<LoopTerm> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let t = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(t)
}

impl std::str::FromStr for LoopTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_term(s)
    }
}

/// Per-generator degree of a word.
///
/// Generators that occur in the word are recorded even when their degree
/// cancels to zero; equality compares effective values only.
#[derive(Clone, Debug, Default, Serialize)]
pub struct MultiDegree(BTreeMap<GeneratorId, i64>);

impl MultiDegree {
    pub fn get(&self, g: GeneratorId) -> i64 {
        self.0.get(&g).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (GeneratorId, i64)> + '_ {
        self.0.iter().map(|(g, d)| (*g, *d))
    }

    /// Sum over all generators (the single-generator degree when only one occurs).
    pub fn total(&self) -> i64 {
        self.0.values().sum()
    }

    fn combine(mut self, other: MultiDegree, sign: i64) -> Self {
        for (g, d) in other.0 {
            *self.0.entry(g).or_insert(0) += sign * d;
        }
        self
    }

    fn negate(mut self) -> Self {
        for d in self.0.values_mut() {
            *d = -*d;
        }
        self
    }
}

impl PartialEq for MultiDegree {
    fn eq(&self, other: &Self) -> bool {
        let nz = |m: &MultiDegree| m.0.iter().filter(|(_, d)| **d != 0).map(|(g, d)| (*g, *d)).collect::<Vec<_>>();
        nz(self) == nz(other)
    }
}

impl Eq for MultiDegree {}

impl FromIterator<(GeneratorId, i64)> for MultiDegree {
    fn from_iter<I: IntoIterator<Item = (GeneratorId, i64)>>(iter: I) -> Self {
        MultiDegree(iter.into_iter().collect())
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (g, d)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}:{d}")?;
        }
        write!(f, "}}")
    }
}

/// The degree homomorphism to `Z^k`: `x_i -> e_i`, products add, divisions subtract.
pub fn degree(w: &LoopTerm) -> MultiDegree {
    match w {
        LoopTerm::One => MultiDegree::default(),
        LoopTerm::Gen(g) => MultiDegree(BTreeMap::from([(*g, 1)])),
        LoopTerm::Mul(a, b) => degree(a).combine(degree(b), 1),
        LoopTerm::LDiv(a, b) => degree(b).combine(degree(a), -1),
        LoopTerm::RDiv(a, b) => degree(b).negate().combine(degree(a), 1),
    }
}

/// Evaluates `w` with `x_i` assigned to `assignment[i - 1]`.
pub fn eval_term<C: LoopContext>(w: &LoopTerm, ctx: &C, assignment: &[C::Elem]) -> Result<C::Elem> {
    for i in 1..=w.max_generator().min(assignment.len() as u32) {
        ctx.check_element(&assignment[i as usize - 1])?;
    }
    eval_inner(w, ctx, assignment)
}

fn eval_inner<C: LoopContext>(w: &LoopTerm, ctx: &C, assignment: &[C::Elem]) -> Result<C::Elem> {
    match w {
        LoopTerm::One => Ok(ctx.identity()),
        LoopTerm::Gen(g) => assignment.get(g.0 as usize - 1).cloned().ok_or(Error::UnboundGenerator(g.0)),
        LoopTerm::Mul(a, b) => ctx.mul(&eval_inner(a, ctx, assignment)?, &eval_inner(b, ctx, assignment)?),
        LoopTerm::LDiv(a, b) => ctx.ldiv(&eval_inner(a, ctx, assignment)?, &eval_inner(b, ctx, assignment)?),
        LoopTerm::RDiv(a, b) => ctx.rdiv(&eval_inner(a, ctx, assignment)?, &eval_inner(b, ctx, assignment)?),
    }
}
