//! Finite loops given by Cayley tables, their subloops and filtrations, and
//! linear algebra in the rational loop algebra.

mod corpus;
mod filtration;
mod linalg;
mod subloop;
mod witness;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::context::{LoopAlgebra, LoopContext};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use corpus::{corpus, corpus_loop, CORPUS_NAMES};
pub use filtration::{
    analyze, analyze_with, bruck_series, gamma_series, gamma_series_with, nilpotency_class, quotient, Caps, Classes, FiltrationReport, Nilpotency,
    DEVIATION_ORDER_CAP, DEVIATION_WEIGHT_CAP,
};
pub use linalg::{dimension_subloop, dimension_subloops, ideal_powers, RationalSubspace, LINEAR_ORDER_CAP};
pub use subloop::{is_normal, normal_closure, subloop_closure, verify_normal, Subloop};
pub use witness::{isolator, periodicity_witness, Isolator};

/// A loop on `{0, .., n-1}` with identity `0`, stored with its division tables.
#[derive(Clone, PartialEq, Eq)]
pub struct CayleyLoop {
    n: usize,
    table: Vec<usize>,
    ldiv: Vec<usize>,
    rdiv: Vec<usize>,
}

#[derive(Deserialize)]
struct TableJson {
    n: usize,
    table: Vec<Vec<usize>>,
}

impl CayleyLoop {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidTable(format!("entry {v} in row {i} is out of range")));
                }
            }
            table.extend_from_slice(row);
        }
        for i in 0..n {
            if table[i] != i || table[i * n] != i {
                return Err(Error::InvalidTable("element 0 is not a two-sided identity".into()));
            }
        }
        let mut ldiv = vec![usize::MAX; n * n];
        let mut rdiv = vec![usize::MAX; n * n];
        for a in 0..n {
            for z in 0..n {
                let b = table[a * n + z];
                if ldiv[a * n + b] != usize::MAX {
                    return Err(Error::InvalidTable(format!("row {a} repeats the entry {b}")));
                }
                ldiv[a * n + b] = z;
                // z * a = c, so c / a = z
                let c = table[z * n + a];
                if rdiv[c * n + a] != usize::MAX {
                    return Err(Error::InvalidTable(format!("column {a} repeats the entry {c}")));
                }
                rdiv[c * n + a] = z;
            }
        }
        Ok(CayleyLoop { n, table, ldiv, rdiv })
    }

    pub fn trivial() -> Self {
        CayleyLoop::from_rows(vec![vec![0]]).expect("valid")
    }

    /// The cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("order must be positive".into()));
        }
        CayleyLoop::from_rows((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
    }

    /// Reads the plain text format: the order on the first line followed by
    /// the rows of the table.
    pub fn parse_text(src: &str) -> Result<Self> {
        let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::InvalidTable("missing order line".into()))?;
        let n: usize = header.parse().map_err(|_| Error::InvalidTable(format!("bad order line {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidTable(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::InvalidTable(format!("expected {n} rows, found {}", rows.len())));
        }
        CayleyLoop::from_rows(rows)
    }

    pub fn parse_json(src: &str) -> Result<Self> {
        let t: TableJson = serde_json::from_str(src)?;
        if t.table.len() != t.n {
            return Err(Error::InvalidTable(format!("expected {} rows, found {}", t.n, t.table.len())));
        }
        CayleyLoop::from_rows(t.table)
    }

    /// Either format, told apart by a leading `{`.
    pub fn parse(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            CayleyLoop::parse_json(src)
        } else {
            CayleyLoop::parse_text(src)
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        CayleyLoop::parse(&std::fs::read_to_string(path)?)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    #[inline]
    pub fn left_div(&self, a: usize, b: usize) -> usize {
        self.ldiv[a * self.n + b]
    }

    #[inline]
    pub fn right_div(&self, a: usize, b: usize) -> usize {
        self.rdiv[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    #[inline]
    pub fn comm(&self, a: usize, b: usize) -> usize {
        self.left_div(self.op(b, a), self.op(a, b))
    }

    #[inline]
    pub fn assoc(&self, a: usize, b: usize, c: usize) -> usize {
        self.left_div(self.op(a, self.op(b, c)), self.op(self.op(a, b), c))
    }

    pub fn is_commutative(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.op(a, b) == self.op(b, a)))
    }

    pub fn is_associative(&self) -> bool {
        let e = self.elements();
        e.clone().all(|a| e.clone().all(|b| e.clone().all(|c| self.assoc(a, b, c) == 0)))
    }

    pub fn is_group(&self) -> bool {
        self.is_associative()
    }

    pub fn check(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange(x))
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for row in self.table.chunks(self.n) {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n, "table": self.rows() })
    }
}

impl fmt::Debug for CayleyLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CayleyLoop(n = {})", self.n)
    }
}

impl FromStr for CayleyLoop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CayleyLoop::parse(s)
    }
}

impl LoopContext for CayleyLoop {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: &usize, b: &usize) -> Result<usize> {
        self.check(*a)?;
        self.check(*b)?;
        Ok(self.op(*a, *b))
    }

    fn ldiv(&self, a: &usize, b: &usize) -> Result<usize> {
        self.check(*a)?;
        self.check(*b)?;
        Ok(self.left_div(*a, *b))
    }

    fn rdiv(&self, a: &usize, b: &usize) -> Result<usize> {
        self.check(*a)?;
        self.check(*b)?;
        Ok(self.right_div(*a, *b))
    }

    fn check_element(&self, a: &usize) -> Result<()> {
        self.check(*a)
    }
}

/// Vectors in the loop algebra are dense coefficient lists indexed by elements.
impl LoopAlgebra for CayleyLoop {
    type Vector = Vec<Rational>;

    fn embed(&self, x: &usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.n];
        v[*x] = Rational::one();
        v
    }

    fn scalar(&self, c: Rational) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.n];
        v[0] = c;
        v
    }

    fn add(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn sub(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn scale(&self, a: &Vec<Rational>, c: &Rational) -> Vec<Rational> {
        a.iter().map(|x| x * c).collect()
    }

    fn alg_mul(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Result<Vec<Rational>> {
        if a.len() != self.n || b.len() != self.n {
            return Err(Error::InvalidParameter(format!("vector length differs from loop order {}", self.n)));
        }
        let mut out = vec![Rational::zero(); self.n];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                out[self.op(i, j)] += &(x * y);
            }
        }
        Ok(out)
    }

    fn is_zero(&self, a: &Vec<Rational>) -> bool {
        a.iter().all(Rational::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{eval_term, parse_term};

    #[test]
    fn parse_trivial_and_z2() {
        let t = CayleyLoop::parse("1\n0\n").unwrap();
        assert_eq!(t.order(), 1);
        let z2 = CayleyLoop::parse("2\n0 1\n1 0\n").unwrap();
        assert!(z2.is_associative() && z2.is_commutative());
        assert_eq!(z2, CayleyLoop::cyclic(2).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let z4 = CayleyLoop::cyclic(4).unwrap();
        let back = CayleyLoop::parse(&z4.to_json().to_string()).unwrap();
        assert_eq!(back, z4);
        assert_eq!(CayleyLoop::parse(&z4.to_text()).unwrap(), z4);
    }

    #[test]
    fn rejects_bad_tables() {
        let repeated = "3\n0 1 2\n1 1 0\n2 0 1\n";
        assert!(matches!(CayleyLoop::parse(repeated), Err(Error::InvalidTable(_))));
        let no_identity = "2\n1 0\n0 1\n";
        assert!(CayleyLoop::parse(no_identity).is_err());
        let ragged = "2\n0 1\n1\n";
        assert!(CayleyLoop::parse(ragged).is_err());
        let column = "3\n0 1 2\n1 2 0\n2 2 1\n";
        assert!(CayleyLoop::parse(column).is_err());
        assert!(CayleyLoop::parse("2\n0 1\n1 2\n").is_err());
        assert!(CayleyLoop::parse("x").is_err());
        assert!(CayleyLoop::parse("{\"n\":2,\"table\":[[0,1]]}").is_err());
    }

    #[test]
    fn divisions_invert_multiplication() {
        for (_, l) in corpus() {
            for a in l.elements() {
                for b in l.elements() {
                    assert_eq!(l.op(a, l.left_div(a, b)), b);
                    assert_eq!(l.op(l.right_div(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn evaluates_terms() {
        let z4 = CayleyLoop::cyclic(4).unwrap();
        let w = parse_term("((x1*x1)\\x2)").unwrap();
        assert_eq!(eval_term(&w, &z4, &[1, 3]).unwrap(), 1);
        assert!(eval_term(&w, &z4, &[1, 7]).is_err());
    }

    #[test]
    fn algebra_multiplication_matches_loop() {
        let l = corpus_loop("loop5").unwrap();
        for a in l.elements() {
            for b in l.elements() {
                assert_eq!(l.alg_mul(&l.embed(&a), &l.embed(&b)).unwrap(), l.embed(&l.op(a, b)));
            }
        }
        let z2 = CayleyLoop::cyclic(2).unwrap();
        let d = z2.minus_one(&1);
        let sq = z2.alg_mul(&d, &d).unwrap();
        assert_eq!(sq, z2.scale(&d, &Rational::from_i64(-2)));
    }
}
