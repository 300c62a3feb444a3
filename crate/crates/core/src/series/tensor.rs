use std::collections::HashMap;
use std::fmt;

use super::Series;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// One tensor factor: the unit or a monomial.
pub type Factor = Option<super::Monomial>;

fn factor_degree(f: &Factor) -> u32 {
    f.as_ref().map_or(0, |m| m.degree())
}

fn factor_mul(a: &Factor, b: &Factor) -> Factor {
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(x.graft(y)),
    }
}

/// Truncated element of `A ⊗ A`, keyed by pairs of factors.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorSeries {
    order: u32,
    terms: HashMap<(Factor, Factor), Rational>,
}

impl TensorSeries {
    pub fn zero(order: u32) -> Self {
        TensorSeries { order, terms: HashMap::new() }
    }

    /// `1 ⊗ 1`.
    pub fn one(order: u32) -> Self {
        let mut t = TensorSeries::zero(order);
        t.add_term(None, None, Rational::one());
        t
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add_term(&mut self, l: Factor, r: Factor, c: Rational) {
        if c.is_zero() || factor_degree(&l) + factor_degree(&r) > self.order {
            return;
        }
        let key = (l, r);
        let v = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn coefficient(&self, l: &Factor, r: &Factor) -> Rational {
        self.terms.get(&(l.clone(), r.clone())).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TensorSeries {
        let mut out = TensorSeries::zero(self.order);
        for ((l, r), v) in &self.terms {
            out.add_term(l.clone(), r.clone(), v * c);
        }
        out
    }

    /// `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`, truncated at total degree `N`.
    pub fn mul(&self, other: &TensorSeries) -> Result<TensorSeries> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let mut out = TensorSeries::zero(self.order);
        for ((l1, r1), c1) in &self.terms {
            let d1 = factor_degree(l1) + factor_degree(r1);
            for ((l2, r2), c2) in &other.terms {
                if d1 + factor_degree(l2) + factor_degree(r2) > self.order {
                    continue;
                }
                out.add_term(factor_mul(l1, l2), factor_mul(r1, r2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> TensorSeries {
        TensorSeries {
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|((l, r), _)| factor_degree(l) + factor_degree(r) == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, m: u32) -> TensorSeries {
        TensorSeries {
            order: m,
            terms: self
                .terms
                .iter()
                .filter(|((l, r), _)| factor_degree(l) + factor_degree(r) <= m)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Terms sorted by (total degree, left, right).
    pub fn sorted_terms(&self) -> Vec<(Factor, Factor, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|((l, r), c)| (l.clone(), r.clone(), c.clone())).collect();
        v.sort_by(|a, b| {
            (factor_degree(&a.0) + factor_degree(&a.1))
                .cmp(&(factor_degree(&b.0) + factor_degree(&b.1)))
                .then_with(|| a.0.cmp(&b.0))
                .then_with(|| a.1.cmp(&b.1))
        });
        v
    }
}

impl fmt::Display for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: &Factor| x.as_ref().map_or("1".to_string(), |m| format!("({m})"));
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, r, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{}⊗{}", show(l), show(r))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn coproduct_monomial(m: &super::Monomial, order: u32, memo: &mut HashMap<super::Monomial, TensorSeries>) -> TensorSeries {
    if let Some(t) = memo.get(m) {
        return t.clone();
    }
    let t = match m.children() {
        None => {
            let mut t = TensorSeries::zero(order);
            t.add_term(Some(m.clone()), None, Rational::one());
            t.add_term(None, Some(m.clone()), Rational::one());
            t.add_term(Some(m.clone()), Some(m.clone()), Rational::from_i64(-1));
            t
        }
        Some((l, r)) => {
            let a = coproduct_monomial(l, order, memo);
            let b = coproduct_monomial(r, order, memo);
            a.mul(&b).expect("same order")
        }
    };
    memo.insert(m.clone(), t.clone());
    t
}

/// The algebra map with `Δ(x_i) = x_i ⊗ x_i`, i.e. `Δ(u_i) = u_i⊗1 + 1⊗u_i - u_i⊗u_i`.
pub fn coproduct(s: &Series) -> TensorSeries {
    let order = s.order();
    let mut out = TensorSeries::zero(order);
    out.add_term(None, None, s.constant().clone());
    let mut memo = HashMap::new();
    for (m, c) in s.sorted_terms() {
        for ((l, r), v) in coproduct_monomial(&m, order, &mut memo).terms {
            out.add_term(l, r, &v * &c);
        }
    }
    out
}

/// Whether `Δ(h)` and `h⊗1 + 1⊗h` agree in total degree `d`, for `h`
/// homogeneous of degree `d`. Returns an error if `h` is not homogeneous.
pub fn is_primitive(h: &Series) -> Result<bool> {
    let d = match h.homogeneous_degree() {
        None => return Err(Error::InvalidParameter("element is not homogeneous".into())),
        Some(None) => return Ok(true),
        Some(Some(0)) => return Ok(false),
        Some(Some(d)) => d,
    };
    let h = h.truncate(d);
    let delta = coproduct(&h).homogeneous(d);
    let mut expected = TensorSeries::zero(d);
    for (m, c) in h.sorted_terms() {
        expected.add_term(Some(m.clone()), None, c.clone());
        expected.add_term(None, Some(m), c);
    }
    Ok(delta == expected)
}
