//! Truncated nonassociative power series over the rationals.
//!
//! A [`Series`] of order `N` is an element of the free nonassociative algebra
//! on the `u_i` modulo all monomials of degree greater than `N`. With
//! `x_i = 1 - u_i` the elements with constant term 1 form a loop, which is
//! the model of the free loop used throughout the crate.
//!
//! Terms are bucketed by degree, so a truncated product only visits degree
//! pairs that survive the truncation.

mod monomial;
mod tensor;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use monomial::{MonoBuildHasher, Monomial};
pub use tensor::{coproduct, is_primitive, TensorSeries};

use crate::context::{LoopAlgebra, LoopContext};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::terms::{eval_term, GeneratorId, LoopTerm};

pub(crate) type TermMap = HashMap<Monomial, Rational, MonoBuildHasher>;

/// The I-adic valuation of a truncated series.
///
/// The zero series of order `N` only certifies `nu >= N + 1`, reported as
/// [`Valuation::ExceedsOrder`]; it never compares equal to a number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Degree(u32),
    ExceedsOrder,
}

impl Valuation {
    /// Whether the valuation certifies `nu >= bound`, given the order `N`
    /// it was computed at. `ExceedsOrder` certifies bounds up to `N + 1`.
    pub fn certifies(self, bound: u32, order: u32) -> bool {
        match self {
            Valuation::Degree(d) => d >= bound,
            Valuation::ExceedsOrder => bound <= order + 1,
        }
    }

    /// Lower bound as a number, `N + 1` for `ExceedsOrder`.
    pub fn lower_bound(self, order: u32) -> u32 {
        match self {
            Valuation::Degree(d) => d,
            Valuation::ExceedsOrder => order + 1,
        }
    }

    pub fn degree(self) -> Option<u32> {
        match self {
            Valuation::Degree(d) => Some(d),
            Valuation::ExceedsOrder => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Degree(d) => write!(f, "{d}"),
            Valuation::ExceedsOrder => write!(f, "exceeds order"),
        }
    }
}

#[derive(Clone)]
pub struct Series {
    order: u32,
    constant: Rational,
    /// `terms[d - 1]` holds the degree-`d` part.
    terms: Vec<TermMap>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.constant == other.constant && self.terms == other.terms
    }
}

impl Eq for Series {}

fn add_into(map: &mut TermMap, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            let v = e.get() + &c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

impl Series {
    /// Panics if `order == 0`.
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1, "series order must be positive");
        Series { order, constant: Rational::zero(), terms: vec![TermMap::default(); order as usize] }
    }

    pub fn constant_series(c: Rational, order: u32) -> Self {
        let mut s = Series::zero(order);
        s.constant = c;
        s
    }

    pub fn one(order: u32) -> Self {
        Series::constant_series(Rational::one(), order)
    }

    /// The series `u_g`.
    pub fn u(g: GeneratorId, order: u32) -> Self {
        Series::monomial(Monomial::leaf(g), Rational::one(), order)
    }

    /// The loop element `x_g = 1 - u_g`.
    pub fn x(g: GeneratorId, order: u32) -> Self {
        let mut s = Series::u(g, order).neg();
        s.constant = Rational::one();
        s
    }

    /// `c * m`, dropped if `deg m > order`.
    pub fn monomial(m: Monomial, c: Rational, order: u32) -> Self {
        let mut s = Series::zero(order);
        s.add_term(m, c);
        s
    }

    /// Builds a series from terms; terms of degree above `order` are discarded.
    pub fn from_terms(order: u32, constant: Rational, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = Series::constant_series(constant, order);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn set_constant(&mut self, c: Rational) {
        self.constant = c;
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        let d = m.degree();
        if d <= self.order {
            add_into(&mut self.terms[d as usize - 1], m, c);
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        if m.degree() > self.order {
            return Rational::zero();
        }
        self.terms[m.degree() as usize - 1].get(m).cloned().unwrap_or_default()
    }

    /// Number of stored nonzero non-constant terms.
    pub fn len(&self) -> usize {
        self.terms.iter().map(|m| m.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.iter().all(|m| m.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Nonconstant terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rational)> {
        let mut out = Vec::with_capacity(self.len());
        for bucket in &self.terms {
            let mut v: Vec<_> = bucket.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(v);
        }
        out
    }

    /// The homogeneous component of degree `d` (the constant for `d = 0`).
    pub fn homogeneous(&self, d: u32) -> Series {
        if d == 0 {
            return Series::constant_series(self.constant.clone(), self.order);
        }
        let mut s = Series::zero(self.order);
        if d <= self.order {
            s.terms[d as usize - 1] = self.terms[d as usize - 1].clone();
        }
        s
    }

    /// Minimal degree with a nonzero coefficient.
    pub fn nu(&self) -> Valuation {
        if !self.constant.is_zero() {
            return Valuation::Degree(0);
        }
        self.terms
            .iter()
            .position(|m| !m.is_empty())
            .map_or(Valuation::ExceedsOrder, |i| Valuation::Degree(i as u32 + 1))
    }

    /// The nonzero homogeneous component of least degree, or `None` for zero.
    pub fn lowest_component(&self) -> Option<Series> {
        self.nu().degree().map(|d| self.homogeneous(d))
    }

    /// Whether all terms have the same degree (zero counts as homogeneous).
    pub fn homogeneous_degree(&self) -> Option<Option<u32>> {
        let mut found = None;
        if !self.constant.is_zero() {
            found = Some(0);
        }
        for (i, m) in self.terms.iter().enumerate() {
            if !m.is_empty() {
                if found.is_some() {
                    return None;
                }
                found = Some(i as u32 + 1);
            }
        }
        Some(found)
    }

    /// Drops every term of degree above `m` and lowers the order to `m`.
    /// Panics if `m == 0` or `m > self.order()`.
    pub fn truncate(&self, m: u32) -> Series {
        assert!(m >= 1 && m <= self.order, "truncation order {m} outside 1..={}", self.order);
        Series { order: m, constant: self.constant.clone(), terms: self.terms[..m as usize].to_vec() }
    }

    /// Re-embeds into a higher order (new degrees are zero).
    pub fn with_order(&self, order: u32) -> Series {
        if order <= self.order {
            return self.truncate(order);
        }
        let mut s = self.clone();
        s.order = order;
        s.terms.resize(order as usize, TermMap::default());
        s
    }

    fn check_order(&self, other: &Series) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    /// Sum. Panics on mismatched orders; use [`Series::try_add`] to get an error instead.
    pub fn add(&self, other: &Series) -> Series {
        self.try_add(other).expect("series orders differ")
    }

    pub fn try_add(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        big.constant = &big.constant + &small.constant;
        for (d, bucket) in small.terms.iter().enumerate() {
            for (m, c) in bucket {
                add_into(&mut big.terms[d], m.clone(), c.clone());
            }
        }
        Ok(big)
    }

    /// Panics on mismatched orders.
    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(&Rational::from_i64(-1))
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(self.order);
        }
        Series {
            order: self.order,
            constant: &self.constant * c,
            terms: self.terms.iter().map(|b| b.iter().map(|(m, v)| (m.clone(), v * c)).collect()).collect(),
        }
    }

    /// Truncated product. Monomials multiply by grafting under a new root.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        let n = self.order as usize;
        let mut out = Series::zero(self.order);
        out.constant = &self.constant * &other.constant;
        for d in 0..n {
            let bucket = &mut out.terms[d];
            if !self.constant.is_zero() {
                for (m, c) in &other.terms[d] {
                    add_into(bucket, m.clone(), &self.constant * c);
                }
            }
            if !other.constant.is_zero() {
                for (m, c) in &self.terms[d] {
                    add_into(bucket, m.clone(), c * &other.constant);
                }
            }
        }
        for d1 in 1..n {
            let left = &self.terms[d1 - 1];
            if left.is_empty() {
                continue;
            }
            for d2 in 1..=(n - d1) {
                let right = &other.terms[d2 - 1];
                if right.is_empty() {
                    continue;
                }
                let bucket = &mut out.terms[d1 + d2 - 1];
                bucket.reserve(left.len() * right.len());
                for (m1, c1) in left {
                    for (m2, c2) in right {
                        add_into(bucket, m1.graft(m2), c1 * c2);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self \ b`: the unique `z` with `self * z = b` at this order, solved degree by degree.
    pub fn left_div(&self, b: &Series) -> Result<Series> {
        self.check_order(b)?;
        let a0_inv = self.constant.recip().ok_or(Error::NotInvertible)?;
        let n = self.order as usize;
        let mut z = Series::zero(self.order);
        z.constant = &b.constant * &a0_inv;
        for d in 1..=n {
            // r = b_d - sum_{d1 >= 1} a_{d1} z_{d - d1}
            let mut r = b.terms[d - 1].clone();
            if !z.constant.is_zero() {
                let neg = -&z.constant;
                for (m, c) in &self.terms[d - 1] {
                    add_into(&mut r, m.clone(), c * &neg);
                }
            }
            for d1 in 1..d {
                for (m1, c1) in &self.terms[d1 - 1] {
                    let nc1 = -c1;
                    for (m2, c2) in &z.terms[d - d1 - 1] {
                        add_into(&mut r, m1.graft(m2), &nc1 * c2);
                    }
                }
            }
            z.terms[d - 1] = if a0_inv.is_one() { r } else { r.into_iter().map(|(m, c)| (m, &c * &a0_inv)).collect() };
        }
        Ok(z)
    }

    /// `self / b`: the unique `z` with `z * b = self` at this order.
    pub fn right_div(&self, b: &Series) -> Result<Series> {
        self.check_order(b)?;
        let b0_inv = b.constant.recip().ok_or(Error::NotInvertible)?;
        let n = self.order as usize;
        let mut z = Series::zero(self.order);
        z.constant = &self.constant * &b0_inv;
        for d in 1..=n {
            let mut r = self.terms[d - 1].clone();
            if !z.constant.is_zero() {
                let neg = -&z.constant;
                for (m, c) in &b.terms[d - 1] {
                    add_into(&mut r, m.clone(), c * &neg);
                }
            }
            for d2 in 1..d {
                for (m2, c2) in &b.terms[d2 - 1] {
                    let nc2 = -c2;
                    for (m1, c1) in &z.terms[d - d2 - 1] {
                        add_into(&mut r, m1.graft(m2), c1 * &nc2);
                    }
                }
            }
            z.terms[d - 1] = if b0_inv.is_one() { r } else { r.into_iter().map(|(m, c)| (m, &c * &b0_inv)).collect() };
        }
        Ok(z)
    }

    /// Applies a linear map on monomials (used for substitutions and projections).
    pub fn map_monomials(&self, order: u32, f: impl Fn(&Monomial) -> Option<(Monomial, Rational)>) -> Series {
        let mut s = Series::constant_series(self.constant.clone(), order);
        for bucket in &self.terms {
            for (m, c) in bucket {
                if let Some((m2, k)) = f(m) {
                    s.add_term(m2, c * &k);
                }
            }
        }
        s
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (m, c) in self.sorted_terms() {
            let neg = c.is_negative();
            let abs = if neg { -&c } else { c };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if abs.is_one() {
                write!(f, "{m}")?;
            } else if m.degree() > 1 {
                write!(f, "{abs}*({m})")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesTermJson {
    coef: Rational,
    mono: Monomial,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    order: u32,
    #[serde(rename = "const")]
    constant: Rational,
    terms: Vec<SeriesTermJson>,
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            order: self.order,
            constant: self.constant.clone(),
            terms: self.sorted_terms().into_iter().map(|(mono, coef)| SeriesTermJson { coef, mono }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        if j.order == 0 {
            return Err(serde::de::Error::custom("order must be positive"));
        }
        let mut s = Series::constant_series(j.constant, j.order);
        for t in j.terms {
            if t.mono.degree() > j.order {
                return Err(serde::de::Error::custom(format!("monomial {} exceeds order {}", t.mono, j.order)));
            }
            s.add_term(t.mono, t.coef);
        }
        Ok(s)
    }
}

/// The unit loop of the truncated algebra: elements are series with constant term 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesContext {
    order: u32,
}

impl SeriesContext {
    /// Panics if `order == 0`.
    pub fn new(order: u32) -> Self {
        assert!(order >= 1, "series order must be positive");
        SeriesContext { order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `x_i = 1 - u_i`.
    pub fn x(&self, i: u32) -> Series {
        Series::x(GeneratorId::new(i).expect("generator index must be positive"), self.order)
    }

    /// `u_i`.
    pub fn u(&self, i: u32) -> Series {
        Series::u(GeneratorId::new(i).expect("generator index must be positive"), self.order)
    }

    /// Evaluates a word with `x_i -> 1 - u_i`.
    pub fn eval_free(&self, w: &LoopTerm) -> Result<Series> {
        let gens: Vec<Series> = (1..=w.max_generator()).map(|i| self.x(i)).collect();
        eval_term(w, self, &gens)
    }
}

impl LoopContext for SeriesContext {
    type Elem = Series;

    fn identity(&self) -> Series {
        Series::one(self.order)
    }

    fn mul(&self, a: &Series, b: &Series) -> Result<Series> {
        a.mul(b)
    }

    fn ldiv(&self, a: &Series, b: &Series) -> Result<Series> {
        a.left_div(b)
    }

    fn rdiv(&self, a: &Series, b: &Series) -> Result<Series> {
        a.right_div(b)
    }

    fn check_element(&self, a: &Series) -> Result<()> {
        if a.order != self.order {
            return Err(Error::OrderMismatch(a.order, self.order));
        }
        if !a.constant.is_one() {
            return Err(Error::NotLoopElement(a.constant.to_string()));
        }
        Ok(())
    }
}

impl LoopAlgebra for SeriesContext {
    type Vector = Series;

    fn embed(&self, x: &Series) -> Series {
        x.clone()
    }

    fn scalar(&self, c: Rational) -> Series {
        Series::constant_series(c, self.order)
    }

    fn add(&self, a: &Series, b: &Series) -> Series {
        a.add(b)
    }

    fn sub(&self, a: &Series, b: &Series) -> Series {
        a.sub(b)
    }

    fn scale(&self, a: &Series, c: &Rational) -> Series {
        a.scale(c)
    }

    fn alg_mul(&self, a: &Series, b: &Series) -> Result<Series> {
        a.mul(b)
    }

    fn is_zero(&self, a: &Series) -> bool {
        a.is_zero()
    }
}

/// `nu(eval(w) - 1)` in the free series model: a value `n <= N` certifies
/// that `w` lies in the `n`-th dimension subloop of the free loop and not in the next.
pub fn dimension_degree(w: &LoopTerm, order: u32) -> Result<Valuation> {
    let ctx = SeriesContext::new(order);
    let v = ctx.eval_free(w)?;
    Ok(v.sub(&Series::one(order)).nu())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;
    use proptest::prelude::*;

    fn g(i: u32) -> GeneratorId {
        GeneratorId::new(i).unwrap()
    }

    fn mono(gens: &[u32]) -> Monomial {
        Monomial::right_normed(&gens.iter().map(|i| g(*i)).collect::<Vec<_>>())
    }

    #[test]
    fn unit_and_grafting() {
        let n = 4;
        let x1 = Series::x(g(1), n);
        assert_eq!(x1.mul(&Series::one(n)).unwrap(), x1);
        let p = Series::u(g(1), n).mul(&Series::u(g(2), n)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&Monomial::leaf(g(1)).graft(&Monomial::leaf(g(2)))), Rational::one());
        let (u1, u2, u3) = (Series::u(g(1), n), Series::u(g(2), n), Series::u(g(3), n));
        let l = u1.mul(&u2).unwrap().mul(&u3).unwrap();
        let r = u1.mul(&u2.mul(&u3).unwrap()).unwrap();
        assert_ne!(l, r);
    }

    #[test]
    fn left_inverse_of_one_minus_u_is_right_normed_geometric() {
        // Oracle: solve (1 - u) z = 1 by hand degree by degree: z_d = u z_{d-1}.
        let n = 3;
        let x = Series::x(g(1), n);
        let z = x.left_div(&Series::one(n)).unwrap();
        let mut expected = Series::one(n);
        for d in 1..=3 {
            expected.add_term(mono(&vec![1; d]), Rational::one());
        }
        assert_eq!(z, expected);
        assert_eq!(x.left_div(&x).unwrap(), Series::one(n));
    }

    #[test]
    fn division_by_zero_constant_fails() {
        let u = Series::u(g(1), 3);
        assert_eq!(u.left_div(&Series::one(3)), Err(Error::NotInvertible));
        assert_eq!(Series::one(3).right_div(&u), Err(Error::NotInvertible));
        assert_eq!(Series::one(3).mul(&Series::one(4)), Err(Error::OrderMismatch(3, 4)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(Series::u(g(1), 3).nu(), Valuation::Degree(1));
        assert_eq!(Series::zero(3).nu(), Valuation::ExceedsOrder);
        assert_eq!(dimension_degree(&LoopTerm::One, 4).unwrap(), Valuation::ExceedsOrder);
        let comm = parse_term("((x2*x1)\\(x1*x2))").unwrap();
        assert_eq!(dimension_degree(&comm, 4).unwrap(), Valuation::Degree(2));
        let assoc = parse_term("((x1*(x2*x3))\\((x1*x2)*x3))").unwrap();
        assert_eq!(dimension_degree(&assoc, 4).unwrap(), Valuation::Degree(3));
        assert!(Valuation::ExceedsOrder.certifies(5, 4));
        assert!(!Valuation::ExceedsOrder.certifies(6, 4));
    }

    #[test]
    fn commutator_leading_term() {
        let n = 3;
        let ctx = SeriesContext::new(n);
        let comm = ctx.eval_free(&parse_term("((x2*x1)\\(x1*x2))").unwrap()).unwrap();
        let lead = comm.sub(&Series::one(n)).homogeneous(2);
        let mut expected = Series::zero(n);
        expected.add_term(mono(&[1, 2]), Rational::one());
        expected.add_term(mono(&[2, 1]), Rational::from_i64(-1));
        assert_eq!(lead, expected);
    }

    #[test]
    fn eval_rejects_non_loop_elements() {
        let ctx = SeriesContext::new(3);
        let w = parse_term("(x1*x2)").unwrap();
        let err = eval_term(&w, &ctx, &[ctx.x(1), ctx.u(2)]).unwrap_err();
        assert!(matches!(err, Error::NotLoopElement(_)));
        let err = eval_term(&w, &ctx, &[ctx.x(1)]).unwrap_err();
        assert_eq!(err, Error::UnboundGenerator(2));
        assert_eq!(eval_term(&LoopTerm::gen(1), &ctx, &[ctx.x(1)]).unwrap(), ctx.x(1));
    }

    #[test]
    fn json_shape() {
        let mut s = Series::one(3);
        s.add_term(Monomial::leaf(g(1)).graft(&Monomial::leaf(g(2))).graft(&Monomial::leaf(g(3))), Rational::new(-1, 2));
        s.add_term(Monomial::leaf(g(2)), Rational::from_i64(3));
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"order": 3, "const": "1", "terms": [
                {"coef": "3", "mono": 2},
                {"coef": "-1/2", "mono": [[1, 2], 3]}
            ]})
        );
        let back: Series = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::json!({"order": 1, "const": "0", "terms": [{"coef": "1", "mono": [1, 2]}]});
        assert!(serde_json::from_value::<Series>(bad).is_err());
    }

    // Random series: constant 1, small rational coefficients, up to 3 generators.
    pub(crate) fn arb_series(order: u32) -> impl Strategy<Value = Series> {
        let mono = (1u32..4).prop_map(|i| Monomial::leaf(GeneratorId::new(i).unwrap())).prop_recursive(3, 8, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| a.graft(&b))
        });
        proptest::collection::vec((mono, -3i64..4, 1i64..3), 0..6).prop_map(move |ts| {
            Series::from_terms(order, Rational::one(), ts.into_iter().map(|(m, n, d)| (m, Rational::new(n, d))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn division_round_trips(a in arb_series(5), b in arb_series(5)) {
            prop_assert_eq!(a.mul(&a.left_div(&b).unwrap()).unwrap(), b.clone());
            prop_assert_eq!(b.right_div(&a).unwrap().mul(&a).unwrap(), b);
        }

        #[test]
        fn valuation_is_superadditive(a in arb_series(5), b in arb_series(5)) {
            let one = Series::one(5);
            let (s, t) = (a.sub(&one), b.sub(&one));
            let p = s.mul(&t).unwrap();
            let bound = s.nu().lower_bound(5) + t.nu().lower_bound(5);
            prop_assert!(p.nu().certifies(bound.min(6), 5));
        }

        #[test]
        fn distributive(a in arb_series(4), b in arb_series(4), c in arb_series(4)) {
            prop_assert_eq!(a.mul(&b.add(&c)).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()));
        }

        #[test]
        fn truncation_commutes_with_operations(a in arb_series(5), b in arb_series(5), m in 1u32..5) {
            let (am, bm) = (a.truncate(m), b.truncate(m));
            prop_assert_eq!(a.mul(&b).unwrap().truncate(m), am.mul(&bm).unwrap());
            prop_assert_eq!(a.left_div(&b).unwrap().truncate(m), am.left_div(&bm).unwrap());
            prop_assert_eq!(a.right_div(&b).unwrap().truncate(m), am.right_div(&bm).unwrap());
        }

        #[test]
        fn json_round_trip(a in arb_series(4)) {
            let text = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<Series>(&text).unwrap(), a);
        }
    }
}
