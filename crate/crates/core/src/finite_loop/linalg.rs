use serde_json::{json, Value};

use super::{CayleyLoop, Subloop};
use crate::context::LoopAlgebra;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest loop order accepted by the loop-algebra computations.
pub const LINEAR_ORDER_CAP: usize = 32;

/// A subspace of `Q^n` held as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSubspace {
    n: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RationalSubspace {
    pub fn zero(n: usize) -> Self {
        RationalSubspace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &(&c * r);
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Rational::is_zero)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.n, "vector length");
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip().expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = &*x * &inv;
        }
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    if !y.is_zero() {
                        *x -= &(&c * y);
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        true
    }

    pub fn is_subspace_of(&self, other: &RationalSubspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Checks the stored basis is in reduced echelon form.
    pub fn is_reduced(&self) -> bool {
        self.pivots.windows(2).all(|w| w[0] < w[1])
            && self.rows.iter().zip(&self.pivots).enumerate().all(|(i, (row, &p))| {
                row[..p].iter().all(Rational::is_zero)
                    && row[p].is_one()
                    && self.rows.iter().enumerate().all(|(j, other)| j == i || other[p].is_zero())
            })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "pivots": self.pivots,
            "basis": self.rows.iter().map(|r| r.iter().map(Rational::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn check_order(l: &CayleyLoop) -> Result<()> {
    if l.order() > LINEAR_ORDER_CAP {
        return Err(Error::InvalidParameter(format!(
            "loop order {} exceeds the linear algebra cap {LINEAR_ORDER_CAP}",
            l.order()
        )));
    }
    Ok(())
}

/// Powers `I, I^2, .., I^{n_max}` of the augmentation ideal of `Q L`.
pub fn ideal_powers(l: &CayleyLoop, n_max: usize) -> Result<Vec<RationalSubspace>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    check_order(l)?;
    let n = l.order();
    let mut first = RationalSubspace::zero(n);
    for x in 1..n {
        first.insert(&l.minus_one(&x));
    }
    let mut powers = vec![first];
    for k in 2..=n_max {
        let prev_dim = powers[k - 2].dim();
        let mut next = RationalSubspace::zero(n);
        'pairs: for p in 1..k {
            let q = k - p;
            for a in powers[p - 1].basis() {
                for b in powers[q - 1].basis() {
                    next.insert(&l.alg_mul(a, b)?);
                    if next.dim() == prev_dim {
                        break 'pairs;
                    }
                }
            }
        }
        powers.push(next);
    }
    Ok(powers)
}

/// `D_k = { x : x - 1 in I^k }` for `k = 1..=n_max`.
pub fn dimension_subloops(l: &CayleyLoop, n_max: usize) -> Result<Vec<Subloop>> {
    Ok(ideal_powers(l, n_max)?.iter().map(|ik| dimension_subloop(l, ik)).collect())
}

/// `{ x : x - 1 in ik }`.
pub fn dimension_subloop(l: &CayleyLoop, ik: &RationalSubspace) -> Subloop {
    let mask: Vec<bool> = l.elements().map(|x| ik.contains(&l.minus_one(&x))).collect();
    Subloop::from_mask(&mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_loop::{corpus, corpus_loop, normal_closure};
    use proptest::prelude::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn echelon_basics() {
        let mut s = RationalSubspace::zero(3);
        assert!(s.insert(&q(&[0, 2, 4])));
        assert!(s.insert(&q(&[1, 1, 1])));
        assert!(!s.insert(&q(&[1, 2, 3])));
        assert_eq!(s.dim(), 2);
        assert!(s.is_reduced());
        assert!(s.contains(&q(&[2, 0, -2])));
        assert!(!s.contains(&q(&[0, 0, 1])));
    }

    #[test]
    fn trivial_and_z2() {
        let t = corpus_loop("trivial").unwrap();
        let p = ideal_powers(&t, 3).unwrap();
        assert!(p.iter().all(|s| s.dim() == 0));
        assert!(dimension_subloops(&t, 3).unwrap().iter().all(Subloop::is_trivial));
        let z2 = corpus_loop("z2").unwrap();
        let p = ideal_powers(&z2, 3).unwrap();
        assert_eq!(p.iter().map(RationalSubspace::dim).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn powers_are_idempotent_and_descending() {
        for (name, l) in corpus() {
            let p = ideal_powers(&l, 4).unwrap();
            assert_eq!(p[0].dim(), l.order() - 1, "{name}");
            for w in p.windows(2) {
                assert!(w[1].is_subspace_of(&w[0]), "{name}");
                assert_eq!(w[1].dim(), w[0].dim(), "{name}");
            }
            assert!(p.iter().all(RationalSubspace::is_reduced));
            for d in dimension_subloops(&l, 3).unwrap() {
                assert_eq!(d, Subloop::whole(&l), "{name}");
            }
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let big = CayleyLoop::cyclic(33).unwrap();
        assert!(ideal_powers(&big, 2).is_err());
        assert!(normal_closure(&big, &[1]).is_ok());
    }

    proptest! {
        #[test]
        fn span_membership_is_exact(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..5), coefs in prop::collection::vec(-3i64..4, 5)) {
            let mut s = RationalSubspace::zero(4);
            for r in &rows {
                s.insert(&q(r));
            }
            prop_assert!(s.is_reduced());
            let mut combo = vec![Rational::zero(); 4];
            for (r, c) in rows.iter().zip(&coefs) {
                for (x, y) in combo.iter_mut().zip(q(r)) {
                    *x += &(&y * &Rational::from_i64(*c));
                }
            }
            prop_assert!(s.contains(&combo));
            for r in &rows {
                prop_assert!(s.contains(&q(r)));
            }
        }
    }
}
