//! Leading terms of loop words and the operations brackets induce on the
//! associated graded algebra of the free loop algebra.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::brackets::{enumerate_brackets, BracketExpr};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::{is_primitive, Monomial, Series, SeriesContext, Valuation};
use crate::terms::{GeneratorId, LoopTerm};

/// A homogeneous polynomial of a fixed degree in the `u_i`.
#[derive(Clone, PartialEq)]
pub struct HomogeneousElement {
    degree: u32,
    poly: Series,
}

impl HomogeneousElement {
    pub fn zero(degree: u32) -> Self {
        HomogeneousElement { degree, poly: Series::zero(degree) }
    }

    /// Wraps a series all of whose terms have degree `degree`.
    pub fn new(degree: u32, s: &Series) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("homogeneous elements have positive degree".into()));
        }
        match s.homogeneous_degree() {
            Some(None) => {}
            Some(Some(d)) if d == degree => {}
            _ => return Err(Error::InvalidParameter(format!("series is not homogeneous of degree {degree}"))),
        }
        if s.order() < degree {
            return Err(Error::InvalidParameter(format!("series of order {} cannot hold degree {degree}", s.order())));
        }
        Ok(HomogeneousElement { degree, poly: s.homogeneous(degree).with_order(degree) })
    }

    /// `-u_i`, the class of the generator `x_i`.
    pub fn generator(i: u32) -> Result<Self> {
        let g = GeneratorId::new(i)?;
        HomogeneousElement::new(1, &Series::u(g, 1).neg())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The polynomial, as a series truncated at its own degree.
    pub fn series(&self) -> &Series {
        &self.poly
    }

    /// The polynomial as a series of a larger order.
    pub fn at_order(&self, order: u32) -> Series {
        self.poly.with_order(order)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.poly.coefficient(m)
    }

    pub fn terms(&self) -> Vec<(Monomial, Rational)> {
        self.poly.sorted_terms()
    }

    fn same_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::InvalidParameter(format!("degrees differ: {} vs {}", self.degree, other.degree)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        Ok(HomogeneousElement { degree: self.degree, poly: self.poly.add(&other.poly) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        Ok(HomogeneousElement { degree: self.degree, poly: self.poly.sub(&other.poly) })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HomogeneousElement { degree: self.degree, poly: self.poly.scale(c) }
    }

    /// Image under `f` applied to every monomial; `f` must preserve degree.
    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Option<(Monomial, Rational)>) -> Self {
        HomogeneousElement { degree: self.degree, poly: self.poly.map_monomials(self.degree, f) }
    }

    pub fn is_primitive(&self) -> Result<bool> {
        is_primitive(&self.poly)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "terms": self.terms().iter().map(|(m, c)| json!({ "coef": c.to_string(), "mono": m.to_string() })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for HomogeneousElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HomogeneousElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[deg {}] {self}", self.degree)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeadingTerm {
    Homogeneous(HomogeneousElement),
    /// `w - 1` vanishes up to the truncation order.
    ExceedsOrder,
}

impl LeadingTerm {
    pub fn degree(&self) -> Option<u32> {
        match self {
            LeadingTerm::Homogeneous(h) => Some(h.degree()),
            LeadingTerm::ExceedsOrder => None,
        }
    }

    pub fn element(&self) -> Option<&HomogeneousElement> {
        match self {
            LeadingTerm::Homogeneous(h) => Some(h),
            LeadingTerm::ExceedsOrder => None,
        }
    }
}

fn leading_of(value: &Series) -> Result<LeadingTerm> {
    let order = value.order();
    let diff = value.sub(&Series::one(order));
    match diff.nu() {
        Valuation::ExceedsOrder => Ok(LeadingTerm::ExceedsOrder),
        Valuation::Degree(0) => Err(Error::NotLoopElement(diff.constant().to_string())),
        Valuation::Degree(d) => Ok(LeadingTerm::Homogeneous(HomogeneousElement::new(d, &diff.homogeneous(d))?)),
    }
}

/// Lowest nonzero homogeneous component of `w(x) - 1` in the free model of order `order`.
pub fn leading_term(w: &LoopTerm, order: u32) -> Result<LeadingTerm> {
    let ctx = SeriesContext::new(order);
    leading_of(&ctx.eval_free(w)?)
}

fn representative(h: &HomogeneousElement, order: u32) -> Series {
    Series::one(order).add(&h.at_order(order))
}

fn check_args(b: &BracketExpr, args: &[HomogeneousElement], order: u32) -> Result<u32> {
    b.validate()?;
    if args.len() != b.weight() {
        return Err(Error::Arity { expected: b.weight(), got: args.len() });
    }
    let total: u32 = args.iter().map(HomogeneousElement::degree).sum();
    if order < total {
        return Err(Error::InvalidParameter(format!("order {order} is below the total degree {total}")));
    }
    Ok(total)
}

fn induced_on(b: &BracketExpr, reps: &[Series], total: u32, ctx: &SeriesContext) -> Result<HomogeneousElement> {
    let v = b.eval(ctx, reps)?;
    let diff = v.sub(&Series::one(ctx.order()));
    if !diff.nu().certifies(total, ctx.order()) {
        return Err(Error::InvalidParameter(format!("bracket {b} lowers the degree below {total}")));
    }
    HomogeneousElement::new(total, &diff.homogeneous(total))
}

/// The degree `Σ d_i` component of `b` evaluated on the representatives
/// `1 + h_i`; zero when the value lies deeper in the filtration.
pub fn induced_op(b: &BracketExpr, args: &[HomogeneousElement], order: u32) -> Result<HomogeneousElement> {
    let total = check_args(b, args, order)?;
    let ctx = SeriesContext::new(order);
    let reps: Vec<Series> = args.iter().map(|h| representative(h, order)).collect();
    induced_on(b, &reps, total, &ctx)
}

/// A random monomial of the given degree on generators `1..=gens`.
pub fn random_monomial<R: Rng>(rng: &mut R, degree: u32, gens: u32) -> Monomial {
    if degree <= 1 {
        return Monomial::leaf(GeneratorId::new(rng.gen_range(1..=gens)).expect("positive"));
    }
    let k = rng.gen_range(1..degree);
    random_monomial(rng, k, gens).graft(&random_monomial(rng, degree - k, gens))
}

/// A random combination of monomials with degrees in `lo..=hi`.
pub fn random_series<R: Rng>(rng: &mut R, lo: u32, hi: u32, gens: u32, order: u32) -> Series {
    let mut s = Series::zero(order);
    for d in lo..=hi.min(order) {
        for _ in 0..2 {
            let c = Rational::from_i64(rng.gen_range(-3..=3));
            s.add_term(random_monomial(rng, d, gens), c);
        }
    }
    s
}

/// Recomputes `induced_op` after adding random terms of degree above `d_i`
/// to each representative; true when every trial agrees.
pub fn representative_independence(b: &BracketExpr, args: &[HomogeneousElement], order: u32, seed: u64, trials: usize) -> Result<bool> {
    let total = check_args(b, args, order)?;
    let ctx = SeriesContext::new(order);
    let expected = induced_op(b, args, order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = args.len() as u32 + 1;
    for _ in 0..trials {
        let reps: Vec<Series> =
            args.iter().map(|h| representative(h, order).add(&random_series(&mut rng, h.degree() + 1, order, gens, order))).collect();
        if induced_on(b, &reps, total, &ctx)? != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct AkivisReport {
    pub order: u32,
    /// Cyclic sum of `<<a,b>,c>`.
    pub lhs: HomogeneousElement,
    /// Alternating sum of `<a,b,c>`.
    pub rhs: HomogeneousElement,
    pub pass: bool,
}

impl AkivisReport {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "akivis",
            "order": self.order,
            "pass": self.pass,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
        })
    }
}

/// Both sides of the Akivis identity for degree-one classes `a`, `b`, `c`.
pub fn akivis_sides(a: &HomogeneousElement, b: &HomogeneousElement, c: &HomogeneousElement, order: u32) -> Result<AkivisReport> {
    if [a, b, c].iter().any(|h| h.degree() != 1) {
        return Err(Error::InvalidParameter("the Akivis check takes degree-one classes".into()));
    }
    if order < 3 {
        return Err(Error::InvalidParameter("the Akivis check needs order at least 3".into()));
    }
    let comm = BracketExpr::comm(BracketExpr::slot(1), BracketExpr::slot(2));
    let assoc = BracketExpr::assoc(BracketExpr::slot(1), BracketExpr::slot(2), BracketExpr::slot(3));
    let xs = [a, b, c];
    let mut lhs = HomogeneousElement::zero(3);
    for k in 0..3 {
        let (x, y, z) = (xs[k], xs[(k + 1) % 3], xs[(k + 2) % 3]);
        let inner = induced_op(&comm, &[x.clone(), y.clone()], order)?;
        lhs = lhs.add(&induced_op(&comm, &[inner, z.clone()], order)?)?;
    }
    let mut rhs = HomogeneousElement::zero(3);
    let perms: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    for (p, sign) in perms {
        let v = induced_op(&assoc, &[xs[p[0]].clone(), xs[p[1]].clone(), xs[p[2]].clone()], order)?;
        rhs = rhs.add(&v.scale(&Rational::from_i64(sign)))?;
    }
    let pass = lhs == rhs;
    Ok(AkivisReport { order, lhs, rhs, pass })
}

/// The Akivis identity on the classes of three free generators.
pub fn akivis_check(order: u32) -> Result<AkivisReport> {
    let g = |i| HomogeneousElement::generator(i);
    akivis_sides(&g(1)?, &g(2)?, &g(3)?, order)
}

#[derive(Clone, Debug)]
pub struct PrimitivityEntry {
    pub bracket: String,
    pub weight: usize,
    /// Degree of the leading term, if within the order.
    pub degree: Option<u32>,
    pub primitive: bool,
}

#[derive(Clone, Debug)]
pub struct PrimitivityReport {
    pub max_weight: usize,
    pub order: u32,
    pub entries: Vec<PrimitivityEntry>,
    /// Whether `u1*u2` was (wrongly) found primitive.
    pub control_primitive: bool,
    pub pass: bool,
}

impl PrimitivityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "primitivity",
            "max_weight": self.max_weight,
            "order": self.order,
            "pass": self.pass,
            "control_primitive": self.control_primitive,
            "brackets": self.entries.iter().map(|e| json!({
                "bracket": e.bracket,
                "weight": e.weight,
                "degree": e.degree,
                "primitive": e.primitive,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `u1*u2`, which is not primitive.
pub fn primitivity_control() -> Result<Series> {
    let m = Monomial::leaf(GeneratorId::new(1)?).graft(&Monomial::leaf(GeneratorId::new(2)?));
    Ok(Series::monomial(m, Rational::one(), 2))
}

/// Checks that the weight-`n` component of every enumerated bracket of
/// weight `2..=max_weight` on distinct generators is primitive.
pub fn primitivity_suite(max_weight: usize, order: u32) -> Result<PrimitivityReport> {
    if !(2..=crate::brackets::DEFAULT_WEIGHT_CAP).contains(&max_weight) {
        return Err(Error::InvalidParameter(format!("max weight {max_weight} out of range")));
    }
    let order = order.max(max_weight as u32);
    let mut brackets = Vec::new();
    for n in 2..=max_weight {
        brackets.extend(enumerate_brackets(n, max_weight)?);
    }
    let entries = brackets
        .par_iter()
        .map(|b| -> Result<PrimitivityEntry> {
            let n = b.weight() as u32;
            let lt = leading_term(&b.to_generic_term()?, order)?;
            let value = SeriesContext::new(order).eval_free(&b.to_generic_term()?)?;
            let component = value.homogeneous(n);
            Ok(PrimitivityEntry {
                bracket: b.to_string(),
                weight: b.weight(),
                degree: lt.degree(),
                primitive: is_primitive(&component)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let control_primitive = is_primitive(&primitivity_control()?)?;
    let pass = !control_primitive && entries.iter().all(|e| e.primitive);
    Ok(PrimitivityReport { max_weight, order, entries, control_primitive, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Monomial;
    use crate::terms::parse_term;
    use proptest::prelude::*;

    fn u(i: u32) -> Monomial {
        Monomial::leaf(GeneratorId::new(i).unwrap())
    }

    fn poly(d: u32, terms: &[(Monomial, i64)]) -> HomogeneousElement {
        let s = Series::from_terms(d, Rational::zero(), terms.iter().map(|(m, c)| (m.clone(), Rational::from_i64(*c))));
        HomogeneousElement::new(d, &s).unwrap()
    }

    #[test]
    fn leading_terms_of_small_words() {
        let lt = leading_term(&parse_term("x1").unwrap(), 3).unwrap();
        assert_eq!(lt, LeadingTerm::Homogeneous(poly(1, &[(u(1), -1)])));
        let comm = leading_term(&parse_term("((x2*x1)\\(x1*x2))").unwrap(), 4).unwrap();
        assert_eq!(comm, LeadingTerm::Homogeneous(poly(2, &[(u(1).graft(&u(2)), 1), (u(2).graft(&u(1)), -1)])));
        let assoc = leading_term(&parse_term("((x1*(x2*x3))\\((x1*x2)*x3))").unwrap(), 4).unwrap();
        let expect = poly(3, &[(u(1).graft(&u(2).graft(&u(3))), 1), (u(1).graft(&u(2)).graft(&u(3)), -1)]);
        assert_eq!(assoc, LeadingTerm::Homogeneous(expect));
        assert_eq!(leading_term(&LoopTerm::One, 3).unwrap(), LeadingTerm::ExceedsOrder);
        assert_eq!(format!("{}", poly(2, &[(u(1).graft(&u(2)), 1), (u(2).graft(&u(1)), -1)])), "u1*u2 - u2*u1");
    }

    #[test]
    fn homogeneous_element_rejects_mixed_degrees() {
        let s = Series::from_terms(3, Rational::zero(), [(u(1), Rational::one()), (u(1).graft(&u(2)), Rational::one())]);
        assert!(HomogeneousElement::new(1, &s).is_err());
        assert!(HomogeneousElement::new(0, &Series::zero(2)).is_err());
    }

    #[test]
    fn induced_commutator_on_generators() {
        let comm = BracketExpr::comm(BracketExpr::slot(1), BracketExpr::slot(2));
        let a = HomogeneousElement::generator(1).unwrap();
        let b = HomogeneousElement::generator(2).unwrap();
        let v = induced_op(&comm, &[a.clone(), b.clone()], 3).unwrap();
        assert_eq!(v, poly(2, &[(u(1).graft(&u(2)), 1), (u(2).graft(&u(1)), -1)]));
        let zero = induced_op(&comm, &[a.clone(), HomogeneousElement::zero(1)], 3).unwrap();
        assert!(zero.is_zero() && zero.degree() == 2);
        assert!(representative_independence(&comm, &[a, b], 4, 3, 4).unwrap());
    }

    #[test]
    fn induced_ops_are_representative_independent() {
        let a = poly(1, &[(u(1), 2), (u(2), -1)]);
        let b = poly(2, &[(u(1).graft(&u(3)), 1)]);
        let c = poly(1, &[(u(3), 1)]);
        let assoc = BracketExpr::assoc(BracketExpr::slot(1), BracketExpr::slot(2), BracketExpr::slot(3));
        assert!(representative_independence(&assoc, &[a.clone(), b.clone(), c.clone()], 5, 11, 3).unwrap());
        for br in enumerate_brackets(3, 3).unwrap() {
            assert!(representative_independence(&br, &[a.clone(), c.clone(), a.clone()], 4, 5, 2).unwrap(), "{br}");
        }
    }

    #[test]
    fn akivis_holds_and_is_consistent() {
        for order in 3..=5 {
            let r = akivis_check(order).unwrap();
            assert!(r.pass, "order {order}");
            assert!(!r.lhs.is_zero());
        }
        // a = b: both sides still agree
        let a = HomogeneousElement::generator(1).unwrap();
        let c = HomogeneousElement::generator(2).unwrap();
        let r = akivis_sides(&a, &a, &c, 3).unwrap();
        assert!(r.pass);
        assert!(akivis_check(2).is_err());
    }

    #[test]
    fn akivis_reduces_to_jacobi_when_associative() {
        // flatten every monomial to its right-normed word, which kills associators
        let flat = |m: &Monomial| Some((Monomial::right_normed(&m.leaves()), Rational::one()));
        let r = akivis_check(3).unwrap();
        assert!(r.rhs.map_monomials(flat).is_zero());
        assert!(r.lhs.map_monomials(flat).is_zero());
    }

    #[test]
    fn primitivity_of_brackets() {
        let r = primitivity_suite(3, 3).unwrap();
        assert!(r.pass);
        assert!(!r.control_primitive);
        assert!(r.entries.iter().all(|e| e.degree == Some(e.weight as u32)));
        assert!(primitivity_suite(1, 3).is_err());
    }

    proptest! {
        #[test]
        fn induced_commutator_is_additive(c in prop::collection::vec(-3i64..4, 6)) {
            let comm = BracketExpr::comm(BracketExpr::slot(1), BracketExpr::slot(2));
            let a1 = poly(1, &[(u(1), c[0]), (u(2), c[1])]);
            let a2 = poly(1, &[(u(2), c[2]), (u(3), c[3])]);
            let b = poly(1, &[(u(1), c[4]), (u(3), c[5])]);
            let sum = induced_op(&comm, &[a1.add(&a2).unwrap(), b.clone()], 3).unwrap();
            let parts = induced_op(&comm, &[a1.clone(), b.clone()], 3).unwrap().add(&induced_op(&comm, &[a2.clone(), b.clone()], 3).unwrap()).unwrap();
            prop_assert_eq!(&sum, &parts);
            let sum = induced_op(&comm, &[b.clone(), a1.add(&a2).unwrap()], 3).unwrap();
            let parts = induced_op(&comm, &[b.clone(), a1], 3).unwrap().add(&induced_op(&comm, &[b, a2], 3).unwrap()).unwrap();
            prop_assert_eq!(sum, parts);
        }
    }
}
