//! Valuation checks for the multilinearity of brackets and the regularity of
//! deviations derived from loop words.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::brackets::{associator, commutator, derived_deviation, enumerate_brackets, hierarchy_deviation, BaseOp, DeviationIndices};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesContext, Valuation};
use crate::terms::{eval_term, LoopTerm};

#[derive(Clone, Debug)]
pub struct ResidueCheck {
    pub name: String,
    pub valuation: Valuation,
    /// The valuation the check requires (capped at `order + 1`).
    pub bound: u32,
    pub pass: bool,
}

impl ResidueCheck {
    fn new(name: String, residue: &Series, bound: u32) -> Self {
        let order = residue.order();
        let valuation = residue.sub(&Series::one(order)).nu();
        let bound = bound.min(order + 1);
        ResidueCheck { name, valuation, bound, pass: valuation.certifies(bound, order) }
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "valuation": self.valuation.degree(), "bound": self.bound, "pass": self.pass })
    }
}

/// Hands out elements with known valuation built on fresh generators.
pub(crate) struct Fresh<'c> {
    ctx: &'c SeriesContext,
    next: u32,
}

impl<'c> Fresh<'c> {
    pub(crate) fn new(ctx: &'c SeriesContext) -> Self {
        Fresh { ctx, next: 1 }
    }

    fn gens(&mut self, n: u32) -> Vec<Series> {
        let v = (self.next..self.next + n).map(|i| self.ctx.x(i)).collect();
        self.next += n;
        v
    }

    /// An element whose `x - 1` has valuation exactly `d` (for `d <= order`):
    /// a generator, a commutator, an associator, or a left-normed commutator.
    pub(crate) fn element(&mut self, d: u32) -> Result<Series> {
        let g = self.gens(d);
        match d {
            0 => Err(Error::InvalidParameter("degrees must be positive".into())),
            1 => Ok(g[0].clone()),
            3 => associator(&g[0], &g[1], &g[2], self.ctx),
            _ => g[1..].iter().try_fold(g[0].clone(), |acc, x| commutator(&acc, x, self.ctx)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MultilinearityReport {
    pub degrees: [u32; 3],
    pub order: u32,
    pub checks: Vec<ResidueCheck>,
    pub pass: bool,
}

impl MultilinearityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "multilinearity",
            "degrees": self.degrees,
            "order": self.order,
            "pass": self.pass,
            "checks": self.checks.iter().map(ResidueCheck::to_json).collect::<Vec<_>>(),
        })
    }
}

/// With `a`, `b`, `c` of valuations `p`, `q`, `r`, checks that splitting one
/// argument of a commutator, associator or level-one deviation into a product
/// `ab` changes the value only from degree `p + q + r` (plus the degrees of
/// any remaining arguments) on.
pub fn verify_multilinearity(p: u32, q: u32, r: u32, order: u32) -> Result<MultilinearityReport> {
    if p == 0 || q == 0 || r == 0 {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    if order < p + q + r {
        return Err(Error::InvalidParameter(format!("order {order} is below p + q + r = {}", p + q + r)));
    }
    let ctx = SeriesContext::new(order);
    let mut checks = Vec::new();
    let base = p + q + r;

    let mut fresh = Fresh::new(&ctx);
    let (a, b, c) = (fresh.element(p)?, fresh.element(q)?, fresh.element(r)?);
    let left = commutator(&a, &c, &ctx)?.mul(&commutator(&b, &c, &ctx)?)?.left_div(&commutator(&a.mul(&b)?, &c, &ctx)?)?;
    checks.push(ResidueCheck::new("commutator, first argument".into(), &left, base));
    let right = commutator(&a, &b, &ctx)?.mul(&commutator(&a, &c, &ctx)?)?.left_div(&commutator(&a, &b.mul(&c)?, &ctx)?)?;
    checks.push(ResidueCheck::new("commutator, second argument".into(), &right, base));

    // Split argument `var` of a base-level or level-one operation: the split
    // pair gets degrees p, q, the first other argument r, the rest degree 1.
    for level in 0..=1usize {
        for idx in DeviationIndices::all(BaseOp::Associator, level) {
            let arity = level + 3;
            for var in 1..=arity {
                let mut fresh = Fresh::new(&ctx);
                let mut args = Vec::with_capacity(arity + 1);
                let mut total = p + q;
                let mut used_c = false;
                for pos in 1..=arity {
                    if pos == var {
                        args.push(fresh.element(p)?);
                        args.push(fresh.element(q)?);
                    } else if !used_c {
                        used_c = true;
                        args.push(fresh.element(r)?);
                        total += r;
                    } else {
                        args.push(fresh.element(1)?);
                        total += 1;
                    }
                }
                let phi = |x: &[Series]| hierarchy_deviation(BaseOp::Associator, &idx, x, &ctx);
                let dev = derived_deviation(&ctx, phi, arity, var)?;
                let residue = dev(&args)?;
                let name = if level == 0 {
                    format!("associator, argument {var}")
                } else {
                    format!("deviation ({idx}), argument {var}")
                };
                checks.push(ResidueCheck::new(name, &residue, total));
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(MultilinearityReport { degrees: [p, q, r], order, checks, pass })
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub word: LoopTerm,
    pub var: usize,
    pub degrees: Vec<u32>,
    pub order: u32,
    /// Whether the word itself respects the degrees (both ways of reading the split pair).
    pub precondition: bool,
    pub deviation: ResidueCheck,
    pub pass: bool,
}

impl RegularityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "check": "regularity",
            "word": self.word.to_string(),
            "var": self.var,
            "degrees": self.degrees,
            "order": self.order,
            "precondition": self.precondition,
            "deviation": self.deviation.to_json(),
            "pass": self.pass,
        })
    }
}

/// For a word `w` in `k` generators, checks that the deviation of `w` with
/// respect to generator `var`, evaluated on elements of valuations
/// `degrees` (length `k + 1`), has valuation at least their sum.
pub fn verify_regularity(w: &LoopTerm, var: usize, degrees: &[u32], order: u32) -> Result<RegularityReport> {
    let k = degrees.len().checked_sub(1).filter(|k| *k >= 1).ok_or_else(|| Error::InvalidParameter("need at least two degrees".into()))?;
    if (w.max_generator() as usize) > k {
        return Err(Error::UnboundGenerator(w.max_generator()));
    }
    if var == 0 || var > k {
        return Err(Error::InvalidParameter(format!("variable {var} out of range 1..={k}")));
    }
    let total: u32 = degrees.iter().sum();
    if order < total {
        return Err(Error::InvalidParameter(format!("order {order} is below the total degree {total}")));
    }
    let ctx = SeriesContext::new(order);
    let phi = |x: &[Series]| eval_term(w, &ctx, x);

    let mut precondition = true;
    for pick in [var - 1, var] {
        let mut fresh = Fresh::new(&ctx);
        let profile: Vec<u32> = (0..=k).filter(|&j| j != if pick == var - 1 { var } else { var - 1 }).map(|j| degrees[j]).collect();
        let args = profile.iter().map(|&d| fresh.element(d)).collect::<Result<Vec<_>>>()?;
        let v = phi(&args)?;
        let need: u32 = profile.iter().sum::<u32>().min(order + 1);
        precondition &= v.sub(&Series::one(order)).nu().certifies(need, order);
    }

    let mut fresh = Fresh::new(&ctx);
    let args = degrees.iter().map(|&d| fresh.element(d)).collect::<Result<Vec<_>>>()?;
    let dev = derived_deviation(&ctx, phi, k, var)?;
    let value = dev(&args)?;
    let deviation = ResidueCheck::new(format!("deviation of {w} in x{var}"), &value, total);
    let pass = precondition && deviation.pass;
    Ok(RegularityReport { word: w.clone(), var, degrees: degrees.to_vec(), order, precondition, deviation, pass })
}

/// A random word in `x1..xk` respecting the filtration: products and
/// quotients of bracket words, each bracket using every generator once.
pub fn random_regular_word<R: Rng>(rng: &mut R, k: usize, depth: usize) -> Result<LoopTerm> {
    if depth == 0 || rng.gen_bool(0.4) {
        let brackets = enumerate_brackets(k.max(2), k.max(2))?;
        let b = brackets.choose(rng).expect("nonempty");
        let mut gens: Vec<LoopTerm> = (1..=k as u32).map(LoopTerm::gen).collect();
        gens.shuffle(rng);
        if k == 1 {
            return Ok(LoopTerm::gen(1));
        }
        return b.to_term(&gens);
    }
    let l = random_regular_word(rng, k, depth - 1)?;
    let r = random_regular_word(rng, k, depth - 1)?;
    Ok(match rng.gen_range(0..3) {
        0 => LoopTerm::mul(l, r),
        1 => LoopTerm::ldiv(l, r),
        _ => LoopTerm::rdiv(l, r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fresh_elements_have_exact_valuation() {
        let ctx = SeriesContext::new(5);
        let mut f = Fresh::new(&ctx);
        for d in 1..=5 {
            let e = f.element(d).unwrap();
            assert_eq!(e.sub(&Series::one(5)).nu(), Valuation::Degree(d), "degree {d}");
        }
    }

    #[test]
    fn multilinearity_unit_degrees() {
        let r = verify_multilinearity(1, 1, 1, 3).unwrap();
        assert!(r.pass, "{:?}", r.checks);
        assert_eq!(r.checks.len(), 2 + 3 + 12);
        let r = verify_multilinearity(1, 1, 2, 4).unwrap();
        assert!(r.pass);
        assert!(verify_multilinearity(1, 1, 1, 2).is_err());
    }

    #[test]
    fn commutator_residue_with_identity_is_trivial() {
        let ctx = SeriesContext::new(4);
        let comm = |x: &[Series]| commutator(&x[0], &x[1], &ctx);
        let dev = derived_deviation(&ctx, comm, 2, 1).unwrap();
        let v = dev(&[Series::one(4), ctx.x(1), ctx.x(2)]).unwrap();
        assert_eq!(v, Series::one(4));
    }

    #[test]
    fn regularity_examples() {
        let comm = parse_term("((x2*x1)\\(x1*x2))").unwrap();
        let r = verify_regularity(&comm, 1, &[1, 1, 1], 3).unwrap();
        assert!(r.pass && r.precondition);
        let id = LoopTerm::gen(1);
        let r = verify_regularity(&id, 1, &[1, 2], 3).unwrap();
        assert!(r.pass);
        assert_eq!(r.deviation.valuation, Valuation::ExceedsOrder);
        let assoc = parse_term("((x1*(x2*x3))\\((x1*x2)*x3))").unwrap();
        let r = verify_regularity(&assoc, 2, &[1, 1, 1, 1], 4).unwrap();
        assert!(r.pass);
        // x1*x2 is not filtration respecting
        let r = verify_regularity(&parse_term("(x1*x2)").unwrap(), 1, &[1, 1, 1], 3).unwrap();
        assert!(!r.precondition && !r.pass);
    }

    #[test]
    fn random_words_are_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let w = random_regular_word(&mut rng, 2, 2).unwrap();
            let r = verify_regularity(&w, 1, &[1, 1, 1], 3).unwrap();
            assert!(r.pass, "{w}");
        }
    }
}
