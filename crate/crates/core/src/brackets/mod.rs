//! Commutators, associators and their deviations.
//!
//! A deviation of level `l` with indices `α_1..α_l` measures how far the
//! level-`(l-1)` deviation is from being multiplicative in argument `α_l`:
//! it is `(A(a_α) A(a_{α+1})) \ A(a_α a_{α+1})`, where `A` is the previous
//! level with the product spliced into position `α = α_l`.

mod cache;
mod expr;
mod pi;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cache::DeviationCache;
pub use expr::{enumerate_brackets, BracketExpr, DEFAULT_WEIGHT_CAP};
pub use pi::{decompose, decompose_anti_associator, decompose_associator, decompose_commutator, PiDecomposition, PiLeaf, ProductTree, Variable};

use crate::context::LoopContext;
use crate::error::{Error, Result};
use crate::terms::LoopTerm;

/// The level-0 operation a deviation hierarchy is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseOp {
    #[serde(rename = "assoc")]
    Associator,
    #[serde(rename = "antiassoc")]
    AntiAssociator,
    #[serde(rename = "comm")]
    Commutator,
}

impl BaseOp {
    pub fn arity(self) -> usize {
        match self {
            BaseOp::Commutator => 2,
            BaseOp::Associator | BaseOp::AntiAssociator => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseOp::Associator => "assoc",
            BaseOp::AntiAssociator => "antiassoc",
            BaseOp::Commutator => "comm",
        }
    }

    /// Evaluates the level-0 operation. Panics if `args.len() != self.arity()`.
    pub fn apply<C: LoopContext>(self, args: &[C::Elem], ctx: &C) -> Result<C::Elem> {
        match self {
            BaseOp::Commutator => commutator(&args[0], &args[1], ctx),
            BaseOp::Associator => associator(&args[0], &args[1], &args[2], ctx),
            BaseOp::AntiAssociator => anti_associator(&args[0], &args[1], &args[2], ctx),
        }
    }

    /// The level-0 operation as a word in the given terms.
    pub fn apply_term(self, args: &[LoopTerm]) -> LoopTerm {
        let m = |a: &LoopTerm, b: &LoopTerm| LoopTerm::mul(a.clone(), b.clone());
        match self {
            BaseOp::Commutator => LoopTerm::ldiv(m(&args[1], &args[0]), m(&args[0], &args[1])),
            BaseOp::Associator => {
                LoopTerm::ldiv(m(&args[0], &m(&args[1], &args[2])), m(&m(&args[0], &args[1]), &args[2]))
            }
            BaseOp::AntiAssociator => {
                LoopTerm::ldiv(m(&m(&args[0], &args[1]), &args[2]), m(&args[0], &m(&args[1], &args[2])))
            }
        }
    }
}

impl fmt::Display for BaseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BaseOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assoc" => Ok(BaseOp::Associator),
            "antiassoc" => Ok(BaseOp::AntiAssociator),
            "comm" => Ok(BaseOp::Commutator),
            _ => Err(Error::InvalidParameter(format!("unknown base operation {s:?}"))),
        }
    }
}

/// Deviation indices `α_1..α_l` (1-based argument positions).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeviationIndices(Vec<usize>);

impl DeviationIndices {
    /// Level-0 (no indices).
    pub fn empty() -> Self {
        DeviationIndices(Vec::new())
    }

    /// Validates `0 < α_i <= i + 2`, the bound for three-argument bases.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let idx = DeviationIndices(indices);
        idx.check(BaseOp::Associator)?;
        Ok(idx)
    }

    /// Validates the indices for `base`: `0 < α_i <= i + arity - 1`.
    pub fn check(&self, base: BaseOp) -> Result<()> {
        for (i, &a) in self.0.iter().enumerate() {
            let bound = i + base.arity();
            if a == 0 || a > bound {
                return Err(Error::InvalidIndices {
                    indices: self.0.clone(),
                    reason: format!("index {} is {a}, must lie in 1..={bound} for base {base}", i + 1),
                });
            }
        }
        Ok(())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Appends a new index, producing the next level.
    pub fn push(&self, alpha: usize) -> Self {
        let mut v = self.0.clone();
        v.push(alpha);
        DeviationIndices(v)
    }

    /// Drops the last index.
    pub fn parent(&self) -> Option<(Self, usize)> {
        let (&last, init) = self.0.split_last()?;
        Some((DeviationIndices(init.to_vec()), last))
    }

    /// Every valid index sequence of the given level for `base`, lexicographically.
    pub fn all(base: BaseOp, level: usize) -> Vec<DeviationIndices> {
        let mut out = vec![Vec::new()];
        for i in 0..level {
            let bound = i + base.arity();
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    (1..=bound).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(DeviationIndices).collect()
    }
}

impl fmt::Display for DeviationIndices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `[a, b] = (ba) \ (ab)`.
pub fn commutator<C: LoopContext>(a: &C::Elem, b: &C::Elem, ctx: &C) -> Result<C::Elem> {
    ctx.ldiv(&ctx.mul(b, a)?, &ctx.mul(a, b)?)
}

/// `(a, b, c) = (a(bc)) \ ((ab)c)`.
pub fn associator<C: LoopContext>(a: &C::Elem, b: &C::Elem, c: &C::Elem, ctx: &C) -> Result<C::Elem> {
    ctx.ldiv(&ctx.mul(a, &ctx.mul(b, c)?)?, &ctx.mul(&ctx.mul(a, b)?, c)?)
}

/// `(a, b, c)' = ((ab)c) \ (a(bc))`.
pub fn anti_associator<C: LoopContext>(a: &C::Elem, b: &C::Elem, c: &C::Elem, ctx: &C) -> Result<C::Elem> {
    ctx.ldiv(&ctx.mul(&ctx.mul(a, b)?, c)?, &ctx.mul(a, &ctx.mul(b, c)?)?)
}

/// Associator deviation of level `idx.level()` on `level + 3` arguments.
pub fn deviation<C: LoopContext>(args: &[C::Elem], idx: &DeviationIndices, ctx: &C) -> Result<C::Elem> {
    hierarchy_deviation(BaseOp::Associator, idx, args, ctx)
}

/// Deviation of the hierarchy built on `base`.
pub fn hierarchy_deviation<C: LoopContext>(base: BaseOp, idx: &DeviationIndices, args: &[C::Elem], ctx: &C) -> Result<C::Elem> {
    idx.check(base)?;
    let expected = idx.level() + base.arity();
    if args.len() != expected {
        return Err(Error::Arity { expected, got: args.len() });
    }
    deviation_unchecked(base, idx.as_slice(), args, ctx)
}

fn deviation_unchecked<C: LoopContext>(base: BaseOp, idx: &[usize], args: &[C::Elem], ctx: &C) -> Result<C::Elem> {
    let Some((&alpha, lower)) = idx.split_last() else {
        return base.apply(args, ctx);
    };
    let (x, y) = (&args[alpha - 1], &args[alpha]);
    let with = |v: C::Elem| -> Result<C::Elem> {
        let mut a: Vec<C::Elem> = Vec::with_capacity(args.len() - 1);
        a.extend_from_slice(&args[..alpha - 1]);
        a.push(v);
        a.extend_from_slice(&args[alpha + 1..]);
        deviation_unchecked(base, lower, &a, ctx)
    };
    let fx = with(x.clone())?;
    let fy = with(y.clone())?;
    let fxy = with(ctx.mul(x, y)?)?;
    ctx.ldiv(&ctx.mul(&fx, &fy)?, &fxy)
}

/// The deviation of a `k`-ary function `phi` with respect to argument `var`
/// (1-based): a `(k+1)`-ary function `(.., x, y, ..) -> (phi(..x..) phi(..y..)) \ phi(..xy..)`.
pub fn derived_deviation<'a, C, F>(ctx: &'a C, phi: F, arity: usize, var: usize) -> Result<impl Fn(&[C::Elem]) -> Result<C::Elem> + 'a>
where
    C: LoopContext,
    F: Fn(&[C::Elem]) -> Result<C::Elem> + 'a,
{
    if var == 0 || var > arity {
        return Err(Error::InvalidParameter(format!("variable {var} out of range 1..={arity}")));
    }
    Ok(move |args: &[C::Elem]| {
        if args.len() != arity + 1 {
            return Err(Error::Arity { expected: arity + 1, got: args.len() });
        }
        let splice = |v: C::Elem| {
            let mut a = args[..var - 1].to_vec();
            a.push(v);
            a.extend_from_slice(&args[var + 1..]);
            a
        };
        let (x, y) = (&args[var - 1], &args[var]);
        let fx = phi(&splice(x.clone()))?;
        let fy = phi(&splice(y.clone()))?;
        let fxy = phi(&splice(ctx.mul(x, y)?))?;
        ctx.ldiv(&ctx.mul(&fx, &fy)?, &fxy)
    })
}

/// Word for the deviation on the given argument terms.
pub fn deviation_term(base: BaseOp, idx: &DeviationIndices, args: &[LoopTerm]) -> Result<LoopTerm> {
    idx.check(base)?;
    let expected = idx.level() + base.arity();
    if args.len() != expected {
        return Err(Error::Arity { expected, got: args.len() });
    }
    Ok(deviation_term_unchecked(base, idx.as_slice(), args))
}

fn deviation_term_unchecked(base: BaseOp, idx: &[usize], args: &[LoopTerm]) -> LoopTerm {
    let Some((&alpha, lower)) = idx.split_last() else {
        return base.apply_term(args);
    };
    let with = |v: LoopTerm| {
        let mut a = args[..alpha - 1].to_vec();
        a.push(v);
        a.extend_from_slice(&args[alpha + 1..]);
        deviation_term_unchecked(base, lower, &a)
    };
    let (x, y) = (&args[alpha - 1], &args[alpha]);
    let fx = with(x.clone());
    let fy = with(y.clone());
    let fxy = with(LoopTerm::mul(x.clone(), y.clone()));
    LoopTerm::ldiv(LoopTerm::mul(fx, fy), fxy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Series, SeriesContext};
    use crate::terms::{eval_term, parse_term};

    #[test]
    fn index_bounds() {
        assert!(DeviationIndices::new(vec![3]).is_ok());
        assert!(DeviationIndices::new(vec![4]).is_err());
        assert!(DeviationIndices::new(vec![0]).is_err());
        assert!(DeviationIndices::new(vec![1, 4]).is_ok());
        assert!(DeviationIndices::new(vec![3]).unwrap().check(BaseOp::Commutator).is_err());
        assert!(DeviationIndices::new(vec![2]).unwrap().check(BaseOp::Commutator).is_ok());
        assert_eq!(DeviationIndices::all(BaseOp::Associator, 2).len(), 12);
        assert_eq!(DeviationIndices::all(BaseOp::Commutator, 2).len(), 6);
    }

    #[test]
    fn series_leading_terms() {
        let n = 3;
        let ctx = SeriesContext::new(n);
        let (a, b, c) = (ctx.x(1), ctx.x(2), ctx.x(3));
        let one = Series::one(n);
        let comm = commutator(&a, &b, &ctx).unwrap();
        let (u1, u2, u3) = (ctx.u(1), ctx.u(2), ctx.u(3));
        let ab = u1.mul(&u2).unwrap().sub(&u2.mul(&u1).unwrap());
        assert_eq!(comm.sub(&one).homogeneous(2), ab);
        assert_eq!(comm.sub(&one).homogeneous(1), Series::zero(n));
        let assoc = associator(&a, &b, &c, &ctx).unwrap();
        let lead = u1.mul(&u2.mul(&u3).unwrap()).unwrap().sub(&u1.mul(&u2).unwrap().mul(&u3).unwrap());
        assert_eq!(assoc.sub(&one), lead);
        let anti = anti_associator(&a, &b, &c, &ctx).unwrap();
        assert_eq!(anti.sub(&one), lead.neg());
        assert_eq!(commutator(&a, &one, &ctx).unwrap(), one);
        assert_eq!(associator(&a, &b, &one, &ctx).unwrap(), one);
    }

    #[test]
    fn level_one_expansion_matches_definition() {
        // (a,b,c,d)_2 = ((a,b,d)(a,c,d)) \ (a,bc,d)
        let ctx = SeriesContext::new(5);
        let x: Vec<Series> = (1..=4).map(|i| ctx.x(i)).collect();
        let dev = deviation(&x, &DeviationIndices::new(vec![2]).unwrap(), &ctx).unwrap();
        let abd = associator(&x[0], &x[1], &x[3], &ctx).unwrap();
        let acd = associator(&x[0], &x[2], &x[3], &ctx).unwrap();
        let bc = x[1].mul(&x[2]).unwrap();
        let abcd = associator(&x[0], &bc, &x[3], &ctx).unwrap();
        assert_eq!(dev, abd.mul(&acd).unwrap().left_div(&abcd).unwrap());
        assert!(dev.sub(&Series::one(5)).nu().certifies(4, 5));
    }

    #[test]
    fn deviations_vanish_on_identity_argument() {
        let ctx = SeriesContext::new(5);
        for base in [BaseOp::Associator, BaseOp::AntiAssociator, BaseOp::Commutator] {
            for idx in DeviationIndices::all(base, 2) {
                let k = idx.level() + base.arity();
                for hole in 0..k {
                    let args: Vec<Series> = (0..k).map(|i| if i == hole { Series::one(5) } else { ctx.x(i as u32 + 1) }).collect();
                    assert_eq!(hierarchy_deviation(base, &idx, &args, &ctx).unwrap(), Series::one(5), "{base} {idx} hole {hole}");
                }
            }
        }
    }

    #[test]
    fn level_two_and_hierarchies_respect_degree() {
        let ctx = SeriesContext::new(5);
        let x: Vec<Series> = (1..=5).map(|i| ctx.x(i)).collect();
        let dev = deviation(&x, &DeviationIndices::new(vec![1, 3]).unwrap(), &ctx).unwrap();
        assert!(dev.sub(&Series::one(5)).nu().certifies(5, 5));
        let anti = hierarchy_deviation(BaseOp::AntiAssociator, &DeviationIndices::new(vec![2]).unwrap(), &x[..4], &ctx).unwrap();
        assert!(anti.sub(&Series::one(5)).nu().certifies(4, 5));
        let err = hierarchy_deviation(BaseOp::Associator, &DeviationIndices::empty(), &x[..2], &ctx).unwrap_err();
        assert_eq!(err, Error::Arity { expected: 3, got: 2 });
    }

    #[test]
    fn derived_deviation_of_associator_is_level_one() {
        let ctx = SeriesContext::new(4);
        let x: Vec<Series> = (1..=4).map(|i| ctx.x(i)).collect();
        let assoc = |a: &[Series]| associator(&a[0], &a[1], &a[2], &ctx);
        for var in 1..=3 {
            let d = derived_deviation(&ctx, assoc, 3, var).unwrap();
            let expected = deviation(&x, &DeviationIndices::new(vec![var]).unwrap(), &ctx).unwrap();
            assert_eq!(d(&x).unwrap(), expected);
        }
        assert!(derived_deviation(&ctx, assoc, 3, 4).is_err());
    }

    #[test]
    fn derived_deviation_of_commutator_respects_degree() {
        let ctx = SeriesContext::new(4);
        let one = Series::one(4);
        // generators of degree 1, 1 and a commutator of degree 2
        let a = ctx.x(1);
        let b = ctx.x(2);
        let c = commutator(&ctx.x(3), &ctx.x(4), &ctx).unwrap();
        let comm = |v: &[Series]| commutator(&v[0], &v[1], &ctx);
        let d = derived_deviation(&ctx, comm, 2, 1).unwrap();
        let v = d(&[a, b, c]).unwrap();
        assert!(v.sub(&one).nu().certifies(4, 4));
    }

    #[test]
    fn terms_agree_with_direct_evaluation() {
        let ctx = SeriesContext::new(5);
        let x: Vec<Series> = (1..=5).map(|i| ctx.x(i)).collect();
        let gens: Vec<LoopTerm> = (1..=5).map(LoopTerm::gen).collect();
        for base in [BaseOp::Associator, BaseOp::AntiAssociator, BaseOp::Commutator] {
            for idx in DeviationIndices::all(base, 1) {
                let k = idx.level() + base.arity();
                let t = deviation_term(base, &idx, &gens[..k]).unwrap();
                assert_eq!(eval_term(&t, &ctx, &x).unwrap(), hierarchy_deviation(base, &idx, &x[..k], &ctx).unwrap());
            }
        }
        let t = deviation_term(BaseOp::Commutator, &DeviationIndices::empty(), &gens[..2]).unwrap();
        assert_eq!(t, parse_term("((x2*x1)\\(x1*x2))").unwrap());
    }
}
