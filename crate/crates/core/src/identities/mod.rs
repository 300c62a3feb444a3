//! Exact verification of the bracket-expansion formulas.
//!
//! Each formula expresses a difference of two parenthesizations of products
//! of `1 - x` terms as a sum over subsets `S` of the leaves of a bracket
//! decomposition: a signed coefficient times the product `P_S` obtained from
//! the decomposition by keeping the leaves in `S` and replacing each leaf
//! bracket `w` by `w - 1`.
//!
//! In the series model most subsets contribute nothing below the truncation
//! order; they are skipped using valuation bounds, and each leaf is only
//! evaluated to the precision its terms can reach.

pub(crate) mod residues;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};

pub use residues::{random_regular_word, verify_multilinearity, verify_regularity, MultilinearityReport, RegularityReport, ResidueCheck};

use crate::brackets::{decompose, BaseOp, DeviationCache, PiDecomposition};
use crate::context::LoopAlgebra;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::{Series, SeriesContext};

/// The five expansion formulas, numbered as the CLI exposes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// `A(B_P C_Q) - (A B_P) C_Q` over the associator decomposition.
    Associator = 1,
    /// `(A_P B) C_Q - A_P (B C_Q)` over the anti-associator decomposition.
    AntiAssociator = 2,
    /// `(A B) C_Q - A (B C_Q)` over the anti-associator decomposition.
    AntiAssociatorSingle = 3,
    /// The same left side over the associator decomposition.
    AssociatorSingle = 4,
    /// `A_P B - B A_P` over the commutator decomposition.
    Commutator = 5,
}

impl Formula {
    pub fn from_id(id: u8) -> Result<Self> {
        Ok(match id {
            1 => Formula::Associator,
            2 => Formula::AntiAssociator,
            3 => Formula::AntiAssociatorSingle,
            4 => Formula::AssociatorSingle,
            5 => Formula::Commutator,
            _ => return Err(Error::InvalidParameter(format!("formula must be 1..=5, got {id}"))),
        })
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn all() -> [Formula; 5] {
        [Formula::Associator, Formula::AntiAssociator, Formula::AntiAssociatorSingle, Formula::AssociatorSingle, Formula::Commutator]
    }
}

/// Which decomposition a correction product is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorrectionKind {
    P,
    Q,
    R,
}

impl CorrectionKind {
    pub fn base(self) -> BaseOp {
        match self {
            CorrectionKind::P => BaseOp::Associator,
            CorrectionKind::Q => BaseOp::AntiAssociator,
            CorrectionKind::R => BaseOp::Commutator,
        }
    }
}

/// A set of leaves together with index sets, one bitmask per split block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSelection {
    pub leaves: Vec<usize>,
    pub masks: Vec<u32>,
}

impl SubsetSelection {
    /// Every atom of a split block that no selected leaf uses must be in the mask.
    pub fn is_admissible(&self, d: &PiDecomposition) -> bool {
        let blocks = d.split_blocks();
        self.masks.len() == blocks.len()
            && blocks.iter().zip(&self.masks).all(|(&b, &m)| {
                let full = (1u32 << d.blocks[b]) - 1;
                let used = self.leaves.iter().fold(0, |u, &i| u | d.leaves[i].support(b));
                m & !full == 0 && (full & !used) & !m == 0
            })
    }
}

/// `P_S` (or `Q_S`, `R_S`): the decomposition restricted to `selection`
/// with every leaf value `w` replaced by `w - 1`. The empty selection gives 0.
pub fn build_correction<A: LoopAlgebra>(alg: &A, d: &PiDecomposition, leaf_values: &[A::Elem], selection: &[usize]) -> Result<A::Vector> {
    if leaf_values.len() != d.leaf_count() {
        return Err(Error::Arity { expected: d.leaf_count(), got: leaf_values.len() });
    }
    let mut seen = vec![false; d.leaf_count()];
    for &i in selection {
        if i >= d.leaf_count() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidSelection(format!("{selection:?} is not a set of leaves of a {}-leaf decomposition", d.leaf_count())));
        }
    }
    let minus: Vec<Option<A::Vector>> = leaf_values.iter().enumerate().map(|(i, w)| seen[i].then(|| alg.minus_one(w))).collect();
    correction_from(alg, d, &|i| minus[i].clone().expect("selected"), &|i| seen[i])
}

fn correction_from<A: LoopAlgebra>(
    alg: &A,
    d: &PiDecomposition,
    leaf: &dyn Fn(usize) -> A::Vector,
    keep: &dyn Fn(usize) -> bool,
) -> Result<A::Vector> {
    match d.tree.restrict(keep) {
        None => Ok(alg.zero()),
        Some(t) => t.fold(&mut |i| Ok(leaf(i)), &mut |a, b| alg.alg_mul(&a, &b)),
    }
}

fn right_normed<A: LoopAlgebra>(alg: &A, factors: &[A::Vector]) -> Result<A::Vector> {
    match factors.split_last() {
        None => Ok(alg.scalar(Rational::one())),
        Some((last, init)) => init.iter().rev().try_fold(last.clone(), |acc, f| alg.alg_mul(f, &acc)),
    }
}

/// A formula with fixed block sizes and its decomposition.
#[derive(Clone, Debug)]
pub struct FormulaInstance {
    pub formula: Formula,
    pub p: usize,
    pub q: usize,
    pub decomposition: PiDecomposition,
    /// Blocks summed over by the inner index sets.
    pub index_blocks: Vec<usize>,
    /// The overall sign in front of the sum.
    pub sign: i64,
}

fn parity(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

impl FormulaInstance {
    /// `q` is ignored by formula 5; `p` must be 1 for formulas 3 and 4.
    pub fn new(formula: Formula, p: usize, q: usize) -> Result<Self> {
        if p == 0 || (q == 0 && formula != Formula::Commutator) {
            return Err(Error::InvalidParameter(format!("blocks must be nonempty, got p = {p}, q = {q}")));
        }
        if matches!(formula, Formula::AntiAssociatorSingle | Formula::AssociatorSingle) && p != 1 {
            return Err(Error::InvalidParameter(format!("formula {} is the p = 1 case, got p = {p}", formula.id())));
        }
        let (base, blocks, index_blocks, sign, q) = match formula {
            Formula::Associator => (BaseOp::Associator, vec![1, p, q], vec![1, 2], parity(p + q), q),
            Formula::AntiAssociator => (BaseOp::AntiAssociator, vec![p, 1, q], vec![0, 2], parity(p + q), q),
            Formula::AntiAssociatorSingle => (BaseOp::AntiAssociator, vec![1, 1, q], vec![2], parity(q + 1), q),
            Formula::AssociatorSingle => (BaseOp::Associator, vec![1, 1, q], vec![2], parity(q), q),
            Formula::Commutator => (BaseOp::Commutator, vec![p, 1], vec![0], parity(p + 1), 0),
        };
        Ok(FormulaInstance { formula, p, q, decomposition: decompose(base, &blocks)?, index_blocks, sign })
    }

    pub fn kind(&self) -> CorrectionKind {
        match self.decomposition.base {
            BaseOp::Associator => CorrectionKind::P,
            BaseOp::AntiAssociator => CorrectionKind::Q,
            BaseOp::Commutator => CorrectionKind::R,
        }
    }

    /// Degree of the left side; the truncation order must be at least this.
    pub fn min_order(&self) -> u32 {
        self.decomposition.atom_count() as u32
    }

    pub fn atom_count(&self) -> usize {
        self.decomposition.atom_count()
    }

    fn atom<'e, E>(&self, atoms: &'e [E], block: usize, index: usize) -> &'e E {
        let g = self.decomposition.generator(crate::brackets::Variable { block, index });
        &atoms[g as usize - 1]
    }

    fn capital<A: LoopAlgebra>(&self, alg: &A, atoms: &[A::Elem], block: usize, index: usize) -> A::Vector {
        alg.sub(&alg.scalar(Rational::one()), &alg.embed(self.atom(atoms, block, index)))
    }

    fn capitals<A: LoopAlgebra>(&self, alg: &A, atoms: &[A::Elem], block: usize, mask: u32) -> Vec<A::Vector> {
        (1..=self.decomposition.blocks[block]).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| self.capital(alg, atoms, block, i)).collect()
    }

    fn full(&self, block: usize) -> u32 {
        (1u32 << self.decomposition.blocks[block]) - 1
    }

    /// The left-hand side.
    pub fn lhs<A: LoopAlgebra>(&self, alg: &A, atoms: &[A::Elem]) -> Result<A::Vector> {
        let m = |x: &A::Vector, y: &A::Vector| alg.alg_mul(x, y);
        match self.formula {
            Formula::Associator => {
                let a = self.capital(alg, atoms, 0, 1);
                let bp = right_normed(alg, &self.capitals(alg, atoms, 1, self.full(1)))?;
                let cq = right_normed(alg, &self.capitals(alg, atoms, 2, self.full(2)))?;
                Ok(alg.sub(&m(&a, &m(&bp, &cq)?)?, &m(&m(&a, &bp)?, &cq)?))
            }
            Formula::AntiAssociator | Formula::AntiAssociatorSingle | Formula::AssociatorSingle => {
                let ap = right_normed(alg, &self.capitals(alg, atoms, 0, self.full(0)))?;
                let b = self.capital(alg, atoms, 1, 1);
                let cq = right_normed(alg, &self.capitals(alg, atoms, 2, self.full(2)))?;
                Ok(alg.sub(&m(&m(&ap, &b)?, &cq)?, &m(&ap, &m(&b, &cq)?)?))
            }
            Formula::Commutator => {
                let ap = right_normed(alg, &self.capitals(alg, atoms, 0, self.full(0)))?;
                let b = self.capital(alg, atoms, 1, 1);
                Ok(alg.sub(&m(&ap, &b)?, &m(&b, &ap)?))
            }
        }
    }

    /// One summand of the inner sum, for index sets `masks` (one per index block).
    fn inner_term<A: LoopAlgebra>(&self, alg: &A, atoms: &[A::Elem], masks: &[u32]) -> Result<A::Vector> {
        let m = |x: &A::Vector, y: &A::Vector| alg.alg_mul(x, y);
        let low = |block: usize| alg.embed(self.atom(atoms, block, 1));
        match self.formula {
            Formula::Associator => {
                let bi = right_normed(alg, &self.capitals(alg, atoms, 1, masks[0]))?;
                let cj = right_normed(alg, &self.capitals(alg, atoms, 2, masks[1]))?;
                m(&low(0), &m(&bi, &cj)?)
            }
            Formula::AntiAssociator => {
                let ai = right_normed(alg, &self.capitals(alg, atoms, 0, masks[0]))?;
                let cj = right_normed(alg, &self.capitals(alg, atoms, 2, masks[1]))?;
                m(&m(&ai, &low(1))?, &cj)
            }
            Formula::AntiAssociatorSingle => {
                let cj = right_normed(alg, &self.capitals(alg, atoms, 2, masks[0]))?;
                m(&m(&low(0), &low(1))?, &cj)
            }
            Formula::AssociatorSingle => {
                let cj = right_normed(alg, &self.capitals(alg, atoms, 2, masks[0]))?;
                m(&low(0), &m(&low(1), &cj)?)
            }
            Formula::Commutator => {
                let ai = right_normed(alg, &self.capitals(alg, atoms, 0, masks[0]))?;
                m(&low(1), &ai)
            }
        }
    }

    /// Index sets forced into the inner sum by a leaf selection.
    pub fn required(&self, leaves: &[usize]) -> Vec<u32> {
        self.index_blocks
            .iter()
            .map(|&b| {
                let used = leaves.iter().fold(0, |u, &i| u | self.decomposition.leaves[i].support(b));
                self.full(b) & !used
            })
            .collect()
    }

    /// The signed inner sum over all admissible index sets containing `required`.
    pub fn coefficient<A: LoopAlgebra>(&self, alg: &A, atoms: &[A::Elem], required: &[u32]) -> Result<A::Vector> {
        let free: Vec<u32> = self.index_blocks.iter().zip(required).map(|(&b, &r)| self.full(b) & !r).collect();
        let mut total = alg.zero();
        let mut choice: Vec<u32> = vec![0; free.len()];
        loop {
            let masks: Vec<u32> = required.iter().zip(&choice).map(|(r, c)| r | c).collect();
            let size: u32 = masks.iter().map(|m| m.count_ones()).sum();
            let t = self.inner_term(alg, atoms, &masks)?;
            total = if size % 2 == 0 { alg.add(&total, &t) } else { alg.sub(&total, &t) };
            // next submask combination
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return Ok(total);
                }
                choice[k] = (choice[k].wrapping_sub(free[k])) & free[k];
                if choice[k] != 0 {
                    break;
                }
                k += 1;
            }
        }
    }

    /// Right-hand side summed over the given leaf selections.
    fn rhs_over<A>(&self, alg: &A, atoms: &[A::Elem], leaf_minus_one: &[A::Vector], selections: &[Vec<usize>]) -> Result<A::Vector>
    where
        A: LoopAlgebra + Sync,
        A::Elem: Sync,
    {
        let mut coeffs: HashMap<Vec<u32>, A::Vector> = HashMap::new();
        for s in selections {
            let r = self.required(s);
            if !coeffs.contains_key(&r) {
                let c = self.coefficient(alg, atoms, &r)?;
                coeffs.insert(r, c);
            }
        }
        let d = &self.decomposition;
        let parts: Vec<A::Vector> = selections
            .par_iter()
            .map(|s| {
                let mut keep = vec![false; d.leaf_count()];
                s.iter().for_each(|&i| keep[i] = true);
                let ps = correction_from(alg, d, &|i| leaf_minus_one[i].clone(), &|i| keep[i])?;
                alg.alg_mul(&coeffs[&self.required(s)], &ps)
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = parts.iter().fold(alg.zero(), |acc, x| alg.add(&acc, x));
        Ok(alg.scale(&sum, &Rational::from_i64(self.sign)))
    }
}

/// Deliberate corruption of the right-hand side, to check that the verifier notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Negate the overall sign.
    FlipSign,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub formula: Formula,
    pub p: usize,
    /// `None` for the commutator formula.
    pub q: Option<usize>,
    pub order: u32,
    pub difference: Series,
    pub pass: bool,
    /// Lowest nonzero homogeneous component of the difference.
    pub witness: Option<Series>,
    /// Number of leaf selections that were summed.
    pub terms: usize,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "formula": self.formula.id(),
            "p": self.p,
            "q": self.q,
            "order": self.order,
            "pass": self.pass,
            "witness": self.witness.as_ref().map(|w| serde_json::to_value(w).expect("series serializes")),
            "terms": self.terms,
            "elapsed_ms": self.elapsed.as_millis() as u64,
        })
    }
}

/// Leaf values in the series model, each to the precision it is needed at,
/// embedded back at `order`. Returns `(w - 1, certified lower bound of nu(w - 1))`.
/// Leaves with precision 0 are skipped and reported as `(0, order + 1)`.
fn series_leaves(inst: &FormulaInstance, order: u32, precision: impl Fn(usize) -> u32) -> Result<Vec<(Series, u32)>> {
    let d = &inst.decomposition;
    let mut by_order: HashMap<u32, Vec<usize>> = HashMap::new();
    for i in 0..d.leaf_count() {
        match precision(i) {
            0 => {}
            o => by_order.entry(o.min(order)).or_default().push(i),
        }
    }
    let groups: Vec<(u32, Vec<usize>)> = by_order.into_iter().collect();
    let computed: Vec<Vec<(usize, Series, u32)>> = groups
        .par_iter()
        .map(|(o, idx)| {
            let ctx = SeriesContext::new(*o);
            let atoms: Vec<Series> = (1..=d.atom_count() as u32).map(|i| ctx.x(i)).collect();
            let mut cache = DeviationCache::new(&ctx, atoms);
            idx.iter()
                .map(|&i| {
                    let w = cache.deviation(d.base, &d.leaves[i].indices, &d.leaf_args(i))?;
                    let m = w.sub(&Series::one(*o));
                    let nu = m.nu().lower_bound(*o);
                    Ok((i, m.with_order(order), nu))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Option<(Series, u32)>> = vec![None; d.leaf_count()];
    for (i, s, nu) in computed.into_iter().flatten() {
        out[i] = Some((s, nu));
    }
    Ok(out.into_iter().map(|x| x.unwrap_or_else(|| (Series::zero(order), order + 1))).collect())
}

/// Leaf selections whose terms can reach degree `order`, by depth-first
/// search with the monotone bound `|required| + sum nu(w - 1) <= order`.
fn pruned_selections(inst: &FormulaInstance, nus: &[u32], order: u32) -> Vec<Vec<usize>> {
    fn go(inst: &FormulaInstance, nus: &[u32], order: u32, start: usize, cur: &mut Vec<usize>, nu_sum: u32, out: &mut Vec<Vec<usize>>) {
        for i in start..nus.len() {
            cur.push(i);
            let req: u32 = inst.required(cur).iter().map(|m| m.count_ones()).sum();
            let bound = req + nu_sum + nus[i];
            if bound <= order {
                out.push(cur.clone());
                go(inst, nus, order, i + 1, cur, nu_sum + nus[i], out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(inst, nus, order, 0, &mut Vec::new(), 0, &mut out);
    out
}

/// Verifies a formula exactly in the free series model at truncation `order`.
pub fn verify_formula(formula: Formula, p: usize, q: usize, order: u32, mutation: Mutation) -> Result<VerificationReport> {
    let start = Instant::now();
    let inst = FormulaInstance::new(formula, p, q)?;
    if order < inst.min_order() {
        return Err(Error::InvalidParameter(format!("order {order} is below the degree {} of the left side", inst.min_order())));
    }
    let ctx = SeriesContext::new(order);
    let atoms: Vec<Series> = (1..=inst.atom_count() as u32).map(|i| ctx.x(i)).collect();
    let lhs = inst.lhs(&ctx, &atoms)?;

    // A leaf w sits next to a coefficient of valuation at least
    // |required({w})|, so only degrees up to order - |required({w})| of w matter,
    // provided every other leaf w' has nu(w' - 1) >= its support in the index blocks.
    let d = &inst.decomposition;
    let support = |i: usize| -> u32 { inst.index_blocks.iter().map(|&b| d.leaves[i].support(b).count_ones()).sum() };
    let leaves = series_leaves(&inst, order, |i| (order - inst.required(&[i]).iter().map(|m| m.count_ones()).sum::<u32>()).max(1))?;
    if let Some(i) = (0..d.leaf_count()).find(|&i| leaves[i].1 < support(i)) {
        return Err(Error::InvalidParameter(format!("leaf {} has valuation below its support; cannot bound precision", d.leaf_string(i))));
    }
    let nus: Vec<u32> = leaves.iter().map(|l| l.1).collect();
    let values: Vec<Series> = leaves.into_iter().map(|l| l.0).collect();
    let selections = pruned_selections(&inst, &nus, order);
    let mut rhs = inst.rhs_over(&ctx, &atoms, &values, &selections)?;
    if mutation == Mutation::FlipSign {
        rhs = rhs.neg();
    }
    let difference = lhs.sub(&rhs);
    let witness = difference.lowest_component();
    Ok(VerificationReport {
        formula,
        p,
        q: (formula != Formula::Commutator).then_some(inst.q),
        order,
        pass: witness.is_none(),
        difference,
        witness,
        terms: selections.len(),
        elapsed: start.elapsed(),
    })
}

/// Formula (1).
pub fn verify_formula_ass(p: usize, q: usize, order: u32) -> Result<VerificationReport> {
    verify_formula(Formula::Associator, p, q, order, Mutation::None)
}

/// Formula (2).
pub fn verify_formula_anti_ass(p: usize, q: usize, order: u32) -> Result<VerificationReport> {
    verify_formula(Formula::AntiAssociator, p, q, order, Mutation::None)
}

/// Formula (5).
pub fn verify_formula_comm(p: usize, order: u32) -> Result<VerificationReport> {
    verify_formula(Formula::Commutator, p, 1, order, Mutation::None)
}

/// Largest decomposition handled by the exhaustive (unpruned) evaluation.
pub const EXHAUSTIVE_LEAF_CAP: usize = 12;

/// Both sides of a formula in an arbitrary loop algebra, summing over every
/// leaf subset. `atoms[i - 1]` is bound to generator `x_i` of the decomposition.
pub fn formula_sides<A>(alg: &A, inst: &FormulaInstance, atoms: &[A::Elem]) -> Result<(A::Vector, A::Vector)>
where
    A: LoopAlgebra + Sync,
    A::Elem: Sync,
{
    let d = &inst.decomposition;
    if d.leaf_count() > EXHAUSTIVE_LEAF_CAP {
        return Err(Error::InvalidParameter(format!("{} leaves exceed the exhaustive cap {EXHAUSTIVE_LEAF_CAP}", d.leaf_count())));
    }
    if atoms.len() != inst.atom_count() {
        return Err(Error::Arity { expected: inst.atom_count(), got: atoms.len() });
    }
    for a in atoms {
        alg.check_element(a)?;
    }
    let mut cache = DeviationCache::new(alg, atoms.to_vec());
    let values = d.leaf_values(&mut cache)?;
    let minus: Vec<A::Vector> = values.iter().map(|w| alg.minus_one(w)).collect();
    let selections: Vec<Vec<usize>> =
        (1u32..1 << d.leaf_count()).map(|m| (0..d.leaf_count()).filter(|i| m >> i & 1 == 1).collect()).collect();
    let lhs = inst.lhs(alg, atoms)?;
    let rhs = inst.rhs_over(alg, atoms, &minus, &selections)?;
    Ok((lhs, rhs))
}

/// `a b_I * c_J = (a * b_I c_J)(1 + sum P_S)` over subsets `S` of the leaves
/// using only `a`, `b_I`, `c_J`, checked in the series model at `order`.
/// Returns the difference of the two sides.
pub fn key_lemma_difference(p: usize, q: usize, i_mask: u32, j_mask: u32, order: u32) -> Result<Series> {
    let inst = FormulaInstance::new(Formula::Associator, p, q)?;
    let d = &inst.decomposition;
    if i_mask >> p != 0 || j_mask >> q != 0 {
        return Err(Error::InvalidSelection(format!("index sets {i_mask:b}, {j_mask:b} out of range")));
    }
    let ctx = SeriesContext::new(order);
    let atoms: Vec<Series> = (1..=inst.atom_count() as u32).map(|i| ctx.x(i)).collect();
    let pick = |block: usize, mask: u32| -> Vec<Series> {
        (1..=d.blocks[block]).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| inst.atom(&atoms, block, i).clone()).collect()
    };
    let rn = |v: Vec<Series>| right_normed(&ctx, &v);
    let a = atoms[0].clone();
    let (bi, cj) = (rn(pick(1, i_mask))?, rn(pick(2, j_mask))?);
    let lhs = a.mul(&bi)?.mul(&cj)?;
    let head = a.mul(&bi.mul(&cj)?)?;

    let inside: Vec<usize> = (0..d.leaf_count()).filter(|&i| d.leaves[i].support(1) & !i_mask == 0 && d.leaves[i].support(2) & !j_mask == 0).collect();
    let leaves = series_leaves(&inst, order, |i| if inside.contains(&i) { order } else { 0 })?;
    let mut selections = Vec::new();
    fn go(inside: &[usize], nus: &[u32], order: u32, start: usize, cur: &mut Vec<usize>, sum: u32, out: &mut Vec<Vec<usize>>) {
        for k in start..inside.len() {
            let s = sum + nus[inside[k]];
            if s <= order {
                cur.push(inside[k]);
                out.push(cur.clone());
                go(inside, nus, order, k + 1, cur, s, out);
                cur.pop();
            }
        }
    }
    let nus: Vec<u32> = leaves.iter().map(|l| l.1).collect();
    go(&inside, &nus, order, 0, &mut Vec::new(), 0, &mut selections);
    let values: Vec<Series> = leaves.into_iter().map(|l| l.0).collect();
    let sum = selections
        .par_iter()
        .map(|s| {
            let mut keep = vec![false; d.leaf_count()];
            s.iter().for_each(|&i| keep[i] = true);
            correction_from(&ctx, d, &|i| values[i].clone(), &|i| keep[i])
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Series::one(order), |acc, x| acc.add(&x));
    Ok(lhs.sub(&head.mul(&sum)?))
}

/// Whether a formula holds exactly in a loop algebra on the given atoms,
/// summing over every leaf subset.
pub fn cross_check<A>(alg: &A, formula: Formula, p: usize, q: usize, atoms: &[A::Elem]) -> Result<bool>
where
    A: LoopAlgebra + Sync,
    A::Elem: Sync,
{
    let inst = FormulaInstance::new(formula, p, q)?;
    let (lhs, rhs) = formula_sides(alg, &inst, atoms)?;
    Ok(alg.is_zero(&alg.sub(&lhs, &rhs)))
}
