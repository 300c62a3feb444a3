use std::fmt;

use serde_json::{json, Value};

use super::{BaseOp, BracketExpr, DeviationCache, DeviationIndices};
use crate::context::LoopContext;
use crate::error::{Error, Result};
use crate::terms::LoopTerm;

/// An argument of the decomposed bracket: atom `index` (1-based) of block `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub block: usize,
    pub index: usize,
}

/// One elementary bracket of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiLeaf {
    pub indices: DeviationIndices,
    pub args: Vec<Variable>,
}

impl PiLeaf {
    pub fn weight(&self) -> usize {
        self.args.len()
    }

    /// Bitmask of the atoms of `block` used by this bracket (bit `i - 1` for atom `i`).
    pub fn support(&self, block: usize) -> u32 {
        self.args.iter().filter(|v| v.block == block).fold(0, |m, v| m | 1 << (v.index - 1))
    }
}

/// Parenthesized product over leaf positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductTree {
    Leaf(usize),
    Mul(Box<ProductTree>, Box<ProductTree>),
}

impl ProductTree {
    fn mul(a: ProductTree, b: ProductTree) -> Self {
        ProductTree::Mul(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            ProductTree::Leaf(i) => vec![*i],
            ProductTree::Mul(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    /// The tree with every leaf outside `keep` deleted; a node left with one
    /// child collapses to that child. `None` when nothing is kept.
    pub fn restrict(&self, keep: &dyn Fn(usize) -> bool) -> Option<ProductTree> {
        match self {
            ProductTree::Leaf(i) => keep(*i).then_some(ProductTree::Leaf(*i)),
            ProductTree::Mul(a, b) => match (a.restrict(keep), b.restrict(keep)) {
                (Some(a), Some(b)) => Some(ProductTree::mul(a, b)),
                (x, None) | (None, x) => x,
            },
        }
    }

    /// Folds the tree with `leaf` at the leaves and `mul` at inner nodes.
    pub fn fold<T>(&self, leaf: &mut dyn FnMut(usize) -> Result<T>, mul: &mut dyn FnMut(T, T) -> Result<T>) -> Result<T> {
        match self {
            ProductTree::Leaf(i) => leaf(*i),
            ProductTree::Mul(a, b) => {
                let x = a.fold(leaf, mul)?;
                let y = b.fold(leaf, mul)?;
                mul(x, y)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ProductTree::Leaf(i) => json!(i),
            ProductTree::Mul(a, b) => json!([a.to_json(), b.to_json()]),
        }
    }
}

impl fmt::Display for ProductTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductTree::Leaf(i) => write!(f, "w{}", i + 1),
            ProductTree::Mul(a, b) => write!(f, "({a}*{b})"),
        }
    }
}

/// A base bracket on block products `(x_1..x_{k_1}, ...)`, written as an
/// ordered product of elementary brackets whose arguments are single atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiDecomposition {
    pub base: BaseOp,
    /// Number of atoms in each argument block.
    pub blocks: Vec<usize>,
    pub leaves: Vec<PiLeaf>,
    pub tree: ProductTree,
}

fn expand(indices: DeviationIndices, args: Vec<Vec<Variable>>, leaves: &mut Vec<PiLeaf>) -> ProductTree {
    match args.iter().position(|a| a.len() > 1) {
        None => {
            leaves.push(PiLeaf { indices, args: args.into_iter().map(|a| a[0]).collect() });
            ProductTree::Leaf(leaves.len() - 1)
        }
        Some(k) => {
            // X(uv) = (X(u) X(v)) * X'(u, v), the deviation taking index k + 1
            let head = vec![args[k][0]];
            let tail = args[k][1..].to_vec();
            let with = |v: Vec<Vec<Variable>>| {
                let mut a = args[..k].to_vec();
                a.extend(v);
                a.extend_from_slice(&args[k + 1..]);
                a
            };
            let xu = expand(indices.clone(), with(vec![head.clone()]), leaves);
            let xv = expand(indices.clone(), with(vec![tail.clone()]), leaves);
            let dev = expand(indices.push(k + 1), with(vec![head, tail]), leaves);
            ProductTree::mul(ProductTree::mul(xu, xv), dev)
        }
    }
}

/// Decomposes `base` applied to right-normed block products with the given block sizes.
pub fn decompose(base: BaseOp, blocks: &[usize]) -> Result<PiDecomposition> {
    if blocks.len() != base.arity() {
        return Err(Error::Arity { expected: base.arity(), got: blocks.len() });
    }
    if blocks.contains(&0) {
        return Err(Error::InvalidParameter("every block needs at least one atom".into()));
    }
    if blocks.iter().any(|&b| b > 31) {
        return Err(Error::InvalidParameter("blocks are limited to 31 atoms".into()));
    }
    let args: Vec<Vec<Variable>> =
        blocks.iter().enumerate().map(|(block, &n)| (1..=n).map(|index| Variable { block, index }).collect()).collect();
    let mut leaves = Vec::new();
    let tree = expand(DeviationIndices::empty(), args, &mut leaves);
    Ok(PiDecomposition { base, blocks: blocks.to_vec(), leaves, tree })
}

fn check_pq(p: usize, q: usize) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter(format!("p and q must be positive, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `(a, b_1..b_p, c_1..c_q)`.
pub fn decompose_associator(p: usize, q: usize) -> Result<PiDecomposition> {
    check_pq(p, q)?;
    decompose(BaseOp::Associator, &[1, p, q])
}

/// `(a_1..a_p, b, c_1..c_q)'`.
pub fn decompose_anti_associator(p: usize, q: usize) -> Result<PiDecomposition> {
    check_pq(p, q)?;
    decompose(BaseOp::AntiAssociator, &[p, 1, q])
}

/// `[a_1..a_p, b]`.
pub fn decompose_commutator(p: usize) -> Result<PiDecomposition> {
    check_pq(p, 1)?;
    decompose(BaseOp::Commutator, &[p, 1])
}

impl PiDecomposition {
    /// Blocks that are split into several atoms by the formulas (the `I`, `J` blocks).
    pub fn split_blocks(&self) -> Vec<usize> {
        match self.base {
            BaseOp::Associator => vec![1, 2],
            BaseOp::AntiAssociator => vec![0, 2],
            BaseOp::Commutator => vec![0],
        }
    }

    /// Size of the first split block.
    pub fn p(&self) -> usize {
        self.blocks[self.split_blocks()[0]]
    }

    /// Size of the second split block (0 for commutators).
    pub fn q(&self) -> usize {
        self.split_blocks().get(1).map_or(0, |&b| self.blocks[b])
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn atom_count(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Generator number of a variable: atoms are numbered consecutively across blocks.
    pub fn generator(&self, v: Variable) -> u32 {
        (self.blocks[..v.block].iter().sum::<usize>() + v.index) as u32
    }

    pub fn variable_name(&self, v: Variable) -> String {
        let letter = (b'a' + v.block as u8) as char;
        if self.split_blocks().contains(&v.block) {
            format!("{letter}{}", v.index)
        } else {
            letter.to_string()
        }
    }

    /// The elementary bracket of a leaf as an expression on slots `1..=weight`.
    pub fn leaf_bracket(&self, i: usize) -> BracketExpr {
        let leaf = &self.leaves[i];
        let slots = (1..=leaf.weight()).map(BracketExpr::Slot).collect();
        match (self.base, leaf.indices.level()) {
            (BaseOp::Associator, 0) => {
                let mut s = (1..=3).map(BracketExpr::Slot);
                BracketExpr::assoc(s.next().unwrap(), s.next().unwrap(), s.next().unwrap())
            }
            (BaseOp::Commutator, 0) => BracketExpr::comm(BracketExpr::Slot(1), BracketExpr::Slot(2)),
            _ => BracketExpr::Dev { base: self.base, indices: leaf.indices.clone(), args: slots },
        }
    }

    /// Generator words of the leaf's arguments.
    pub fn leaf_args(&self, i: usize) -> Vec<LoopTerm> {
        self.leaves[i].args.iter().map(|v| LoopTerm::gen(self.generator(*v))).collect()
    }

    /// Arguments of the decomposed bracket: right-normed products of block atoms.
    pub fn target_args(&self) -> Vec<LoopTerm> {
        let mut next = 0u32;
        self.blocks
            .iter()
            .map(|&n| {
                let t = LoopTerm::right_normed((next + 1..=next + n as u32).map(LoopTerm::gen));
                next += n as u32;
                t
            })
            .collect()
    }

    /// Values of every leaf, sharing lower-level work through `cache`.
    pub fn leaf_values<C: LoopContext>(&self, cache: &mut DeviationCache<'_, C>) -> Result<Vec<C::Elem>> {
        (0..self.leaves.len()).map(|i| cache.deviation(self.base, &self.leaves[i].indices, &self.leaf_args(i))).collect()
    }

    /// The product of the leaves, with atom `x_i` bound to `atoms[i - 1]`.
    pub fn evaluate<C: LoopContext>(&self, ctx: &C, atoms: &[C::Elem]) -> Result<C::Elem> {
        self.check_atoms(atoms.len())?;
        let mut cache = DeviationCache::new(ctx, atoms.to_vec());
        let vals = self.leaf_values(&mut cache)?;
        self.tree.fold(&mut |i| Ok(vals[i].clone()), &mut |a, b| ctx.mul(&a, &b))
    }

    /// The decomposed bracket itself, evaluated directly.
    pub fn target<C: LoopContext>(&self, ctx: &C, atoms: &[C::Elem]) -> Result<C::Elem> {
        self.check_atoms(atoms.len())?;
        let mut cache = DeviationCache::new(ctx, atoms.to_vec());
        cache.deviation(self.base, &DeviationIndices::empty(), &self.target_args())
    }

    fn check_atoms(&self, got: usize) -> Result<()> {
        if got != self.atom_count() {
            return Err(Error::Arity { expected: self.atom_count(), got });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.name(),
            "blocks": self.blocks,
            "leaves": self.leaves.iter().enumerate().map(|(i, l)| json!({
                "bracket": self.leaf_bracket(i).to_json(),
                "args": l.args.iter().map(|v| self.variable_name(*v)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "product": self.tree.to_json(),
        })
    }

    /// Human-readable form of leaf `i`, e.g. `(a,b1,b2,c1)_{2}`.
    pub fn leaf_string(&self, i: usize) -> String {
        let leaf = &self.leaves[i];
        let names: Vec<String> = leaf.args.iter().map(|v| self.variable_name(*v)).collect();
        let (open, close) = match self.base {
            BaseOp::Commutator => ("[", "]"),
            BaseOp::Associator => ("(", ")"),
            BaseOp::AntiAssociator => ("(", ")'"),
        };
        let mut s = format!("{open}{}{close}", names.join(","));
        if leaf.indices.level() > 0 {
            s.push_str(&format!("_{{{}}}", leaf.indices));
        }
        s
    }

    /// The product with each leaf written out.
    pub fn product_string(&self) -> String {
        fn go(d: &PiDecomposition, t: &ProductTree, top: bool) -> String {
            match t {
                ProductTree::Leaf(i) => d.leaf_string(*i),
                ProductTree::Mul(a, b) => {
                    let s = format!("{}*{}", go(d, a, false), go(d, b, false));
                    if top {
                        s
                    } else {
                        format!("({s})")
                    }
                }
            }
        }
        go(self, &self.tree, true)
    }
}
