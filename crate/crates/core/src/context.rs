//! Abstract loop and loop-algebra contexts.
//!
//! Words and brackets are evaluated against a [`LoopContext`]; identities that
//! mix loop elements with linear combinations (the `w - 1` corrections) need a
//! [`LoopAlgebra`] as well. The truncated series model and Cayley-table loops
//! both implement the two traits.

use std::fmt::Debug;

use crate::error::Result;
use crate::rational::Rational;

pub trait LoopContext {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    /// `a \ b`, the unique `z` with `a z = b`.
    fn ldiv(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    /// `a / b`, the unique `z` with `z b = a`.
    fn rdiv(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    /// Rejects values that are not elements of this loop.
    fn check_element(&self, _a: &Self::Elem) -> Result<()> {
        Ok(())
    }
}

/// The rational loop algebra of a loop context.
pub trait LoopAlgebra: LoopContext {
    type Vector: Clone + PartialEq + Debug + Send + Sync;

    fn embed(&self, x: &Self::Elem) -> Self::Vector;

    /// `c * 1`.
    fn scalar(&self, c: Rational) -> Self::Vector;

    fn add(&self, a: &Self::Vector, b: &Self::Vector) -> Self::Vector;

    fn sub(&self, a: &Self::Vector, b: &Self::Vector) -> Self::Vector;

    fn scale(&self, a: &Self::Vector, c: &Rational) -> Self::Vector;

    fn alg_mul(&self, a: &Self::Vector, b: &Self::Vector) -> Result<Self::Vector>;

    fn is_zero(&self, a: &Self::Vector) -> bool;

    fn zero(&self) -> Self::Vector {
        self.scalar(Rational::zero())
    }

    /// `x - 1` for a loop element `x`.
    fn minus_one(&self, x: &Self::Elem) -> Self::Vector {
        self.sub(&self.embed(x), &self.scalar(Rational::one()))
    }
}
