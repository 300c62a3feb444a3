use std::collections::HashMap;

use super::{BaseOp, DeviationIndices};
use crate::context::LoopContext;
use crate::error::Result;
use crate::terms::{eval_term, LoopTerm};

type Key = (BaseOp, Vec<usize>, Vec<LoopTerm>);

/// Memoizing evaluator for deviations whose arguments are words in a fixed
/// set of atoms. Deviations sharing lower levels (as the leaves of a
/// decomposition do) are computed once.
pub struct DeviationCache<'c, C: LoopContext> {
    ctx: &'c C,
    atoms: Vec<C::Elem>,
    values: HashMap<Key, C::Elem>,
    words: HashMap<LoopTerm, C::Elem>,
}

impl<'c, C: LoopContext> DeviationCache<'c, C> {
    /// `atoms[i - 1]` is the value of generator `x_i`.
    pub fn new(ctx: &'c C, atoms: Vec<C::Elem>) -> Self {
        DeviationCache { ctx, atoms, values: HashMap::new(), words: HashMap::new() }
    }

    pub fn context(&self) -> &'c C {
        self.ctx
    }

    pub fn word(&mut self, w: &LoopTerm) -> Result<C::Elem> {
        if let Some(v) = self.words.get(w) {
            return Ok(v.clone());
        }
        let v = match w {
            LoopTerm::Mul(a, b) => {
                let (a, b) = (self.word(a)?, self.word(b)?);
                self.ctx.mul(&a, &b)?
            }
            _ => eval_term(w, self.ctx, &self.atoms)?,
        };
        self.words.insert(w.clone(), v.clone());
        Ok(v)
    }

    /// Deviation of `base` with indices `idx` on the argument words.
    pub fn deviation(&mut self, base: BaseOp, idx: &DeviationIndices, args: &[LoopTerm]) -> Result<C::Elem> {
        idx.check(base)?;
        let expected = idx.level() + base.arity();
        if args.len() != expected {
            return Err(crate::error::Error::Arity { expected, got: args.len() });
        }
        self.eval(base, idx.as_slice(), args)
    }

    fn eval(&mut self, base: BaseOp, idx: &[usize], args: &[LoopTerm]) -> Result<C::Elem> {
        let key = (base, idx.to_vec(), args.to_vec());
        if let Some(v) = self.values.get(&key) {
            return Ok(v.clone());
        }
        let v = match idx.split_last() {
            None => {
                let vals = args.iter().map(|a| self.word(a)).collect::<Result<Vec<_>>>()?;
                base.apply(&vals, self.ctx)?
            }
            Some((&alpha, lower)) => {
                let splice = |v: LoopTerm| {
                    let mut a = args[..alpha - 1].to_vec();
                    a.push(v);
                    a.extend_from_slice(&args[alpha + 1..]);
                    a
                };
                let (x, y) = (&args[alpha - 1], &args[alpha]);
                let fx = self.eval(base, lower, &splice(x.clone()))?;
                let fy = self.eval(base, lower, &splice(y.clone()))?;
                let fxy = self.eval(base, lower, &splice(LoopTerm::mul(x.clone(), y.clone())))?;
                self.ctx.ldiv(&self.ctx.mul(&fx, &fy)?, &fxy)?
            }
        };
        self.values.insert(key, v.clone());
        Ok(v)
    }
}
