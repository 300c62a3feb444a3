use std::fmt;

use serde_json::{json, Value};

use super::{deviation_term, hierarchy_deviation, BaseOp, DeviationIndices};
use crate::context::LoopContext;
use crate::error::{Error, Result};
use crate::terms::LoopTerm;

/// Weight above which [`enumerate_brackets`] refuses to run unless asked to.
pub const DEFAULT_WEIGHT_CAP: usize = 6;

/// A bracket expression: commutators, associators and deviations nested
/// over slots, each slot used once. Slots are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketExpr {
    Slot(usize),
    Comm(Box<BracketExpr>, Box<BracketExpr>),
    Assoc(Box<BracketExpr>, Box<BracketExpr>, Box<BracketExpr>),
    Dev { base: BaseOp, indices: DeviationIndices, args: Vec<BracketExpr> },
}

impl BracketExpr {
    pub fn slot(k: usize) -> Self {
        BracketExpr::Slot(k)
    }

    pub fn comm(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Comm(Box::new(a), Box::new(b))
    }

    pub fn assoc(a: BracketExpr, b: BracketExpr, c: BracketExpr) -> Self {
        BracketExpr::Assoc(Box::new(a), Box::new(b), Box::new(c))
    }

    /// Checked deviation node.
    pub fn dev(base: BaseOp, indices: DeviationIndices, args: Vec<BracketExpr>) -> Result<Self> {
        indices.check(base)?;
        let expected = indices.level() + base.arity();
        if args.len() != expected {
            return Err(Error::Arity { expected, got: args.len() });
        }
        Ok(BracketExpr::Dev { base, indices, args })
    }

    /// Direct children (empty for a slot).
    pub fn children(&self) -> Vec<&BracketExpr> {
        match self {
            BracketExpr::Slot(_) => vec![],
            BracketExpr::Comm(a, b) => vec![a, b],
            BracketExpr::Assoc(a, b, c) => vec![a, b, c],
            BracketExpr::Dev { args, .. } => args.iter().collect(),
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            BracketExpr::Slot(_) => 1,
            _ => self.children().iter().map(|c| c.weight()).sum(),
        }
    }

    /// Slot numbers from left to right.
    pub fn slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_slots(&mut out);
        out
    }

    fn collect_slots(&self, out: &mut Vec<usize>) {
        match self {
            BracketExpr::Slot(k) => out.push(*k),
            _ => self.children().into_iter().for_each(|c| c.collect_slots(out)),
        }
    }

    /// Checks that the slots are exactly `1..=weight` and every node is well formed.
    pub fn validate(&self) -> Result<()> {
        let mut s = self.slots();
        s.sort_unstable();
        if s.iter().enumerate().any(|(i, k)| *k != i + 1) {
            return Err(Error::InvalidParameter(format!("slots {s:?} are not a permutation of 1..={}", s.len())));
        }
        self.validate_nodes()
    }

    fn validate_nodes(&self) -> Result<()> {
        if let BracketExpr::Dev { base, indices, args } = self {
            indices.check(*base)?;
            if args.len() != indices.level() + base.arity() {
                return Err(Error::Arity { expected: indices.level() + base.arity(), got: args.len() });
            }
        }
        self.children().into_iter().try_for_each(|c| c.validate_nodes())
    }

    /// Highest deviation level used anywhere in the tree (0 without deviations).
    pub fn max_level(&self) -> usize {
        let own = match self {
            BracketExpr::Dev { indices, .. } => indices.level(),
            _ => 0,
        };
        self.children().iter().map(|c| c.max_level()).fold(own, usize::max)
    }

    /// Evaluates with slot `k` bound to `args[k - 1]`.
    pub fn eval<C: LoopContext>(&self, ctx: &C, args: &[C::Elem]) -> Result<C::Elem> {
        match self {
            BracketExpr::Slot(k) => args.get(k - 1).cloned().ok_or(Error::UnboundGenerator(*k as u32)),
            BracketExpr::Comm(a, b) => super::commutator(&a.eval(ctx, args)?, &b.eval(ctx, args)?, ctx),
            BracketExpr::Assoc(a, b, c) => super::associator(&a.eval(ctx, args)?, &b.eval(ctx, args)?, &c.eval(ctx, args)?, ctx),
            BracketExpr::Dev { base, indices, args: children } => {
                let vals = children.iter().map(|c| c.eval(ctx, args)).collect::<Result<Vec<_>>>()?;
                hierarchy_deviation(*base, indices, &vals, ctx)
            }
        }
    }

    /// The loop word obtained by substituting `slots[k - 1]` for slot `k`.
    pub fn to_term(&self, slots: &[LoopTerm]) -> Result<LoopTerm> {
        match self {
            BracketExpr::Slot(k) => slots.get(k - 1).cloned().ok_or(Error::UnboundGenerator(*k as u32)),
            BracketExpr::Comm(a, b) => Ok(BaseOp::Commutator.apply_term(&[a.to_term(slots)?, b.to_term(slots)?])),
            BracketExpr::Assoc(a, b, c) => Ok(BaseOp::Associator.apply_term(&[a.to_term(slots)?, b.to_term(slots)?, c.to_term(slots)?])),
            BracketExpr::Dev { base, indices, args } => {
                let vals = args.iter().map(|c| c.to_term(slots)).collect::<Result<Vec<_>>>()?;
                deviation_term(*base, indices, &vals)
            }
        }
    }

    /// The word on distinct generators `x1..xn` (slot `k` becomes `xk`).
    pub fn to_generic_term(&self) -> Result<LoopTerm> {
        let gens: Vec<LoopTerm> = (1..=self.weight() as u32).map(LoopTerm::gen).collect();
        self.to_term(&gens)
    }

    pub fn to_json(&self) -> Value {
        match self {
            BracketExpr::Slot(k) => json!({ "slot": k }),
            BracketExpr::Comm(..) => json!({
                "op": "comm", "indices": [], "base": "comm",
                "args": self.children().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
            BracketExpr::Assoc(..) => json!({
                "op": "assoc", "indices": [], "base": "assoc",
                "args": self.children().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
            BracketExpr::Dev { base, indices, args } => json!({
                "op": "dev", "indices": indices.as_slice(), "base": base.name(),
                "args": args.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Json(format!("{m}: {v}"));
        if let Some(k) = v.get("slot") {
            let k = k.as_u64().filter(|k| *k >= 1).ok_or_else(|| bad("slot must be a positive integer"))?;
            return Ok(BracketExpr::Slot(k as usize));
        }
        let op = v.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
        let args = v
            .get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing args"))?
            .iter()
            .map(BracketExpr::from_json)
            .collect::<Result<Vec<_>>>()?;
        let indices = match v.get("indices") {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("indices must be integers")))
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(bad("indices must be an array")),
        };
        let mut args = args.into_iter();
        let mut next = || args.next().ok_or_else(|| bad("too few args"));
        let node = match op {
            "comm" => BracketExpr::comm(next()?, next()?),
            "assoc" => BracketExpr::assoc(next()?, next()?, next()?),
            "dev" => {
                let base: BaseOp = v.get("base").and_then(Value::as_str).unwrap_or("assoc").parse()?;
                let rest: Vec<_> = std::iter::from_fn(|| next().ok()).collect();
                return BracketExpr::dev(base, DeviationIndices(indices), rest);
            }
            other => return Err(bad(&format!("unknown op {other:?}"))),
        };
        if next().is_ok() {
            return Err(bad("too many args"));
        }
        Ok(node)
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, cs: &[&BracketExpr]| -> fmt::Result {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            Ok(())
        };
        match self {
            BracketExpr::Slot(k) => write!(f, "s{k}"),
            BracketExpr::Comm(..) => {
                write!(f, "[")?;
                join(f, &self.children())?;
                write!(f, "]")
            }
            BracketExpr::Assoc(..) => {
                write!(f, "(")?;
                join(f, &self.children())?;
                write!(f, ")")
            }
            BracketExpr::Dev { base, indices, .. } => {
                let (open, close) = match base {
                    BaseOp::Commutator => ("[", "]"),
                    BaseOp::Associator => ("(", ")"),
                    BaseOp::AntiAssociator => ("(", ")'"),
                };
                write!(f, "{open}")?;
                join(f, &self.children())?;
                write!(f, "{close}")?;
                if indices.level() > 0 {
                    write!(f, "_{{{indices}}}")?;
                }
                Ok(())
            }
        }
    }
}

impl serde::Serialize for BracketExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for BracketExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        BracketExpr::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Node templates: commutator, associator, then associator deviations by level and index.
fn node_kinds(max_arity: usize) -> Vec<(usize, Option<DeviationIndices>)> {
    let mut out = vec![(2, None), (3, None)];
    for level in 1..=max_arity.saturating_sub(3) {
        for idx in DeviationIndices::all(BaseOp::Associator, level) {
            out.push((level + 3, Some(idx)));
        }
    }
    out
}

/// Compositions of `n` into `k` positive parts, lexicographic.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Shapes with placeholder slots (all numbered 0).
fn shapes(n: usize, memo: &mut Vec<Option<Vec<BracketExpr>>>) -> Vec<BracketExpr> {
    if let Some(s) = &memo[n] {
        return s.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        out.push(BracketExpr::Slot(0));
    }
    for (arity, idx) in node_kinds(n) {
        for comp in compositions(n, arity) {
            let parts: Vec<Vec<BracketExpr>> = comp.iter().map(|&w| shapes(w, memo)).collect();
            let mut combos: Vec<Vec<BracketExpr>> = vec![vec![]];
            for p in &parts {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        p.iter().map(move |x| {
                            let mut c = c.clone();
                            c.push(x.clone());
                            c
                        })
                    })
                    .collect();
            }
            for mut c in combos {
                out.push(match &idx {
                    None if arity == 2 => {
                        let b = c.pop().unwrap();
                        BracketExpr::comm(c.pop().unwrap(), b)
                    }
                    None => {
                        let cc = c.pop().unwrap();
                        let b = c.pop().unwrap();
                        BracketExpr::assoc(c.pop().unwrap(), b, cc)
                    }
                    Some(idx) => BracketExpr::Dev { base: BaseOp::Associator, indices: idx.clone(), args: c },
                });
            }
        }
    }
    memo[n] = Some(out.clone());
    out
}

fn number_slots(e: &mut BracketExpr, next: &mut usize) {
    match e {
        BracketExpr::Slot(k) => {
            *next += 1;
            *k = *next;
        }
        BracketExpr::Comm(a, b) => {
            number_slots(a, next);
            number_slots(b, next);
        }
        BracketExpr::Assoc(a, b, c) => {
            number_slots(a, next);
            number_slots(b, next);
            number_slots(c, next);
        }
        BracketExpr::Dev { args, .. } => args.iter_mut().for_each(|a| number_slots(a, next)),
    }
}

/// Every bracket expression of weight `n` built from commutators, associators
/// and associator deviations, with slots numbered `1..=n` from left to right.
/// Errors for `n < 2` or `n > cap`.
pub fn enumerate_brackets(n: usize, cap: usize) -> Result<Vec<BracketExpr>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("bracket weight must be at least 2, got {n}")));
    }
    if n > cap {
        return Err(Error::InvalidParameter(format!("bracket weight {n} exceeds the cap {cap}")));
    }
    let mut memo = vec![None; n + 1];
    let mut out = shapes(n, &mut memo);
    for e in &mut out {
        number_slots(e, &mut 0);
    }
    Ok(out)
}
