use serde_json::{json, Value};

use super::subloop::verify_normal;
use super::{CayleyLoop, Subloop};
use crate::error::Result;
use crate::terms::{degree, eval_term, LoopTerm};

/// A one-generator word `w` with nonzero degree and `w(x) = 1`.
///
/// The left powers `x (x (.. x))` repeat after at most `|L|` steps; for the
/// first repeat `x^m = x^n` with `m < n` the word is `y^m \ y^n`, or `y^n`
/// when `m = 0`.
pub fn periodicity_witness(l: &CayleyLoop, x: usize) -> Result<LoopTerm> {
    l.check(x)?;
    let mut seen = vec![usize::MAX; l.order()];
    let mut p = 0usize;
    seen[0] = 0;
    let mut k = 0;
    let (m, n) = loop {
        k += 1;
        p = l.op(x, p);
        if seen[p] != usize::MAX {
            break (seen[p], k);
        }
        seen[p] = k;
    };
    let y = LoopTerm::gen(1);
    Ok(if m == 0 { LoopTerm::power(&y, n) } else { LoopTerm::ldiv(LoopTerm::power(&y, m), LoopTerm::power(&y, n)) })
}

#[derive(Clone, Debug)]
pub struct Isolator {
    pub subloop: Subloop,
    /// `(x, w)` with `w(x)` in the subloop being isolated.
    pub witnesses: Vec<(usize, LoopTerm)>,
}

impl Isolator {
    pub fn to_json(&self) -> Value {
        json!({
            "subloop": self.subloop.to_json(),
            "witnesses": self.witnesses.iter().map(|(x, w)| json!({
                "element": x,
                "word": w.to_string(),
                "degree": degree(w).total(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The isolator of a normal subloop `K`. In a finite loop every element is
/// periodic, so this is all of `L`; each element comes with its witness word,
/// checked to land in `K`.
pub fn isolator(l: &CayleyLoop, k: &Subloop) -> Result<Isolator> {
    verify_normal(l, k)?;
    let mut witnesses = Vec::with_capacity(l.order());
    for x in l.elements() {
        let w = periodicity_witness(l, x)?;
        let v = eval_term(&w, l, &[x])?;
        debug_assert!(k.contains(v) && degree(&w).total() != 0);
        witnesses.push((x, w));
    }
    Ok(Isolator { subloop: Subloop::whole(l), witnesses })
}
