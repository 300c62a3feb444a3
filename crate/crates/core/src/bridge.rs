//! Checks that combine the free series model with finite Cayley loops:
//! additivity of bracket degrees, the dimension bound for brackets, and the
//! agreement of isolated γ terms with dimension subloops on finite loops.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::brackets::{enumerate_brackets, BracketExpr};
use crate::error::{Error, Result};
use crate::finite_loop::{dimension_subloop, gamma_series, ideal_powers, isolator, CayleyLoop, Subloop};
use crate::identities::residues::Fresh;
use crate::series::{dimension_degree, Series, SeriesContext};
use crate::terms::degree;

/// Largest bracket weight the free-model checks accept.
pub const BRIDGE_WEIGHT_CAP: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    FreeModel { order: u32 },
    Loop { name: String },
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::FreeModel { order } => write!(f, "free model, order {order}"),
            Scope::Loop { name } => write!(f, "loop {name}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoremCheckResult {
    pub check: String,
    pub scope: Scope,
    pub pass: bool,
    /// The computed evidence; on failure the offending items come first.
    pub witnesses: Vec<Value>,
}

impl TheoremCheckResult {
    fn new(check: &str, scope: Scope, mut items: Vec<(bool, Value)>) -> Self {
        items.sort_by_key(|(ok, _)| *ok);
        let pass = !items.is_empty() && items.iter().all(|(ok, _)| *ok);
        TheoremCheckResult { check: check.into(), scope, pass, witnesses: items.into_iter().map(|(_, v)| v).collect() }
    }

    pub fn to_json(&self) -> Value {
        let scope = match &self.scope {
            Scope::FreeModel { order } => json!({ "free_model": { "order": order } }),
            Scope::Loop { name } => json!({ "loop": name }),
        };
        json!({ "check": self.check, "scope": scope, "pass": self.pass, "witnesses": self.witnesses })
    }
}

impl fmt::Display for TheoremCheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {} ({} witnesses)", self.check, self.scope, if self.pass { "pass" } else { "FAIL" }, self.witnesses.len())
    }
}

fn weight_cap(cap: usize) -> Result<()> {
    if !(2..=BRIDGE_WEIGHT_CAP).contains(&cap) {
        return Err(Error::InvalidParameter(format!("weight cap {cap} outside 2..={BRIDGE_WEIGHT_CAP}")));
    }
    Ok(())
}

/// Degree profiles for a bracket of weight `n`: all ones, then one slot
/// raised to 2 or 3, keeping the total within `order`.
fn profiles(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![1; n]];
    for d in [2, 3] {
        for i in 0..n {
            let mut p = vec![1; n];
            p[i] = d;
            out.push(p);
        }
    }
    out.retain(|p| p.iter().sum::<u32>() <= order);
    out
}

/// Brackets evaluated on bracket values of degrees `p_1..p_n` must have
/// valuation at least `Σ p_i`.
pub fn check_nsequence_nu(order: u32, cap: usize) -> Result<TheoremCheckResult> {
    weight_cap(cap)?;
    let ctx = SeriesContext::new(order);
    let mut jobs: Vec<(BracketExpr, Vec<u32>)> = Vec::new();
    for n in 2..=cap {
        for b in enumerate_brackets(n, cap)? {
            for p in profiles(n, order) {
                jobs.push((b.clone(), p));
            }
        }
    }
    let items = jobs
        .par_iter()
        .map(|(b, p)| -> Result<(bool, Value)> {
            let mut fresh = Fresh::new(&ctx);
            let args = p.iter().map(|&d| fresh.element(d)).collect::<Result<Vec<_>>>()?;
            let nu = b.eval(&ctx, &args)?.sub(&Series::one(order)).nu();
            let need: u32 = p.iter().sum();
            let ok = nu.certifies(need, order);
            Ok((ok, json!({ "bracket": b.to_string(), "degrees": p, "valuation": nu.degree(), "required": need })))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremCheckResult::new("nsequence_nu", Scope::FreeModel { order }, items))
}

/// Every bracket of weight `n <= cap` on distinct generators lies in the
/// `n`-th dimension subloop of the free loop.
pub fn check_containment_free(order: u32, cap: usize) -> Result<TheoremCheckResult> {
    weight_cap(cap)?;
    let order = order.max(cap as u32);
    let mut brackets = Vec::new();
    for n in 2..=cap {
        brackets.extend(enumerate_brackets(n, cap)?);
    }
    let items = brackets
        .par_iter()
        .map(|b| -> Result<(bool, Value)> {
            let d = dimension_degree(&b.to_generic_term()?, order)?;
            let ok = d.certifies(b.weight() as u32, order);
            Ok((ok, json!({ "bracket": b.to_string(), "weight": b.weight(), "dimension_degree": d.degree() })))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremCheckResult::new("containment", Scope::FreeModel { order }, items))
}

fn subloop_json(s: &Subloop) -> Value {
    json!({ "size": s.len(), "elements": s.to_json() })
}

/// `γ_n ⊆ D_n` for `n = 1..=n_max`.
pub fn check_containment_finite(name: &str, l: &CayleyLoop, n_max: usize) -> Result<TheoremCheckResult> {
    let gamma = gamma_series(l, n_max)?;
    let powers = ideal_powers(l, n_max)?;
    let mut items = Vec::new();
    for (i, (g, ik)) in gamma.iter().zip(&powers).enumerate() {
        let d = dimension_subloop(l, ik);
        let outside: Vec<usize> = g.elements().iter().copied().filter(|&x| !d.contains(x)).collect();
        items.push((
            outside.is_empty(),
            json!({ "n": i + 1, "gamma": subloop_json(g), "dimension": subloop_json(&d), "outside": outside }),
        ));
    }
    Ok(TheoremCheckResult::new("containment", Scope::Loop { name: name.into() }, items))
}

/// On a finite loop: the isolator of `γ_n` (all of `L`, by periodicity
/// witnesses) equals `D_n` for every `n` up to one past the stabilization
/// of `dim I^n`.
pub fn check_jennings_finite(name: &str, l: &CayleyLoop) -> Result<TheoremCheckResult> {
    let mut n_max = 2;
    let powers = loop {
        let p = ideal_powers(l, n_max)?;
        if p[n_max - 1].dim() == p[n_max - 2].dim() {
            break p;
        }
        n_max += 1;
    };
    let gamma = gamma_series(l, n_max)?;
    let mut items = Vec::new();
    for (i, (g, ik)) in gamma.iter().zip(&powers).enumerate() {
        let d = dimension_subloop(l, ik);
        let iso = isolator(l, g)?;
        let mut bad = Vec::new();
        for (x, w) in &iso.witnesses {
            let deg = degree(w).total();
            let v = crate::terms::eval_term(w, l, &[*x])?;
            if deg == 0 || deg.unsigned_abs() as usize > l.order() || !g.contains(v) {
                bad.push(json!({ "element": x, "word": w.to_string(), "degree": deg }));
            }
        }
        let ok = bad.is_empty() && iso.subloop == d;
        let mut entry = json!({
            "n": i + 1,
            "dim_ideal": ik.dim(),
            "dimension": subloop_json(&d),
            "isolator": subloop_json(&iso.subloop),
            "gamma": subloop_json(g),
            "bad_witnesses": bad,
        });
        if i == 1 {
            entry["witnesses"] = iso.to_json()["witnesses"].clone();
        }
        items.push((ok, entry));
    }
    Ok(TheoremCheckResult::new("jennings", Scope::Loop { name: name.into() }, items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::BaseOp;
    use crate::finite_loop::corpus_loop;

    #[test]
    fn profile_generation() {
        assert_eq!(profiles(2, 3).len(), 3);
        assert_eq!(profiles(3, 3), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn nsequence_small() {
        let r = check_nsequence_nu(4, 3).unwrap();
        assert!(r.pass, "{:?}", r.witnesses.first());
        assert!(r.witnesses.len() > 5);
        assert!(check_nsequence_nu(4, 6).is_err());
    }

    #[test]
    fn commutator_of_commutators_and_associator_profile() {
        let ctx = SeriesContext::new(5);
        let mut fresh = Fresh::new(&ctx);
        let (a, b) = (fresh.element(2).unwrap(), fresh.element(2).unwrap());
        let v = crate::brackets::commutator(&a, &b, &ctx).unwrap();
        assert!(v.sub(&Series::one(5)).nu().certifies(4, 5));
        let mut fresh = Fresh::new(&ctx);
        let args: Vec<Series> = [2, 1, 1].iter().map(|&d| fresh.element(d).unwrap()).collect();
        let v = BaseOp::Associator.apply(&args, &ctx).unwrap();
        assert!(v.sub(&Series::one(5)).nu().certifies(4, 5));
        // a unit argument makes the bracket trivial
        let v = crate::brackets::commutator(&Series::one(5), &b, &ctx).unwrap();
        assert_eq!(v, Series::one(5));
    }

    #[test]
    fn containment_checks() {
        let r = check_containment_free(4, 4).unwrap();
        assert!(r.pass);
        for name in ["trivial", "z2", "loop5", "d8"] {
            let l = corpus_loop(name).unwrap();
            let r = check_containment_finite(name, &l, 3).unwrap();
            assert!(r.pass, "{name}");
        }
    }

    #[test]
    fn jennings_on_small_loops() {
        for name in ["trivial", "z2", "loop5", "s3"] {
            let l = corpus_loop(name).unwrap();
            let r = check_jennings_finite(name, &l).unwrap();
            assert!(r.pass, "{name}: {}", r.to_json());
            assert!(r.witnesses.len() >= 2);
        }
        let z2 = corpus_loop("z2").unwrap();
        let r = check_jennings_finite("z2", &z2).unwrap();
        assert_eq!(r.witnesses[1]["dimension"]["size"], 2);
        assert_eq!(r.to_json()["scope"]["loop"], "z2");
    }
}
