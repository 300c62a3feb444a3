use std::fmt;

use serde_json::{json, Value};

use super::linalg::{dimension_subloop, ideal_powers};
use super::subloop::{verify_normal, Closure};
use super::{CayleyLoop, Subloop};
use crate::brackets::{BaseOp, DeviationIndices};
use crate::error::{Error, Result};

/// Largest loop order for which deviations are enumerated.
pub const DEVIATION_ORDER_CAP: usize = 16;
/// Largest filtration index for which deviations are enumerated.
pub const DEVIATION_WEIGHT_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_order: usize,
    pub max_weight: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_order: DEVIATION_ORDER_CAP, max_weight: DEVIATION_WEIGHT_CAP }
    }
}

fn dev_value(l: &CayleyLoop, idx: &[usize], args: &[usize]) -> usize {
    match idx.split_last() {
        None => l.assoc(args[0], args[1], args[2]),
        Some((&alpha, lower)) => {
            let splice = |v: usize| {
                let mut a = Vec::with_capacity(args.len() - 1);
                a.extend_from_slice(&args[..alpha - 1]);
                a.push(v);
                a.extend_from_slice(&args[alpha + 1..]);
                a
            };
            let (x, y) = (args[alpha - 1], args[alpha]);
            let fx = dev_value(l, lower, &splice(x));
            let fy = dev_value(l, lower, &splice(y));
            let fxy = dev_value(l, lower, &splice(l.op(x, y)));
            l.left_div(l.op(fx, fy), fxy)
        }
    }
}

/// Compositions of `total` into `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Calls `f` on every tuple drawn from the given sets (identity excluded)
/// until it returns `true`.
fn for_each_tuple(sets: &[&[usize]], f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(sets: &[&[usize]], cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == sets.len() {
            return f(cur);
        }
        for &x in sets[cur.len()] {
            if x == 0 {
                continue;
            }
            cur.push(x);
            let stop = go(sets, cur, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(sets, &mut Vec::with_capacity(sets.len()), f)
}

/// `gamma[k]` holds `γ_{k+1}`; computes `γ_n` from the earlier terms.
fn next_gamma(l: &CayleyLoop, gamma: &[Subloop], n: usize, caps: Caps) -> Result<Subloop> {
    let prev = &gamma[n - 2];
    if prev.is_trivial() {
        return Ok(Subloop::trivial());
    }
    let g = |p: usize| gamma[p - 1].elements();
    let mut c = Closure::new(l, true);
    let target = prev.len();

    for p in 1..n {
        let q = n - p;
        let stop = for_each_tuple(&[g(p), g(q)], &mut |a| {
            c.add(l.comm(a[0], a[1]));
            c.len() == target
        });
        if stop {
            return Ok(c.finish());
        }
    }
    if l.is_associative() {
        return Ok(c.finish());
    }
    for weights in compositions(n.max(3), 3) {
        let sets: Vec<&[usize]> = weights.iter().map(|&p| g(p)).collect();
        if for_each_tuple(&sets, &mut |a| {
            c.add(l.assoc(a[0], a[1], a[2]));
            c.len() == target
        }) {
            return Ok(c.finish());
        }
    }
    for level in 1..=n.saturating_sub(3) {
        if l.order() > caps.max_order || n > caps.max_weight {
            return Err(Error::InvalidParameter(format!(
                "γ_{n} of a nonassociative loop of order {} needs deviations beyond the caps (order ≤ {}, index ≤ {})",
                l.order(),
                caps.max_order,
                caps.max_weight
            )));
        }
        for idx in DeviationIndices::all(BaseOp::Associator, level) {
            for weights in compositions(n, level + 3) {
                let sets: Vec<&[usize]> = weights.iter().map(|&p| g(p)).collect();
                if for_each_tuple(&sets, &mut |a| {
                    c.add(dev_value(l, idx.as_slice(), a));
                    c.len() == target
                }) {
                    return Ok(c.finish());
                }
            }
        }
    }
    Ok(c.finish())
}

/// `γ_1, .., γ_{n_max}` with the default caps.
pub fn gamma_series(l: &CayleyLoop, n_max: usize) -> Result<Vec<Subloop>> {
    gamma_series_with(l, n_max, Caps::default())
}

pub fn gamma_series_with(l: &CayleyLoop, n_max: usize, caps: Caps) -> Result<Vec<Subloop>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let whole = Subloop::whole(l);
    let mut gamma = vec![whole.clone()];
    for n in 2..=n_max {
        // once γ_2 = L every later term is L as well
        let next = if n > 2 && gamma[1] == whole { whole.clone() } else { next_gamma(l, &gamma, n, caps)? };
        gamma.push(next);
    }
    Ok(gamma)
}

/// Normal closure of `[k,x]`, `(k,x,y)`, `(x,k,y)`, `(x,y,k)` over `k` in `prev`.
fn next_bruck(l: &CayleyLoop, prev: &Subloop) -> Subloop {
    let mut c = Closure::new(l, true);
    let target = prev.len();
    'outer: for &k in prev.elements() {
        for x in l.elements() {
            c.add(l.comm(k, x));
            for y in l.elements() {
                c.add(l.assoc(k, x, y));
                c.add(l.assoc(x, k, y));
                c.add(l.assoc(x, y, k));
            }
            if c.len() == target {
                break 'outer;
            }
        }
    }
    c.finish()
}

pub fn bruck_series(l: &CayleyLoop, n_max: usize) -> Result<Vec<Subloop>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut series = vec![Subloop::whole(l)];
    while series.len() < n_max {
        let last = series.last().expect("nonempty");
        let next = if series.len() >= 2 && series[series.len() - 2] == *last { last.clone() } else { next_bruck(l, last) };
        series.push(next);
    }
    Ok(series)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    Class(usize),
    NotNilpotent,
    /// Not settled within the computed range.
    Undetermined,
}

impl fmt::Display for Nilpotency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nilpotency::Class(c) => write!(f, "{c}"),
            Nilpotency::NotNilpotent => write!(f, "not nilpotent"),
            Nilpotency::Undetermined => write!(f, "undetermined"),
        }
    }
}

impl Nilpotency {
    pub fn to_json(&self) -> Value {
        match self {
            Nilpotency::Class(c) => json!(c),
            Nilpotency::NotNilpotent => json!("not nilpotent"),
            Nilpotency::Undetermined => json!("undetermined"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classes {
    pub gamma: Nilpotency,
    pub bruck: Nilpotency,
}

fn class_of(series: &[Subloop]) -> Option<usize> {
    series.iter().position(Subloop::is_trivial)
}

/// Classes read off computed series. The Bruck series is stable once two
/// consecutive terms agree; a stable nontrivial Bruck term bounds γ from below.
fn classify(l: &CayleyLoop, gamma: &[Subloop], bruck: &[Subloop]) -> Classes {
    let bruck_stuck = bruck.windows(2).any(|w| w[0] == w[1] && !w[0].is_trivial());
    let gamma_stuck = gamma.len() >= 2 && gamma[1] == gamma[0] && !gamma[0].is_trivial();
    let group_stuck = l.is_associative() && gamma.windows(2).any(|w| w[0] == w[1] && !w[0].is_trivial());
    let b = match class_of(bruck) {
        Some(c) => Nilpotency::Class(c),
        None if bruck_stuck => Nilpotency::NotNilpotent,
        None => Nilpotency::Undetermined,
    };
    let g = match class_of(gamma) {
        Some(c) => Nilpotency::Class(c),
        None if bruck_stuck || gamma_stuck || group_stuck => Nilpotency::NotNilpotent,
        None => Nilpotency::Undetermined,
    };
    Classes { gamma: g, bruck: b }
}

/// Nilpotency classes with respect to γ and the Bruck series. γ is followed
/// up to the deviation weight cap.
pub fn nilpotency_class(l: &CayleyLoop) -> Result<Classes> {
    let bruck = bruck_series(l, l.order() + 2)?;
    let n_max = if l.is_associative() { l.order() + 2 } else { DEVIATION_WEIGHT_CAP };
    let mut gamma = vec![Subloop::whole(l)];
    let caps = Caps::default();
    while gamma.len() < n_max {
        let n = gamma.len() + 1;
        let next = if n > 2 && gamma[1] == gamma[0] { gamma[0].clone() } else { next_gamma(l, &gamma, n, caps)? };
        let done = next.is_trivial() || (l.is_associative() && next == gamma[n - 2]);
        gamma.push(next);
        if done || (gamma[1] == gamma[0]) {
            break;
        }
    }
    Ok(classify(l, &gamma, &bruck))
}

/// The loop of cosets `xN`, each represented by its least element.
pub fn quotient(l: &CayleyLoop, nsub: &Subloop) -> Result<CayleyLoop> {
    verify_normal(l, nsub)?;
    let n = l.order();
    let mut coset = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in l.elements() {
        if coset[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &k in nsub.elements() {
            let y = l.op(x, k);
            if coset[y] != usize::MAX && coset[y] != id {
                return Err(Error::NotNormal(format!("cosets of {x} overlap")));
            }
            coset[y] = id;
        }
    }
    let m = reps.len();
    let rows: Vec<Vec<usize>> = (0..m).map(|i| (0..m).map(|j| coset[l.op(reps[i], reps[j])]).collect()).collect();
    for a in l.elements() {
        for b in l.elements() {
            if coset[l.op(a, b)] != rows[coset[a]][coset[b]] {
                return Err(Error::NotNormal(format!("coset product of {a} and {b} is not well defined")));
            }
        }
    }
    CayleyLoop::from_rows(rows)
}

#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub order: usize,
    pub gamma: Vec<Subloop>,
    pub bruck: Vec<Subloop>,
    pub dims: Vec<Subloop>,
    pub ideal_dims: Vec<usize>,
    pub classes: Classes,
    /// `Bruck_n ⊆ γ_n` for every computed `n`.
    pub bruck_in_gamma: bool,
    /// Indices `n` with `Bruck_n` strictly inside `γ_n`.
    pub strict_gaps: Vec<usize>,
    /// `γ_n ⊆ D_n` for every computed `n`.
    pub gamma_in_dims: bool,
}

/// γ, Bruck and dimension series up to `n_max`, with the containments between them.
pub fn analyze(l: &CayleyLoop, n_max: usize) -> Result<FiltrationReport> {
    analyze_with(l, n_max, Caps::default())
}

pub fn analyze_with(l: &CayleyLoop, n_max: usize, caps: Caps) -> Result<FiltrationReport> {
    let gamma = gamma_series_with(l, n_max, caps)?;
    let bruck = bruck_series(l, n_max)?;
    let powers = ideal_powers(l, n_max)?;
    let dims: Vec<Subloop> = powers.iter().map(|p| dimension_subloop(l, p)).collect();
    let bruck_in_gamma = bruck.iter().zip(&gamma).all(|(b, g)| b.is_subset(g));
    let strict_gaps = bruck.iter().zip(&gamma).enumerate().filter(|(_, (b, g))| b != g).map(|(i, _)| i + 1).collect();
    let gamma_in_dims = gamma.iter().zip(&dims).all(|(g, d)| g.is_subset(d));
    let classes = classify(l, &gamma, &bruck);
    Ok(FiltrationReport {
        order: l.order(),
        ideal_dims: powers.iter().map(|p| p.dim()).collect(),
        gamma,
        bruck,
        dims,
        classes,
        bruck_in_gamma,
        strict_gaps,
        gamma_in_dims,
    })
}

impl FiltrationReport {
    pub fn to_json(&self) -> Value {
        let list = |s: &[Subloop]| s.iter().map(Subloop::to_json).collect::<Vec<_>>();
        json!({
            "order": self.order,
            "gamma": list(&self.gamma),
            "bruck": list(&self.bruck),
            "dims": list(&self.dims),
            "ideal_dims": self.ideal_dims,
            "gamma_class": self.classes.gamma.to_json(),
            "bruck_class": self.classes.bruck.to_json(),
            "bruck_in_gamma": self.bruck_in_gamma,
            "strict_gaps": self.strict_gaps,
            "gamma_in_dims": self.gamma_in_dims,
        })
    }
}

impl fmt::Display for FiltrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "loop of order {}", self.order)?;
        for (i, ((g, b), d)) in self.gamma.iter().zip(&self.bruck).zip(&self.dims).enumerate() {
            writeln!(
                f,
                "n = {}: |γ| = {:>2}  |Bruck| = {:>2}  |D| = {:>2}  dim I^n = {}",
                i + 1,
                g.len(),
                b.len(),
                d.len(),
                self.ideal_dims[i]
            )?;
        }
        writeln!(f, "γ class: {}", self.classes.gamma)?;
        writeln!(f, "Bruck class: {}", self.classes.bruck)?;
        writeln!(f, "Bruck ⊆ γ: {}", if self.bruck_in_gamma { "yes" } else { "NO" })?;
        if !self.strict_gaps.is_empty() {
            writeln!(f, "Bruck strictly inside γ at n = {:?}", self.strict_gaps)?;
        }
        write!(f, "γ ⊆ D: {}", if self.gamma_in_dims { "yes" } else { "NO" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::enumerate_brackets;
    use crate::finite_loop::{corpus, corpus_loop, is_normal, normal_closure};

    /// Lower central series of a group from commutators alone.
    fn group_lcs(g: &CayleyLoop, n_max: usize) -> Vec<Subloop> {
        let mut s = vec![Subloop::whole(g)];
        while s.len() < n_max {
            let last = s.last().unwrap();
            let gens: Vec<usize> = last.elements().iter().flat_map(|&k| g.elements().map(move |x| g.comm(k, x))).collect();
            s.push(normal_closure(g, &gens).unwrap());
        }
        s
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(6, 4).len(), 10);
        assert!(compositions(2, 3).is_empty());
    }

    #[test]
    fn abelian_groups() {
        for name in ["trivial", "z2", "z4", "klein4"] {
            let l = corpus_loop(name).unwrap();
            let g = gamma_series(&l, 3).unwrap();
            assert!(g[1].is_trivial(), "{name}");
            assert!(bruck_series(&l, 3).unwrap()[1].is_trivial());
            let c = nilpotency_class(&l).unwrap();
            let expect = if name == "trivial" { 0 } else { 1 };
            assert_eq!(c, Classes { gamma: Nilpotency::Class(expect), bruck: Nilpotency::Class(expect) });
        }
    }

    #[test]
    fn groups_match_lower_central_series() {
        for name in ["s3", "d8", "d32"] {
            let g = corpus_loop(name).unwrap();
            let lcs = group_lcs(&g, 6);
            assert_eq!(gamma_series(&g, 6).unwrap(), lcs, "{name}");
            assert_eq!(bruck_series(&g, 6).unwrap(), lcs, "{name}");
        }
        let d8 = corpus_loop("d8").unwrap();
        assert_eq!(nilpotency_class(&d8).unwrap(), Classes { gamma: Nilpotency::Class(2), bruck: Nilpotency::Class(2) });
        let d32 = corpus_loop("d32").unwrap();
        assert_eq!(nilpotency_class(&d32).unwrap().gamma, Nilpotency::Class(4));
        let s3 = corpus_loop("s3").unwrap();
        assert_eq!(nilpotency_class(&s3).unwrap().gamma, Nilpotency::NotNilpotent);
    }

    #[test]
    fn loop5_gamma2_by_brute_force() {
        let l = corpus_loop("loop5").unwrap();
        // all weight 2 and 3 bracket values on L, then their normal closure
        let mut values = Vec::new();
        for n in 2..=3 {
            for b in enumerate_brackets(n, n).unwrap() {
                let mut args = vec![0; n];
                loop {
                    values.push(b.eval(&l, &args).unwrap());
                    let mut i = 0;
                    while i < n && args[i] == l.order() - 1 {
                        args[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                    args[i] += 1;
                }
            }
        }
        let oracle = normal_closure(&l, &values).unwrap();
        assert_eq!(gamma_series(&l, 2).unwrap()[1], oracle);
    }

    #[test]
    fn series_are_descending_normal_and_nested() {
        for (name, l) in corpus() {
            let g = gamma_series(&l, 5).unwrap();
            let b = bruck_series(&l, 5).unwrap();
            for s in g.iter().chain(&b) {
                assert!(is_normal(&l, s), "{name}");
            }
            for w in g.windows(2).chain(b.windows(2)) {
                assert!(w[1].is_subset(&w[0]), "{name}");
            }
            for (x, y) in b.iter().zip(&g) {
                assert!(x.is_subset(y), "{name}");
            }
        }
    }

    #[test]
    fn quotients() {
        for (name, l) in corpus() {
            let q = quotient(&l, &Subloop::trivial()).unwrap();
            assert_eq!(q, l, "{name}");
            assert_eq!(quotient(&l, &Subloop::whole(&l)).unwrap().order(), 1);
        }
        for name in ["s3", "d8", "d32"] {
            let g = corpus_loop(name).unwrap();
            let gamma = gamma_series(&g, 2).unwrap();
            let q = quotient(&g, &gamma[1]).unwrap();
            assert!(q.is_commutative() && q.is_associative(), "{name}");
        }
        let s3 = corpus_loop("s3").unwrap();
        let two = s3.elements().map(|x| super::super::subloop_closure(&s3, &[x]).unwrap()).find(|s| s.len() == 2).unwrap();
        assert!(matches!(quotient(&s3, &two), Err(Error::NotNormal(_))));
    }

    #[test]
    fn quotient_by_gamma_lowers_class() {
        for name in ["d8", "d32", "moufang16"] {
            let l = corpus_loop(name).unwrap();
            let g = gamma_series(&l, 4).unwrap();
            for n in 1..4 {
                let q = quotient(&l, &g[n]).unwrap();
                match nilpotency_class(&q).unwrap().gamma {
                    Nilpotency::Class(c) => assert!(c <= n, "{name} n = {n}: class {c}"),
                    other => panic!("{name}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn analyze_reports() {
        let z2 = corpus_loop("z2").unwrap();
        let r = analyze(&z2, 3).unwrap();
        assert!(r.gamma[1].is_trivial());
        assert_eq!(r.dims[1], Subloop::whole(&z2));
        assert_eq!(r.classes, Classes { gamma: Nilpotency::Class(1), bruck: Nilpotency::Class(1) });
        let l5 = corpus_loop("loop5").unwrap();
        let r = analyze(&l5, 4).unwrap();
        assert!(r.bruck_in_gamma && r.gamma_in_dims);
        let text = r.to_string();
        assert!(text.contains("Bruck ⊆ γ: yes"));
        assert_eq!(r.to_json()["gamma"].as_array().unwrap().len(), 4);
    }
}
