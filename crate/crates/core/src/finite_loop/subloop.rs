use std::collections::VecDeque;
use std::fmt;

use serde_json::{json, Value};

use super::CayleyLoop;
use crate::error::{Error, Result};

/// A subset of a Cayley loop containing the identity, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subloop {
    elements: Vec<usize>,
}

impl Subloop {
    pub fn trivial() -> Self {
        Subloop { elements: vec![0] }
    }

    pub fn whole(l: &CayleyLoop) -> Self {
        Subloop { elements: l.elements().collect() }
    }

    pub(crate) fn from_mask(mask: &[bool]) -> Self {
        Subloop { elements: (0..mask.len()).filter(|&i| mask[i]).collect() }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements == [0]
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Subloop) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &x in &self.elements {
            m[x] = true;
        }
        m
    }

    pub fn to_json(&self) -> Value {
        json!(self.elements)
    }
}

impl fmt::Debug for Subloop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subloop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Incremental closure of a generating set, either as a subloop or as a
/// normal subloop.
pub(crate) struct Closure<'a> {
    l: &'a CayleyLoop,
    normal: bool,
    member: Vec<bool>,
    elems: Vec<usize>,
}

impl<'a> Closure<'a> {
    pub(crate) fn new(l: &'a CayleyLoop, normal: bool) -> Self {
        let mut member = vec![false; l.order()];
        member[0] = true;
        Closure { l, normal, member, elems: vec![0] }
    }

    pub(crate) fn len(&self) -> usize {
        self.elems.len()
    }

    /// Adds `x` and everything it forces; returns whether anything changed.
    pub(crate) fn add(&mut self, x: usize) -> bool {
        if self.member[x] {
            return false;
        }
        let l = self.l;
        let n = l.order();
        let mut queue = VecDeque::new();
        let push = |y: usize, member: &mut Vec<bool>, elems: &mut Vec<usize>, queue: &mut VecDeque<usize>| {
            if !member[y] {
                member[y] = true;
                elems.push(y);
                queue.push_back(y);
            }
        };
        push(x, &mut self.member, &mut self.elems, &mut queue);
        while let Some(s) = queue.pop_front() {
            let mut i = 0;
            while i < self.elems.len() {
                let t = self.elems[i];
                for y in [l.op(s, t), l.op(t, s), l.left_div(s, t), l.left_div(t, s), l.right_div(s, t), l.right_div(t, s)] {
                    push(y, &mut self.member, &mut self.elems, &mut queue);
                }
                i += 1;
            }
            if self.normal {
                for a in 0..n {
                    // T(a): a \ (s a)
                    push(l.left_div(a, l.op(s, a)), &mut self.member, &mut self.elems, &mut queue);
                    for b in 0..n {
                        let ab = l.op(a, b);
                        // L(a,b) = L_{ab}^{-1} L_a L_b and R(a,b) = R_{ab}^{-1} R_b R_a
                        push(l.left_div(ab, l.op(a, l.op(b, s))), &mut self.member, &mut self.elems, &mut queue);
                        push(l.right_div(l.op(l.op(s, a), b), ab), &mut self.member, &mut self.elems, &mut queue);
                    }
                }
            }
        }
        true
    }

    pub(crate) fn finish(&self) -> Subloop {
        Subloop::from_mask(&self.member)
    }
}

fn check_all(l: &CayleyLoop, gens: &[usize]) -> Result<()> {
    gens.iter().try_for_each(|&g| l.check(g))
}

/// The subloop generated by `gens`.
pub fn subloop_closure(l: &CayleyLoop, gens: &[usize]) -> Result<Subloop> {
    check_all(l, gens)?;
    let mut c = Closure::new(l, false);
    for &g in gens {
        c.add(g);
    }
    Ok(c.finish())
}

/// The smallest normal subloop containing `gens`.
pub fn normal_closure(l: &CayleyLoop, gens: &[usize]) -> Result<Subloop> {
    check_all(l, gens)?;
    let mut c = Closure::new(l, true);
    for &g in gens {
        c.add(g);
    }
    Ok(c.finish())
}

/// Checks closure under the loop operations and invariance under the inner
/// mappings `L(x,y)`, `R(x,y)` and `T(x)`, naming the first violation.
pub fn verify_normal(l: &CayleyLoop, k: &Subloop) -> Result<()> {
    check_all(l, k.elements())?;
    if !k.contains(0) {
        return Err(Error::NotNormal("missing the identity".into()));
    }
    let n = l.order();
    for &s in k.elements() {
        for &t in k.elements() {
            for (y, what) in [(l.op(s, t), "products"), (l.left_div(s, t), "left division"), (l.right_div(s, t), "right division")] {
                if !k.contains(y) {
                    return Err(Error::NotNormal(format!("not closed under {what}: {s}, {t} gives {y}")));
                }
            }
        }
        for a in 0..n {
            let y = l.left_div(a, l.op(s, a));
            if !k.contains(y) {
                return Err(Error::NotNormal(format!("T({a}) maps {s} to {y}")));
            }
            for b in 0..n {
                let ab = l.op(a, b);
                let y = l.left_div(ab, l.op(a, l.op(b, s)));
                if !k.contains(y) {
                    return Err(Error::NotNormal(format!("L({a},{b}) maps {s} to {y}")));
                }
                let y = l.right_div(l.op(l.op(s, a), b), ab);
                if !k.contains(y) {
                    return Err(Error::NotNormal(format!("R({a},{b}) maps {s} to {y}")));
                }
            }
        }
    }
    Ok(())
}

pub fn is_normal(l: &CayleyLoop, k: &Subloop) -> bool {
    verify_normal(l, k).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_loop::{corpus, corpus_loop};

    /// Closure under conjugation and products, by brute force.
    fn conjugate_closure(g: &CayleyLoop, gens: &[usize]) -> Vec<bool> {
        let n = g.order();
        let mut m = vec![false; n];
        m[0] = true;
        for &x in gens {
            m[x] = true;
        }
        loop {
            let mut changed = false;
            for s in 0..n {
                if !m[s] {
                    continue;
                }
                for t in 0..n {
                    let candidates = [
                        if m[t] { g.op(s, t) } else { 0 },
                        g.left_div(t, g.op(s, t)),
                        g.left_div(s, 0),
                    ];
                    for y in candidates {
                        if !m[y] {
                            m[y] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return m;
            }
        }
    }

    #[test]
    fn trivial_cases() {
        for (_, l) in corpus() {
            assert!(normal_closure(&l, &[]).unwrap().is_trivial());
            let all: Vec<usize> = l.elements().collect();
            assert_eq!(normal_closure(&l, &all).unwrap(), Subloop::whole(&l));
        }
        let z2 = corpus_loop("z2").unwrap();
        assert!(normal_closure(&z2, &[2]).is_err());
    }

    #[test]
    fn group_closure_matches_conjugation() {
        for name in ["s3", "d8", "d32"] {
            let g = corpus_loop(name).unwrap();
            for x in g.elements() {
                let nc = normal_closure(&g, &[x]).unwrap();
                assert_eq!(nc, Subloop::from_mask(&conjugate_closure(&g, &[x])), "{name} {x}");
                assert!(is_normal(&g, &nc));
            }
        }
    }

    #[test]
    fn closures_are_verified() {
        for (name, l) in corpus() {
            for x in l.elements().take(6) {
                let s = subloop_closure(&l, &[x]).unwrap();
                let nc = normal_closure(&l, &[x]).unwrap();
                assert!(s.is_subset(&nc), "{name}");
                assert!(verify_normal(&l, &nc).is_ok(), "{name}");
            }
        }
    }

    #[test]
    fn non_normal_subgroup_is_detected() {
        let s3 = corpus_loop("s3").unwrap();
        // some element generates a subgroup of order 2, which is not normal
        let two = s3.elements().map(|x| subloop_closure(&s3, &[x]).unwrap()).find(|s| s.len() == 2).unwrap();
        assert!(matches!(verify_normal(&s3, &two), Err(Error::NotNormal(_))));
    }
}
