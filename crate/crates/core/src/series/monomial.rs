use std::cmp::Ordering;
use std::fmt;
use std::hash::{BuildHasherDefault, Hash, Hasher};
use std::sync::Arc;

use crate::terms::GeneratorId;

/// A parenthesized product of the `u_i`: a binary tree with labelled leaves.
///
/// Subtrees are shared; each node carries its degree and a structural hash so
/// map lookups never walk the tree unless two hashes collide.
#[derive(Clone)]
pub struct Monomial(Arc<Node>);

struct Node {
    hash: u64,
    degree: u32,
    kind: Kind,
}

enum Kind {
    Leaf(GeneratorId),
    Pair(Monomial, Monomial),
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Monomial {
    pub fn leaf(g: GeneratorId) -> Self {
        Monomial(Arc::new(Node {
            hash: mix(g.index() as u64 ^ 0x5851_f42d_4c95_7f2d),
            degree: 1,
            kind: Kind::Leaf(g),
        }))
    }

    /// Grafts two trees under a new root: `(self)(right)`.
    pub fn graft(&self, right: &Monomial) -> Self {
        let h = mix(self.0.hash.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ right.0.hash.rotate_left(29) ^ 0x2545_f491_4f6c_dd1d);
        Monomial(Arc::new(Node {
            hash: h,
            degree: self.0.degree + right.0.degree,
            kind: Kind::Pair(self.clone(), right.clone()),
        }))
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn as_leaf(&self) -> Option<GeneratorId> {
        match self.0.kind {
            Kind::Leaf(g) => Some(g),
            Kind::Pair(..) => None,
        }
    }

    pub fn children(&self) -> Option<(&Monomial, &Monomial)> {
        match &self.0.kind {
            Kind::Leaf(_) => None,
            Kind::Pair(l, r) => Some((l, r)),
        }
    }

    /// Leaf labels from left to right.
    pub fn leaves(&self) -> Vec<GeneratorId> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<GeneratorId>) {
        match &self.0.kind {
            Kind::Leaf(g) => out.push(*g),
            Kind::Pair(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    /// Right-normed product of leaves `u_{i1}(u_{i2}(...))`. Panics on an empty list.
    pub fn right_normed(gens: &[GeneratorId]) -> Self {
        let (last, init) = gens.split_last().expect("empty monomial");
        init.iter().rev().fold(Monomial::leaf(*last), |acc, g| Monomial::leaf(*g).graft(&acc))
    }

    fn preorder_cmp(&self, other: &Monomial) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Leaf(a), Kind::Leaf(b)) => a.cmp(b),
            (Kind::Leaf(_), Kind::Pair(..)) => Ordering::Less,
            (Kind::Pair(..), Kind::Leaf(_)) => Ordering::Greater,
            (Kind::Pair(al, ar), Kind::Pair(bl, br)) => al.preorder_cmp(bl).then_with(|| ar.preorder_cmp(br)),
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
        match &self.0.kind {
            Kind::Leaf(g) => write!(f, "u{}", g.index()),
            Kind::Pair(l, r) => {
                if !top {
                    write!(f, "(")?;
                }
                l.fmt_inner(f, false)?;
                write!(f, "*")?;
                r.fmt_inner(f, false)?;
                if !top {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.degree != other.0.degree {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Leaf(a), Kind::Leaf(b)) => a == b,
            (Kind::Pair(al, ar), Kind::Pair(bl, br)) => al == bl && ar == br,
            _ => false,
        }
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

/// Canonical order: degree first, then preorder traversal with leaves before
/// inner nodes and leaves compared by generator index.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.preorder_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        match &self.0.kind {
            Kind::Leaf(g) => s.serialize_u32(g.index()),
            Kind::Pair(l, r) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(l)?;
                seq.serialize_element(r)?;
                seq.end()
            }
        }
    }
}

impl<'de> serde::Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Monomial::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl Monomial {
    fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::Number(n) => {
                let i = n.as_u64().filter(|i| *i >= 1 && *i <= u32::MAX as u64).ok_or("leaf must be a positive integer")?;
                Ok(Monomial::leaf(GeneratorId::new(i as u32).map_err(|e| e.to_string())?))
            }
            serde_json::Value::Array(items) if items.len() == 2 => {
                Ok(Monomial::from_json(&items[0])?.graft(&Monomial::from_json(&items[1])?))
            }
            _ => Err(format!("invalid monomial tree {v}")),
        }
    }
}

/// Hasher that forwards the precomputed structural hash.
#[derive(Default, Clone, Copy)]
pub struct PassThroughHasher(u64);

impl Hasher for PassThroughHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 = mix(self.0 ^ *b as u64);
        }
    }

    fn write_u64(&mut self, i: u64) {
        self.0 = self.0.rotate_left(23) ^ i;
    }
}

pub type MonoBuildHasher = BuildHasherDefault<PassThroughHasher>;
