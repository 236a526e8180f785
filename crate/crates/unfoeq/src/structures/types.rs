use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::structure::{Elem, FiniteStructure};
use crate::logic::Signature;
use crate::{Error, Result};

/// Atomic 1-type: bit `s` says whether symbol `s` holds on `(x1,..,x1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType1(FixedBitSet);

/// Atomic 2-type: for each symbol of arity `r`, one bit per tuple in
/// `{x1,x2}^r`, tuples ordered lexicographically with `x1 < x2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType2(FixedBitSet);

/// Pattern of a tuple over two variables: bit `i` (from the left) is set when
/// position `i` holds `x2`.
fn pattern_tuple(code: usize, arity: usize, a: Elem, b: Elem) -> Vec<Elem> {
    (0..arity)
        .map(|i| if code >> (arity - 1 - i) & 1 == 1 { b } else { a })
        .collect()
}

fn offsets(sig: &Signature) -> Vec<usize> {
    let mut off = Vec::with_capacity(sig.num_symbols() + 1);
    let mut acc = 0;
    for id in 0..sig.num_symbols() {
        off.push(acc);
        acc += 1 << sig.arity(id);
    }
    off.push(acc);
    off
}

impl AtomicType1 {
    pub fn holds(&self, sym: usize) -> bool {
        self.0.contains(sym)
    }

    /// Positive symbol ids.
    pub fn positives(&self) -> Vec<usize> {
        self.0.ones().collect()
    }

    pub fn describe(&self, sig: &Signature) -> String {
        let lits: Vec<String> = (0..sig.num_symbols())
            .map(|id| {
                let args = vec!["x1"; sig.arity(id)].join(",");
                let neg = if self.holds(id) { "" } else { "~" };
                format!("{neg}{}({args})", sig.name(id))
            })
            .collect();
        lits.join(" & ")
    }
}

impl AtomicType2 {
    /// Whether the literal for `sym` on the tuple given by `code` is positive.
    pub fn holds(&self, sig: &Signature, sym: usize, code: usize) -> bool {
        self.0.contains(offsets(sig)[sym] + code)
    }

    /// Whether `sym(x1,x2)` (for binary `sym`) holds.
    pub fn forward(&self, sig: &Signature, sym: usize) -> bool {
        self.holds(sig, sym, 0b01)
    }

    /// Whether `sym(x2,x1)` holds.
    pub fn backward(&self, sig: &Signature, sym: usize) -> bool {
        self.holds(sig, sym, 0b10)
    }

    /// The embedded 1-type of `x1` (`which = 0`) or `x2` (`which = 1`).
    pub fn one_type(&self, sig: &Signature, which: usize) -> AtomicType1 {
        let off = offsets(sig);
        let mut bits = FixedBitSet::with_capacity(sig.num_symbols());
        for id in 0..sig.num_symbols() {
            let all = (1 << sig.arity(id)) - 1;
            let code = if which == 0 { 0 } else { all };
            bits.set(id, self.0.contains(off[id] + code));
        }
        AtomicType1(bits)
    }

    /// The same type with `x1` and `x2` exchanged.
    pub fn swap(&self, sig: &Signature) -> AtomicType2 {
        let off = offsets(sig);
        let mut bits = FixedBitSet::with_capacity(off[sig.num_symbols()]);
        for id in 0..sig.num_symbols() {
            let all = (1 << sig.arity(id)) - 1;
            for code in 0..=all {
                bits.set(off[id] + (all ^ code), self.0.contains(off[id] + code));
            }
        }
        AtomicType2(bits)
    }

    /// Bitmask of distinguished relations holding from `x1` to `x2`.
    pub fn eq_mask(&self, sig: &Signature) -> u32 {
        let mut m = 0;
        for j in 0..sig.k() {
            if self.forward(sig, sig.dist_id(j)) {
                m |= 1 << j;
            }
        }
        m
    }

    /// Whether some base literal with both variables is positive.
    pub fn has_base_connection(&self, sig: &Signature) -> bool {
        let off = offsets(sig);
        sig.base().iter().enumerate().any(|(id, (_, r))| {
            let all = (1usize << r) - 1;
            (1..all).any(|code| self.0.contains(off[id] + code))
        })
    }

    /// True when every positive literal of `self` is positive in `other`
    /// (same embedded 1-types assumed by callers).
    pub fn is_weakening_of(&self, other: &AtomicType2) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Removes the distinguished connections between the two variables.
    pub fn without_eq(&self, sig: &Signature, mask: u32) -> AtomicType2 {
        let off = offsets(sig);
        let mut bits = self.0.clone();
        for j in 0..sig.k() {
            if mask >> j & 1 == 1 {
                let id = sig.dist_id(j);
                bits.set(off[id] + 0b01, false);
                bits.set(off[id] + 0b10, false);
            }
        }
        AtomicType2(bits)
    }
}

impl FiniteStructure {
    pub fn atomic_type(&self, a: Elem) -> AtomicType1 {
        let sig = self.sig();
        let mut bits = FixedBitSet::with_capacity(sig.num_symbols());
        for id in 0..sig.num_symbols() {
            bits.set(id, self.holds(id, &vec![a; sig.arity(id)]));
        }
        AtomicType1(bits)
    }

    pub fn atomic_type2(&self, a: Elem, b: Elem) -> Result<AtomicType2> {
        if a == b {
            return Err(Error::Invalid("atomic 2-type needs distinct elements".into()));
        }
        let sig = self.sig();
        let off = offsets(sig);
        let mut bits = FixedBitSet::with_capacity(off[sig.num_symbols()]);
        for id in 0..sig.num_symbols() {
            let r = sig.arity(id);
            for code in 0..1usize << r {
                bits.set(off[id] + code, self.holds(id, &pattern_tuple(code, r, a, b)));
            }
        }
        Ok(AtomicType2(bits))
    }

    /// Sets the 1-type of `a` (tuples `(a,..,a)`) to exactly `alpha`.
    pub fn realize_type1(&mut self, a: Elem, alpha: &AtomicType1) {
        let sig = self.sig().clone();
        for id in 0..sig.num_symbols() {
            let t = vec![a; sig.arity(id)];
            if alpha.holds(id) {
                self.add_tuple(id, t).expect("element in domain");
            } else {
                self.remove_tuple(id, &t);
            }
        }
    }

    /// Sets every tuple over `{a,b}` to agree with `beta`.
    pub fn realize_type2(&mut self, a: Elem, b: Elem, beta: &AtomicType2) {
        let sig = self.sig().clone();
        let off = offsets(&sig);
        for id in 0..sig.num_symbols() {
            let r = sig.arity(id);
            for code in 0..1usize << r {
                let t = pattern_tuple(code, r, a, b);
                if beta.0.contains(off[id] + code) {
                    self.add_tuple(id, t).expect("element in domain");
                } else {
                    self.remove_tuple(id, &t);
                }
            }
        }
    }

    /// Adds the positive literals of `beta` that involve both `a` and `b`.
    pub fn join_by(&mut self, a: Elem, b: Elem, beta: &AtomicType2) {
        let sig = self.sig().clone();
        let off = offsets(&sig);
        for id in 0..sig.num_symbols() {
            let r = sig.arity(id);
            let all = (1usize << r) - 1;
            for code in 1..all {
                if beta.0.contains(off[id] + code) {
                    self.add_tuple(id, pattern_tuple(code, r, a, b))
                        .expect("element in domain");
                }
            }
        }
    }

    /// Generalized type of `a`: its 1-type and, for every subset of the
    /// distinguished symbols, the 1-types visible through all of them.
    pub fn generalized_type(&self, a: Elem) -> GeneralizedType {
        let k = self.sig().k();
        let mut f = vec![BTreeSet::new(); 1 << k];
        for b in self.elements() {
            let mab = self.eq_mask(a, b);
            let tb = self.atomic_type(b);
            for (mask, set) in f.iter_mut().enumerate() {
                if mask as u32 & mab == mask as u32 {
                    set.insert(tb.clone());
                }
            }
        }
        GeneralizedType {
            alpha: self.atomic_type(a),
            f,
        }
    }
}

/// A 1-type paired with its eq-visibility function. `f[mask]` lists the
/// 1-types of elements connected by every relation in `mask`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralizedType {
    pub alpha: AtomicType1,
    pub f: Vec<BTreeSet<AtomicType1>>,
}

impl GeneralizedType {
    pub fn visible(&self, mask: u32) -> &BTreeSet<AtomicType1> {
        &self.f[mask as usize]
    }

    /// Membership of `alpha` in every set and antitonicity.
    pub fn check_invariants(&self) -> bool {
        let n = self.f.len();
        (0..n).all(|m| self.f[m].contains(&self.alpha))
            && (0..n).all(|m1| {
                (0..n)
                    .filter(|m2| m1 & m2 == m1)
                    .all(|m2| self.f[m2].is_subset(&self.f[m1]))
            })
    }
}

/// Same 1-type and pointwise smaller visibility sets.
pub fn is_safe_reduction(g1: &GeneralizedType, g2: &GeneralizedType) -> bool {
    g1.alpha == g2.alpha
        && g1.f.len() == g2.f.len()
        && g1.f.iter().zip(&g2.f).all(|(a, b)| a.is_subset(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_base("P", 1)
            .with_base("R", 2)
            .with_dist("E1")
            .with_dist("E2")
    }

    #[test]
    fn singleton_type_has_reflexive_eqs() {
        let mut s = FiniteStructure::new(&sig(), 1);
        s.add_named("P", vec![0]).unwrap();
        let t = s.atomic_type(0);
        assert_eq!(t.positives(), vec![0, 2, 3]);
        let g = s.generalized_type(0);
        assert!(g.f.iter().all(|set| set.len() == 1 && set.contains(&t)));
    }

    #[test]
    fn two_type_literals_and_swap() {
        let mut s = FiniteStructure::new(&sig(), 2);
        s.add_named("E1", vec![0, 1]).unwrap();
        s.add_named("E1", vec![1, 0]).unwrap();
        s.close_in_place();
        let g = s.sig().clone();
        let b = s.atomic_type2(0, 1).unwrap();
        assert!(b.forward(&g, 2) && b.backward(&g, 2));
        assert!(!b.forward(&g, 1));
        assert_eq!(b.eq_mask(&g), 0b01);
        s.add_named("R", vec![0, 1]).unwrap();
        let b = s.atomic_type2(0, 1).unwrap();
        assert_eq!(b.swap(&g), s.atomic_type2(1, 0).unwrap());
        assert_eq!(b.swap(&g).swap(&g), b);
        assert_eq!(b.one_type(&g, 1), s.atomic_type(1));
        assert!(s.atomic_type2(0, 0).is_err());
    }

    #[test]
    fn realizing_a_type_reproduces_it() {
        let mut s = FiniteStructure::new(&sig(), 2);
        s.add_named("R", vec![1, 0]).unwrap();
        s.add_named("R", vec![1, 1]).unwrap();
        s.add_named("P", vec![0]).unwrap();
        let beta = s.atomic_type2(0, 1).unwrap();
        let mut t = FiniteStructure::new(&sig(), 2);
        t.realize_type2(0, 1, &beta);
        assert_eq!(t, s);
    }

    #[test]
    fn visibility_through_one_relation() {
        let mut s = FiniteStructure::new(&sig(), 2);
        s.add_named("P", vec![1]).unwrap();
        s.add_named("E1", vec![0, 1]).unwrap();
        s.close_in_place();
        let g = s.generalized_type(0);
        let (ta, tb) = (s.atomic_type(0), s.atomic_type(1));
        assert_eq!(g.visible(0b01), &[ta.clone(), tb].into_iter().collect());
        assert_eq!(g.visible(0b11), &[ta].into_iter().collect());
        assert!(g.check_invariants());
        assert!(is_safe_reduction(&g, &g));
        let mut smaller = g.clone();
        smaller.f[1] = smaller.f[3].clone();
        assert!(is_safe_reduction(&smaller, &g));
        assert!(!is_safe_reduction(&g, &smaller));
        let other = s.generalized_type(1);
        assert!(!is_safe_reduction(&other, &g));
    }
}
