//! Compact pair types for structures whose symbols have arity at most 2.
//! A pair's atomic 2-type is determined by the two 1-types, the set of
//! distinguished relations joining them, and the base binary literals
//! between them; [`PairKey`] packs exactly that.

use std::collections::HashMap;

use super::structure::{Elem, FiniteStructure};
use super::types::{AtomicType1, AtomicType2};
use crate::logic::SymId;
use crate::{Error, Result};

/// Interns 1-types so that ids are comparable across structures.
#[derive(Debug, Clone, Default)]
pub struct TypeInterner {
    ids: HashMap<AtomicType1, u32>,
    list: Vec<AtomicType1>,
}

impl TypeInterner {
    pub fn id(&mut self, t: &AtomicType1) -> u32 {
        if let Some(i) = self.ids.get(t) {
            return *i;
        }
        let i = self.list.len() as u32;
        self.ids.insert(t.clone(), i);
        self.list.push(t.clone());
        i
    }

    pub fn get(&self, t: &AtomicType1) -> Option<u32> {
        self.ids.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// 2-type of an ordered pair of distinct elements. `bits` holds, for the
/// `i`-th base binary symbol `R`, `R(a,b)` at bit `2i` and `R(b,a)` at bit
/// `2i+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub ta: u32,
    pub tb: u32,
    pub mask: u32,
    pub bits: u64,
}

impl PairKey {
    pub fn swap(self) -> PairKey {
        let mut bits = 0;
        for i in 0..32 {
            if self.bits >> (2 * i) & 1 == 1 {
                bits |= 1 << (2 * i + 1);
            }
            if self.bits >> (2 * i + 1) & 1 == 1 {
                bits |= 1 << (2 * i);
            }
        }
        PairKey {
            ta: self.tb,
            tb: self.ta,
            mask: self.mask,
            bits,
        }
    }
}

/// Per-element data for fast pair-type computation.
#[derive(Debug, Clone)]
pub struct TypeIndex {
    pub t1: Vec<u32>,
    /// `class[j][a]`: least element of the `E_{j+1}`-class of `a`.
    pub class: Vec<Vec<Elem>>,
    /// Sorted base binary neighbours with their literal bits.
    pub nbr: Vec<Vec<(Elem, u64)>>,
    pub bin: Vec<SymId>,
}

impl TypeIndex {
    /// Requires valid equivalences and base arities at most 2.
    pub fn new(s: &FiniteStructure, interner: &mut TypeInterner) -> Result<Self> {
        let sig = s.sig();
        if sig.base().iter().any(|(_, r)| *r > 2) {
            return Err(Error::Invalid("pair types need arity at most 2".into()));
        }
        let bin: Vec<SymId> = (0..sig.base().len()).filter(|&id| sig.arity(id) == 2).collect();
        if bin.len() > 32 {
            return Err(Error::Invalid("too many binary symbols".into()));
        }
        let t1 = s.elements().map(|a| interner.id(&s.atomic_type(a))).collect();
        let class = (0..sig.k())
            .map(|j| {
                let id = sig.dist_id(j);
                s.elements()
                    .map(|a| s.successors(id, a).next().unwrap_or(a).min(a))
                    .collect()
            })
            .collect();
        let mut nbr: Vec<HashMap<Elem, u64>> = vec![HashMap::new(); s.size()];
        for (i, &id) in bin.iter().enumerate() {
            for t in s.rel(id) {
                let (a, b) = (t[0], t[1]);
                if a != b {
                    *nbr[a as usize].entry(b).or_default() |= 1 << (2 * i);
                    *nbr[b as usize].entry(a).or_default() |= 1 << (2 * i + 1);
                }
            }
        }
        let nbr = nbr
            .into_iter()
            .map(|m| {
                let mut v: Vec<(Elem, u64)> = m.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        Ok(TypeIndex {
            t1,
            class,
            nbr,
            bin,
        })
    }

    pub fn size(&self) -> usize {
        self.t1.len()
    }

    pub fn eq_mask(&self, a: Elem, b: Elem) -> u32 {
        let mut m = 0;
        for (j, c) in self.class.iter().enumerate() {
            if c[a as usize] == c[b as usize] {
                m |= 1 << j;
            }
        }
        m
    }

    pub fn key(&self, a: Elem, b: Elem) -> PairKey {
        let row = &self.nbr[a as usize];
        let bits = row
            .binary_search_by_key(&b, |(e, _)| *e)
            .map_or(0, |i| row[i].1);
        PairKey {
            ta: self.t1[a as usize],
            tb: self.t1[b as usize],
            mask: self.eq_mask(a, b),
            bits,
        }
    }

    /// Calls `f(b, key(a,b))` for every `b != a` in id order; stops early
    /// when `f` returns `true`, reporting it.
    pub fn scan_row(&self, a: Elem, f: &mut dyn FnMut(Elem, PairKey) -> bool) -> bool {
        let row = &self.nbr[a as usize];
        let mut ni = 0;
        let ta = self.t1[a as usize];
        let ca: Vec<Elem> = self.class.iter().map(|c| c[a as usize]).collect();
        for b in 0..self.size() as Elem {
            if b == a {
                continue;
            }
            while ni < row.len() && row[ni].0 < b {
                ni += 1;
            }
            let bits = if ni < row.len() && row[ni].0 == b { row[ni].1 } else { 0 };
            let mut mask = 0;
            for (j, c) in self.class.iter().enumerate() {
                if c[b as usize] == ca[j] {
                    mask |= 1 << j;
                }
            }
            let key = PairKey {
                ta,
                tb: self.t1[b as usize],
                mask,
                bits,
            };
            if f(b, key) {
                return true;
            }
        }
        false
    }
}

/// Converts a full 2-type into a key (the structure must have arity ≤ 2).
pub fn key_of_type2(
    beta: &AtomicType2,
    s: &FiniteStructure,
    interner: &mut TypeInterner,
    bin: &[SymId],
) -> PairKey {
    let sig = s.sig();
    let mut bits = 0;
    for (i, &id) in bin.iter().enumerate() {
        if beta.forward(sig, id) {
            bits |= 1 << (2 * i);
        }
        if beta.backward(sig, id) {
            bits |= 1 << (2 * i + 1);
        }
    }
    PairKey {
        ta: interner.id(&beta.one_type(sig, 0)),
        tb: interner.id(&beta.one_type(sig, 1)),
        mask: beta.eq_mask(sig),
        bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;

    #[test]
    fn keys_match_full_types() {
        let sig = Signature::new()
            .with_base("P", 1)
            .with_base("R", 2)
            .with_base("S", 2)
            .with_dist("E1");
        let mut s = FiniteStructure::new(&sig, 4);
        s.add_named("R", vec![0, 1]).unwrap();
        s.add_named("S", vec![2, 0]).unwrap();
        s.add_named("P", vec![3]).unwrap();
        s.add_named("E1", vec![1, 3]).unwrap();
        s.close_in_place();
        let mut int = TypeInterner::default();
        let idx = TypeIndex::new(&s, &mut int).unwrap();
        for a in s.elements() {
            idx.scan_row(a, &mut |b, key| {
                assert_eq!(key, idx.key(a, b));
                let beta = s.atomic_type2(a, b).unwrap();
                assert_eq!(key, key_of_type2(&beta, &s, &mut int, &idx.bin));
                assert_eq!(key.swap(), idx.key(b, a));
                false
            });
        }
    }
}
