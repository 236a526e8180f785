use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::structures::{AtomicType1, Elem, FiniteStructure};

/// Side conditions on a homomorphism search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomConstraint {
    /// Images must have exactly the source 1-type.
    pub preserve_1types: bool,
    /// Forced images.
    pub fixed: BTreeMap<Elem, Elem>,
    /// Source subsets on which the map must be injective and reflect every
    /// literal (an isomorphism onto the image).
    pub iso_on: Vec<Vec<Elem>>,
    /// Allowed images for some source elements.
    pub candidates: BTreeMap<Elem, Vec<Elem>>,
}

impl HomConstraint {
    pub fn preserving() -> Self {
        HomConstraint {
            preserve_1types: true,
            ..Self::default()
        }
    }
}

struct Search<'a> {
    src: &'a FiniteStructure,
    dst: &'a FiniteStructure,
    c: &'a HomConstraint,
    /// Tuples of `src` whose largest element is the key.
    closing: Vec<Vec<(usize, Vec<Elem>)>>,
    /// Binary tuples `(sym, other, forward)` from each element to a later one.
    ahead: Vec<Vec<(usize, Elem, bool)>>,
    iso_of: Vec<Vec<usize>>,
    map: Vec<Elem>,
}

/// Ordered backtracking: source elements in id order, targets in id order,
/// with forward checking along binary tuples. Complete.
pub fn find_homomorphism(
    src: &FiniteStructure,
    dst: &FiniteStructure,
    c: &HomConstraint,
) -> Option<Vec<Elem>> {
    assert_eq!(src.sig(), dst.sig(), "homomorphism needs equal signatures");
    let n = src.size();
    if n == 0 {
        return Some(vec![]);
    }
    let nd = dst.size();
    let sig = src.sig();
    let mut closing = vec![Vec::new(); n];
    let mut ahead = vec![Vec::new(); n];
    for id in 0..sig.num_symbols() {
        for t in src.rel(id) {
            let mx = *t.iter().max().unwrap();
            closing[mx as usize].push((id, t.clone()));
            if t.len() == 2 && t[0] != t[1] {
                let (a, b) = (t[0], t[1]);
                if a < b {
                    ahead[a as usize].push((id, b, true));
                } else {
                    ahead[b as usize].push((id, a, false));
                }
            }
        }
    }
    let mut iso_of = vec![Vec::new(); n];
    for (i, set) in c.iso_on.iter().enumerate() {
        for &e in set {
            iso_of[e as usize].push(i);
        }
    }
    let dst_types: Vec<AtomicType1> = dst.elements().map(|b| dst.atomic_type(b)).collect();
    let mut domains = Vec::with_capacity(n);
    for a in src.elements() {
        let mut d = FixedBitSet::with_capacity(nd);
        let ta = c.preserve_1types.then(|| src.atomic_type(a));
        for b in dst.elements() {
            let ok_type = ta.as_ref().is_none_or(|t| *t == dst_types[b as usize]);
            let ok_fixed = c.fixed.get(&a).is_none_or(|f| *f == b);
            let ok_cand = c.candidates.get(&a).is_none_or(|v| v.contains(&b));
            d.set(b as usize, ok_type && ok_fixed && ok_cand);
        }
        domains.push(d);
    }
    let mut s = Search {
        src,
        dst,
        c,
        closing,
        ahead,
        iso_of,
        map: Vec::with_capacity(n),
    };
    s.go(domains).then_some(s.map)
}

impl Search<'_> {
    fn go(&mut self, domains: Vec<FixedBitSet>) -> bool {
        let a = self.map.len();
        if a == self.src.size() {
            return true;
        }
        for b in domains[a].ones() {
            let b = b as Elem;
            self.map.push(b);
            if self.consistent(a as Elem) {
                if let Some(next) = self.forward(a, b, &domains) {
                    if self.go(next) {
                        return true;
                    }
                }
            }
            self.map.pop();
        }
        false
    }

    fn consistent(&self, a: Elem) -> bool {
        for (id, t) in &self.closing[a as usize] {
            let img: Vec<Elem> = t.iter().map(|e| self.map[*e as usize]).collect();
            if !self.dst.holds(*id, &img) {
                return false;
            }
        }
        for &i in &self.iso_of[a as usize] {
            let members: Vec<Elem> = self.c.iso_on[i]
                .iter()
                .copied()
                .filter(|&e| e <= a)
                .collect();
            let img_a = self.map[a as usize];
            if members
                .iter()
                .any(|&e| e != a && self.map[e as usize] == img_a)
            {
                return false;
            }
            if !self.reflects(&members, a) {
                return false;
            }
        }
        true
    }

    /// Every tuple over `members` that mentions `a` holds in `src` iff its
    /// image holds in `dst`.
    fn reflects(&self, members: &[Elem], a: Elem) -> bool {
        let sig = self.src.sig();
        for id in 0..sig.num_symbols() {
            let r = sig.arity(id);
            let mut t = vec![0usize; r];
            loop {
                let tuple: Vec<Elem> = t.iter().map(|i| members[*i]).collect();
                if tuple.contains(&a) {
                    let img: Vec<Elem> = tuple.iter().map(|e| self.map[*e as usize]).collect();
                    if self.src.holds(id, &tuple) != self.dst.holds(id, &img) {
                        return false;
                    }
                }
                let mut i = r;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    t[i] += 1;
                    if t[i] < members.len() {
                        break;
                    }
                    t[i] = 0;
                }
                if t.iter().all(|x| *x == 0) {
                    break;
                }
            }
        }
        true
    }

    fn forward(&self, a: usize, b: Elem, domains: &[FixedBitSet]) -> Option<Vec<FixedBitSet>> {
        let mut next = domains.to_vec();
        for &(id, other, fwd) in &self.ahead[a] {
            let d = &mut next[other as usize];
            let keep: Vec<usize> = d
                .ones()
                .filter(|&y| {
                    let y = y as Elem;
                    if fwd {
                        self.dst.holds(id, &[b, y])
                    } else {
                        self.dst.holds(id, &[y, b])
                    }
                })
                .collect();
            d.clear();
            for y in keep {
                d.insert(y);
            }
            if d.is_clear() {
                return None;
            }
        }
        Some(next)
    }
}

/// Checks that `map` is a homomorphism satisfying `c`.
pub fn is_homomorphism(
    src: &FiniteStructure,
    dst: &FiniteStructure,
    map: &[Elem],
    c: &HomConstraint,
) -> bool {
    if map.len() != src.size() || map.iter().any(|&b| b as usize >= dst.size()) {
        return false;
    }
    let sig = src.sig();
    for id in 0..sig.num_symbols() {
        for t in src.rel(id) {
            let img: Vec<Elem> = t.iter().map(|e| map[*e as usize]).collect();
            if !dst.holds(id, &img) {
                return false;
            }
        }
    }
    if c.preserve_1types
        && src
            .elements()
            .any(|a| src.atomic_type(a) != dst.atomic_type(map[a as usize]))
    {
        return false;
    }
    if c.fixed.iter().any(|(a, b)| map[*a as usize] != *b) {
        return false;
    }
    if c
        .candidates
        .iter()
        .any(|(a, v)| !v.contains(&map[*a as usize]))
    {
        return false;
    }
    for set in &c.iso_on {
        let (sub, old) = src.restrict_with_map(set).expect("iso set in domain");
        let imgs: Vec<Elem> = old.iter().map(|e| map[*e as usize]).collect();
        let mut sorted = imgs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != imgs.len() {
            return false;
        }
        let (img_sub, img_old) = dst.restrict_with_map(&imgs).expect("images in domain");
        let local: Vec<Elem> = imgs
            .iter()
            .map(|b| img_old.binary_search(b).unwrap() as Elem)
            .collect();
        for id in 0..sig.num_symbols() {
            for t in img_sub.rel(id) {
                let pre: Vec<Elem> = t
                    .iter()
                    .map(|e| local.iter().position(|x| x == e).unwrap() as Elem)
                    .collect();
                if !sub.holds(id, &pre) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;

    fn sig() -> Signature {
        Signature::new().with_base("P", 1).with_base("R", 2).with_dist("E1")
    }

    #[test]
    fn identity_with_fixed_identity() {
        let mut s = FiniteStructure::new(&sig(), 3);
        s.add_named("R", vec![0, 1]).unwrap();
        s.add_named("E1", vec![1, 2]).unwrap();
        s.close_in_place();
        let c = HomConstraint {
            fixed: (0..3).map(|a| (a, a)).collect(),
            ..HomConstraint::preserving()
        };
        assert_eq!(find_homomorphism(&s, &s, &c), Some(vec![0, 1, 2]));
    }

    #[test]
    fn eq_edge_maps_into_a_class() {
        let mut src = FiniteStructure::new(&sig(), 2);
        src.add_named("E1", vec![0, 1]).unwrap();
        src.close_in_place();
        let dst = FiniteStructure::new(&sig(), 3);
        let h = find_homomorphism(&src, &dst, &HomConstraint::default()).unwrap();
        assert_eq!(h, vec![0, 0]);
        assert!(is_homomorphism(&src, &dst, &h, &HomConstraint::default()));
        let iso = HomConstraint {
            iso_on: vec![vec![0, 1]],
            ..Default::default()
        };
        assert!(find_homomorphism(&src, &dst, &iso).is_none());
    }

    #[test]
    fn reflexive_loop_into_irreflexive_target() {
        let mut src = FiniteStructure::new(&sig(), 1);
        src.add_named("R", vec![0, 0]).unwrap();
        let mut dst = FiniteStructure::new(&sig(), 2);
        dst.add_named("R", vec![0, 1]).unwrap();
        dst.add_named("R", vec![1, 0]).unwrap();
        assert!(find_homomorphism(&src, &dst, &HomConstraint::default()).is_none());
    }
}
