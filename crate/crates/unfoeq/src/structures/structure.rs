use std::collections::{BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use crate::logic::{Signature, SymId};
use crate::{Error, Result};

pub type Elem = u32;

/// A finite structure over dense element ids `0..n`. Relations are indexed by
/// symbol id of the signature. Distinguished relations are equivalences unless
/// the structure is flagged as a pre-closure intermediate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    sig: Signature,
    n: usize,
    rels: Vec<BTreeSet<Vec<Elem>>>,
    pre_closure: bool,
}

impl FiniteStructure {
    /// `n` elements, empty base relations, identity equivalences.
    pub fn new(sig: &Signature, n: usize) -> Self {
        let mut s = Self::pre_closure(sig, n);
        s.close_in_place();
        s
    }

    /// `n` elements and all relations empty, flagged as pre-closure.
    pub fn pre_closure(sig: &Signature, n: usize) -> Self {
        FiniteStructure {
            sig: sig.clone(),
            n,
            rels: vec![BTreeSet::new(); sig.num_symbols()],
            pre_closure: true,
        }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.n as Elem
    }

    pub fn is_pre_closure(&self) -> bool {
        self.pre_closure
    }

    pub fn rel(&self, id: SymId) -> &BTreeSet<Vec<Elem>> {
        &self.rels[id]
    }

    pub fn holds(&self, id: SymId, tuple: &[Elem]) -> bool {
        self.rels[id].contains(tuple)
    }

    /// Membership by symbol name; unknown symbols never hold.
    pub fn holds_named(&self, name: &str, tuple: &[Elem]) -> bool {
        self.sig.id(name).is_some_and(|id| self.holds(id, tuple))
    }

    /// Whether `E_j(a,b)` holds for the `j`-th distinguished symbol.
    pub fn eq_holds(&self, j: usize, a: Elem, b: Elem) -> bool {
        self.holds(self.sig.dist_id(j), &[a, b])
    }

    fn check_tuple(&self, id: SymId, tuple: &[Elem]) -> Result<()> {
        if tuple.len() != self.sig.arity(id) {
            return Err(Error::Arity {
                sym: self.sig.name(id).to_string(),
                expected: self.sig.arity(id),
                found: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|&&e| e as usize >= self.n) {
            return Err(Error::Element(e));
        }
        Ok(())
    }

    /// Adds a tuple. Touching a distinguished relation flags the structure as
    /// pre-closure until [`close_in_place`](Self::close_in_place) runs.
    pub fn add_tuple(&mut self, id: SymId, tuple: Vec<Elem>) -> Result<()> {
        self.check_tuple(id, &tuple)?;
        if self.sig.is_dist(id) && !self.rels[id].contains(&tuple) {
            self.pre_closure = true;
        }
        self.rels[id].insert(tuple);
        Ok(())
    }

    pub fn add_named(&mut self, name: &str, tuple: Vec<Elem>) -> Result<()> {
        let id = self
            .sig
            .id(name)
            .ok_or_else(|| Error::UndeclaredSymbol(name.to_string()))?;
        self.add_tuple(id, tuple)
    }

    pub fn remove_tuple(&mut self, id: SymId, tuple: &[Elem]) -> bool {
        let removed = self.rels[id].remove(tuple);
        if removed && self.sig.is_dist(id) {
            self.pre_closure = true;
        }
        removed
    }

    /// Appends an element (reflexive in every distinguished relation).
    pub fn add_element(&mut self) -> Elem {
        let a = self.n as Elem;
        self.n += 1;
        for j in 0..self.sig.k() {
            self.rels[self.sig.dist_id(j)].insert(vec![a, a]);
        }
        a
    }

    /// Marks the structure as a pre-closure intermediate.
    pub fn mark_pre_closure(&mut self) {
        self.pre_closure = true;
    }

    /// Checks that every distinguished relation is an equivalence, reporting
    /// the first offending pair.
    pub fn validate_equivalences(&self) -> Result<()> {
        for j in 0..self.sig.k() {
            let id = self.sig.dist_id(j);
            let rel = &self.rels[id];
            let name = self.sig.name(id).to_string();
            let bad = |reason: &'static str, a: Elem, b: Elem| Error::NotEquivalence {
                rel: name.clone(),
                reason,
                a,
                b,
            };
            for a in self.elements() {
                if !rel.contains(&[a, a][..]) {
                    return Err(bad("reflexivity fails", a, a));
                }
            }
            for t in rel {
                if !rel.contains(&[t[1], t[0]][..]) {
                    return Err(bad("symmetry fails", t[0], t[1]));
                }
            }
            // With symmetry, transitivity means related elements have equal
            // successor sets; sets are interned so the test is per tuple.
            let succ: Vec<Vec<Elem>> = self.elements().map(|a| self.successors(id, a).collect()).collect();
            let mut ids: HashMap<&[Elem], usize> = HashMap::new();
            let set_id: Vec<usize> = succ
                .iter()
                .map(|v| {
                    let next = ids.len();
                    *ids.entry(v.as_slice()).or_insert(next)
                })
                .collect();
            for t in rel {
                let (a, b) = (t[0] as usize, t[1] as usize);
                if set_id[a] == set_id[b] {
                    continue;
                }
                if let Some(&u) = succ[b].iter().find(|u| succ[a].binary_search(u).is_err()) {
                    return Err(bad("transitivity fails", t[0], u));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate_equivalences().is_ok()
    }

    /// Checks reflexivity and transitivity only (transitive semantics).
    pub fn validate_preorders(&self) -> Result<()> {
        for j in 0..self.sig.k() {
            let id = self.sig.dist_id(j);
            let rel = &self.rels[id];
            let name = self.sig.name(id).to_string();
            for a in self.elements() {
                if !rel.contains(&[a, a][..]) {
                    return Err(Error::NotEquivalence {
                        rel: name,
                        reason: "reflexivity fails",
                        a,
                        b: a,
                    });
                }
            }
            for t in rel {
                for u in self.successors(id, t[1]) {
                    if !rel.contains(&[t[0], u][..]) {
                        return Err(Error::NotEquivalence {
                            rel: name,
                            reason: "transitivity fails",
                            a: t[0],
                            b: u,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Elements `b` with `(a,b)` in the binary relation `id`.
    pub fn successors(&self, id: SymId, a: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.rels[id]
            .range(vec![a]..vec![a + 1])
            .map(|t| t[1])
    }

    /// Replaces each distinguished relation by the least equivalence
    /// containing it.
    pub fn close_equivalences(&self) -> Self {
        let mut s = self.clone();
        s.close_in_place();
        s
    }

    pub fn close_in_place(&mut self) {
        for j in 0..self.sig.k() {
            let id = self.sig.dist_id(j);
            let mut uf = UnionFind::<usize>::new(self.n);
            for t in &self.rels[id] {
                uf.union(t[0] as usize, t[1] as usize);
            }
            let mut classes: HashMap<usize, Vec<Elem>> = HashMap::new();
            for a in self.elements() {
                classes.entry(uf.find(a as usize)).or_default().push(a);
            }
            let rel = &mut self.rels[id];
            rel.clear();
            for class in classes.values() {
                for &a in class {
                    for &b in class {
                        rel.insert(vec![a, b]);
                    }
                }
            }
        }
        self.pre_closure = false;
    }

    /// Induced substructure on `subset`; new id `i` is the `i`-th smallest
    /// element of `subset`.
    pub fn restrict(&self, subset: &[Elem]) -> Result<Self> {
        Ok(self.restrict_with_map(subset)?.0)
    }

    /// Like [`restrict`](Self::restrict), also returning the sorted subset,
    /// which maps new ids to old ones.
    pub fn restrict_with_map(&self, subset: &[Elem]) -> Result<(Self, Vec<Elem>)> {
        let mut keep: Vec<Elem> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&e) = keep.iter().find(|&&e| e as usize >= self.n) {
            return Err(Error::Element(e));
        }
        let mut index = vec![None; self.n];
        for (i, &e) in keep.iter().enumerate() {
            index[e as usize] = Some(i as Elem);
        }
        let rels = self
            .rels
            .iter()
            .map(|r| {
                r.iter()
                    .filter_map(|t| t.iter().map(|e| index[*e as usize]).collect::<Option<Vec<_>>>())
                    .collect()
            })
            .collect();
        let s = FiniteStructure {
            sig: self.sig.clone(),
            n: keep.len(),
            rels,
            pre_closure: self.pre_closure,
        };
        Ok((s, keep))
    }

    /// The class of `a` under the intersection of the distinguished relations
    /// selected by `mask` (bit `j` for `E_{j+1}`); the whole domain when the
    /// mask is empty.
    pub fn eq_class(&self, a: Elem, mask: u32) -> Vec<Elem> {
        self.elements()
            .filter(|&b| self.eq_mask(a, b) & mask == mask)
            .collect()
    }

    /// Bitmask of the distinguished relations connecting `a` and `b`.
    pub fn eq_mask(&self, a: Elem, b: Elem) -> u32 {
        let mut m = 0;
        for j in 0..self.sig.k() {
            if self.eq_holds(j, a, b) {
                m |= 1 << j;
            }
        }
        m
    }

    /// Copies `other` into `self` as fresh elements, except that elements
    /// listed in `glue` are sent to the given existing elements. Returns the
    /// map from `other`'s ids to ids in `self`.
    pub fn import(&mut self, other: &FiniteStructure, glue: &[(Elem, Elem)]) -> Vec<Elem> {
        assert_eq!(self.sig, other.sig, "import needs equal signatures");
        let mut map = vec![Elem::MAX; other.n];
        let old_n = self.n as Elem;
        for &(src, dst) in glue {
            map[src as usize] = dst;
        }
        for slot in map.iter_mut() {
            if *slot == Elem::MAX {
                *slot = self.n as Elem;
                self.n += 1;
            }
        }
        for (id, r) in other.rels.iter().enumerate() {
            for t in r {
                let u: Vec<Elem> = t.iter().map(|e| map[*e as usize]).collect();
                if self.sig.is_dist(id) && !self.rels[id].contains(&u) {
                    self.pre_closure = true;
                }
                self.rels[id].insert(u);
            }
        }
        for j in 0..self.sig.k() {
            let id = self.sig.dist_id(j);
            for a in old_n..self.n as Elem {
                self.rels[id].insert(vec![a, a]);
            }
        }
        map
    }

    /// Identifies elements with the same representative. `rep[a]` is the
    /// representative of `a`. Returns the quotient, flagged pre-closure, and
    /// the map from old to new ids (new ids follow first occurrence).
    pub fn quotient(&self, rep: &[Elem]) -> (Self, Vec<Elem>) {
        let mut new_of_rep: HashMap<Elem, Elem> = HashMap::new();
        let mut map = Vec::with_capacity(self.n);
        for a in self.elements() {
            let r = rep[a as usize];
            let next = new_of_rep.len() as Elem;
            map.push(*new_of_rep.entry(r).or_insert(next));
        }
        let rels = self
            .rels
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| t.iter().map(|e| map[*e as usize]).collect())
                    .collect()
            })
            .collect();
        let s = FiniteStructure {
            sig: self.sig.clone(),
            n: new_of_rep.len(),
            rels,
            pre_closure: true,
        };
        (s, map)
    }

    /// Keeps, for each distinguished relation, its largest symmetric
    /// subrelation. Requires reflexive and transitive distinguished relations.
    pub fn symmetrize(&self) -> Result<Self> {
        self.validate_preorders()?;
        let mut s = self.clone();
        for j in 0..self.sig.k() {
            let id = self.sig.dist_id(j);
            let rel = &self.rels[id];
            s.rels[id] = rel
                .iter()
                .filter(|t| rel.contains(&[t[1], t[0]][..]))
                .cloned()
                .collect();
        }
        s.pre_closure = false;
        s.validate_equivalences()?;
        Ok(s)
    }

    /// Same structure read over another signature containing all symbols of
    /// this one with equal arities; missing symbols are empty.
    pub fn reinterpret(&self, sig: &Signature) -> Result<Self> {
        let mut s = FiniteStructure::pre_closure(sig, self.n);
        for id in 0..self.sig.num_symbols() {
            let name = self.sig.name(id);
            let nid = sig
                .id(name)
                .ok_or_else(|| Error::UndeclaredSymbol(name.to_string()))?;
            if sig.arity(nid) != self.sig.arity(id) {
                return Err(Error::Arity {
                    sym: name.to_string(),
                    expected: sig.arity(nid),
                    found: self.sig.arity(id),
                });
            }
            s.rels[nid] = self.rels[id].clone();
        }
        s.pre_closure = self.pre_closure || sig.dist() != self.sig.dist();
        if !s.pre_closure && s.validate_equivalences().is_err() {
            s.pre_closure = true;
        }
        Ok(s)
    }

    /// Drops every symbol not in `sig` (which must be a sub-signature).
    pub fn project(&self, sig: &Signature) -> Result<Self> {
        let mut s = FiniteStructure::pre_closure(sig, self.n);
        for id in 0..sig.num_symbols() {
            let name = sig.name(id);
            let old = self
                .sig
                .id(name)
                .ok_or_else(|| Error::UndeclaredSymbol(name.to_string()))?;
            s.rels[id] = self.rels[old].clone();
        }
        s.pre_closure = self.pre_closure;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Signature {
        Signature::new().with_base("R", 2).with_dist("E1")
    }

    #[test]
    fn singleton_is_valid() {
        let s = FiniteStructure::new(&Signature::new().with_dist("E1"), 1);
        assert!(s.is_valid());
    }

    #[test]
    fn asymmetric_pair_is_rejected() {
        let mut s = FiniteStructure::new(&e1(), 2);
        s.add_named("E1", vec![0, 1]).unwrap();
        assert!(matches!(
            s.validate_equivalences(),
            Err(Error::NotEquivalence { reason: "symmetry fails", .. })
        ));
    }

    #[test]
    fn broken_transitivity_is_reported() {
        let mut s = FiniteStructure::new(&e1(), 3);
        for (a, b) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            s.add_named("E1", vec![a, b]).unwrap();
        }
        match s.validate_equivalences() {
            Err(Error::NotEquivalence { reason, a, b, .. }) => {
                assert_eq!(reason, "transitivity fails");
                assert_eq!((a.min(b), a.max(b)), (0, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closure_joins_chains() {
        let mut s = FiniteStructure::pre_closure(&e1(), 3);
        s.add_named("E1", vec![0, 1]).unwrap();
        s.add_named("E1", vec![1, 2]).unwrap();
        let c = s.close_equivalences();
        assert!(c.is_valid());
        assert_eq!(c.eq_class(0, 1), vec![0, 1, 2]);
        assert_eq!(c.close_equivalences(), c);
    }

    #[test]
    fn restrict_keeps_classes() {
        let mut s = FiniteStructure::new(&e1(), 3);
        s.add_named("E1", vec![0, 2]).unwrap();
        s.add_named("E1", vec![0, 1]).unwrap();
        s.close_in_place();
        let (r, map) = s.restrict_with_map(&[2, 1]).unwrap();
        assert_eq!(map, vec![1, 2]);
        assert!(r.is_valid());
        assert_eq!(r.eq_class(0, 1), vec![0, 1]);
        assert!(s.restrict(&[5]).is_err());
    }

    #[test]
    fn symmetrize_drops_one_way_pairs() {
        let mut s = FiniteStructure::new(&e1(), 2);
        s.add_named("E1", vec![0, 1]).unwrap();
        let sym = s.symmetrize().unwrap();
        assert_eq!(sym, FiniteStructure::new(&e1(), 2));
    }

    #[test]
    fn quotient_merges_tuples() {
        let mut s = FiniteStructure::new(&e1(), 3);
        s.add_named("R", vec![0, 2]).unwrap();
        let (q, map) = s.quotient(&[0, 1, 0]);
        assert_eq!(map, vec![0, 1, 0]);
        assert_eq!(q.size(), 2);
        assert!(q.holds_named("R", &[0, 0]));
    }
}
