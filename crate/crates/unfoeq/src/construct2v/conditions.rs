//! Extensional checks of the conditions promised by the construction.
//!
//! For a structure `B` over the class `A_0` of `a0` with map `p` into the
//! pattern `A`, and `E_tot` the distinguished symbols outside `eqs0`:
//!
//! - b1: every symbol of `E_tot` is total on `B`;
//! - b2: if `p(b)` has a witness `w` in `A_0` for a conjunct, some `w'`
//!   in `B` satisfies `tp(b,w') = tp(p(b),w)` for one such `w`;
//! - b3: elements joined by every symbol of a set `S` have equal `f(S)`
//!   components in the generalized types of their images;
//! - b4: each generalized type in `B` is a safe reduction of the one of
//!   the image;
//! - b5: every 2-type of `B` is realized in `A_0`, or is obtained from one
//!   realized there (or from a 1-type) by dropping all base binary atoms
//!   and some distinguished connections;
//! - b6: `a0` is in the image of `p`.
//!
//! Components are checked for c1-c5 (the same statements, with witnesses
//! required only outside the last layer), c6 (base binary atoms only inside
//! a layer or between consecutive layers) and c7 (layer `i` and layer
//! `i+1` not joined by the `i`-th symbol, so no leaf shares a class of any
//! of those symbols with the root).

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::component::{bits, PatternComponent};
use super::pattern::{membership, Pattern};
use crate::structures::{Elem, FiniteStructure, PairKey, TypeIndex};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionResult {
    pub id: &'static str,
    pub holds: bool,
    /// Offending elements of the checked structure, when it fails.
    pub pair: Option<(Elem, Elem)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConditionReport {
    pub results: Vec<ConditionResult>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }

    pub fn get(&self, id: &str) -> Option<&ConditionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.holds).map(|r| r.id).collect()
    }

    pub(crate) fn push(&mut self, id: &'static str, outcome: Option<((Elem, Elem), String)>) {
        let (holds, pair, detail) = match outcome {
            None => (true, None, String::new()),
            Some((p, d)) => (false, Some(p), d),
        };
        self.results.push(ConditionResult {
            id,
            holds,
            pair,
            detail,
        });
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            if r.holds {
                writeln!(f, "{}: pass", r.id)?;
            } else {
                writeln!(f, "{}: FAIL {}", r.id, r.detail)?;
            }
        }
        Ok(())
    }
}

type Outcome = Option<((Elem, Elem), String)>;

struct Checked<'a> {
    pat: &'a Pattern,
    b: &'a FiniteStructure,
    idx: TypeIndex,
    pmap: &'a [Elem],
    within: Vec<bool>,
    class: Vec<Elem>,
}

impl<'a> Checked<'a> {
    fn new(
        pat: &'a Pattern,
        b: &'a FiniteStructure,
        pmap: &'a [Elem],
        a0: Elem,
        eqs0: u32,
    ) -> Result<Self> {
        if b.sig() != pat.s.sig() {
            return Err(Error::Signature("structure and pattern signatures differ".into()));
        }
        if pmap.len() != b.size() {
            return Err(Error::Invalid("map size differs from the structure".into()));
        }
        if let Some(&e) = pmap.iter().find(|&&e| e as usize >= pat.s.size()) {
            return Err(Error::Element(e));
        }
        b.validate_equivalences()?;
        let mut interner = pat.interner.clone();
        let idx = TypeIndex::new(b, &mut interner)?;
        let class = pat.class_of(a0, eqs0);
        Ok(Checked {
            pat,
            b,
            idx,
            pmap,
            within: membership(pat.s.size(), &class),
            class,
        })
    }

    fn total(&self, tot: u32) -> Outcome {
        for j in bits(tot) {
            for e in self.b.elements() {
                if self.idx.class[j][e as usize] != self.idx.class[j][0] {
                    let name = self.b.sig().dist()[j].clone();
                    return Some(((0, e), format!("{name} does not join 0 and {e}")));
                }
            }
        }
        None
    }

    fn witnesses(&self, skip: &[bool]) -> Outcome {
        let pat = self.pat;
        for e in self.b.elements() {
            if skip.get(e as usize).copied().unwrap_or(false) {
                continue;
            }
            let pe = self.pmap[e as usize];
            let mut targets: Vec<(usize, Vec<PairKey>)> = Vec::new();
            for j in 0..pat.nf.m() {
                let Some(ws) = pat.witnesses_in(pe, j, &self.within) else {
                    continue;
                };
                if ws.is_empty() || ws.contains(&pe) {
                    continue;
                }
                targets.push((j, ws.iter().map(|&w| pat.index.key(pe, w)).collect()));
            }
            if targets.is_empty() {
                continue;
            }
            let mut found = vec![false; targets.len()];
            let mut left = targets.len();
            self.idx.scan_row(e, &mut |_, key| {
                for (t, (_, keys)) in targets.iter().enumerate() {
                    if !found[t] && keys.contains(&key) {
                        found[t] = true;
                        left -= 1;
                    }
                }
                left == 0
            });
            if let Some(t) = found.iter().position(|f| !f) {
                let j = targets[t].0;
                return Some((
                    (e, e),
                    format!("element {e} has no witness for conjunct {} of the copied 2-type", j + 1),
                ));
            }
        }
        None
    }

    fn groups(&self, mask: u32) -> HashMap<Vec<Elem>, Vec<Elem>> {
        let js = bits(mask);
        let mut g: HashMap<Vec<Elem>, Vec<Elem>> = HashMap::new();
        for e in self.b.elements() {
            let key = js.iter().map(|&j| self.idx.class[j][e as usize]).collect();
            g.entry(key).or_default().push(e);
        }
        g
    }

    fn f_of(&self, e: Elem, mask: u32) -> &[u32] {
        let g = self.pat.gtype_id(self.pmap[e as usize]);
        &self.pat.f_ids[g][mask as usize]
    }

    fn f_equality(&self) -> Outcome {
        for mask in 1..=self.pat.all_mask() {
            let mut groups: Vec<Vec<Elem>> = self.groups(mask).into_values().collect();
            groups.sort();
            for grp in groups {
                let first = grp[0];
                if let Some(&e) = grp.iter().find(|&&e| self.f_of(e, mask) != self.f_of(first, mask)) {
                    return Some((
                        (first, e),
                        format!("{first} and {e} joined by {mask:#b} but their images see different types"),
                    ));
                }
            }
        }
        None
    }

    fn safe_reduction(&self) -> Outcome {
        for e in self.b.elements() {
            let pe = self.pmap[e as usize];
            if !self.within[pe as usize] {
                return Some(((e, e), format!("image {pe} of {e} outside the class")));
            }
            if self.idx.t1[e as usize] != self.pat.index.t1[pe as usize] {
                return Some(((e, e), format!("{e} and its image {pe} have different 1-types")));
            }
        }
        for mask in 0..=self.pat.all_mask() {
            let mut groups: Vec<Vec<Elem>> = self.groups(mask).into_values().collect();
            groups.sort();
            for grp in groups {
                let mut seen: Vec<(u32, Elem)> = grp.iter().map(|&e| (self.idx.t1[e as usize], e)).collect();
                seen.sort_unstable();
                seen.dedup_by_key(|x| x.0);
                for &e in &grp {
                    let f = self.f_of(e, mask);
                    if let Some(&(_, o)) = seen.iter().find(|(t, _)| f.binary_search(t).is_err()) {
                        return Some((
                            (e, o),
                            format!("{e} sees the type of {o} through {mask:#b}, its image does not"),
                        ));
                    }
                }
            }
        }
        None
    }

    fn two_types(&self) -> Outcome {
        let pat = self.pat;
        let mut realized: HashSet<PairKey> = HashSet::new();
        let mut masks: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        let mut ones: HashSet<u32> = HashSet::new();
        for &a in &self.class {
            ones.insert(pat.index.t1[a as usize]);
            for &b in &self.class {
                if a != b {
                    let k = pat.index.key(a, b);
                    realized.insert(k);
                    masks.entry((k.ta, k.tb)).or_default().push(k.mask);
                }
            }
        }
        let allowed = |k: &PairKey| {
            realized.contains(k)
                || k.bits == 0
                    && ((k.ta == k.tb && ones.contains(&k.ta))
                        || masks
                            .get(&(k.ta, k.tb))
                            .is_some_and(|ms| ms.iter().any(|m| k.mask & m == k.mask)))
        };
        let mut cache: HashMap<PairKey, bool> = HashMap::new();
        let mut bad = None;
        for a in self.b.elements() {
            self.idx.scan_row(a, &mut |b, k| {
                let ok = *cache.entry(k).or_insert_with(|| allowed(&k));
                if !ok {
                    bad = Some(((a, b), format!("2-type of ({a},{b}) is not realized in the class")));
                }
                !ok
            });
            if bad.is_some() {
                return bad;
            }
        }
        None
    }
}

impl Pattern {
    /// Checks b1-b6 for `b0` with map `pmap`, built for `a0` and `eqs0`.
    pub fn verify_b_conditions(
        &self,
        b0: &FiniteStructure,
        pmap: &[Elem],
        a0: Elem,
        eqs0: u32,
    ) -> Result<ConditionReport> {
        let c = Checked::new(self, b0, pmap, a0, eqs0)?;
        let mut r = ConditionReport::default();
        r.push("b1", c.total(self.all_mask() & !eqs0));
        r.push("b2", c.witnesses(&[]));
        r.push("b3", c.f_equality());
        r.push("b4", c.safe_reduction());
        r.push("b5", c.two_types());
        r.push(
            "b6",
            (!pmap.contains(&a0)).then(|| ((0, 0), format!("{a0} is not in the image"))),
        );
        Ok(r)
    }

    /// Checks c1-c7 for a component built for the class of its root.
    pub fn verify_c_conditions(&self, pc: &PatternComponent, eqs0: u32) -> Result<ConditionReport> {
        let root_image = pc.pmap[pc.root as usize];
        let c = Checked::new(self, &pc.structure, &pc.pmap, root_image, eqs0)?;
        let mut r = ConditionReport::default();
        r.push("c1", c.total(self.all_mask() & !eqs0));
        r.push("c2", c.witnesses(&membership(pc.structure.size(), &pc.leaves)));
        r.push("c3", c.f_equality());
        r.push("c4", c.safe_reduction());
        r.push("c5", c.two_types());
        r.push("c6", layer_adjacency(pc));
        r.push("c7", layer_separation(pc, &c.idx));
        Ok(r)
    }
}

fn layer_adjacency(pc: &PatternComponent) -> Outcome {
    let layer = pc.layer_of();
    if let Some(e) = layer.iter().position(|&l| l == usize::MAX) {
        return Some(((e as Elem, e as Elem), format!("{e} belongs to no layer")));
    }
    let sig = pc.structure.sig();
    for id in 0..sig.base().len() {
        for t in pc.structure.rel(id) {
            for &x in t {
                for &y in t {
                    if layer[x as usize].abs_diff(layer[y as usize]) > 1 {
                        return Some((
                            (x, y),
                            format!("{} joins layers {} and {}", sig.name(id), layer[x as usize] + 1, layer[y as usize] + 1),
                        ));
                    }
                }
            }
        }
    }
    None
}

fn layer_separation(pc: &PatternComponent, idx: &TypeIndex) -> Outcome {
    let sig = pc.structure.sig();
    for (i, &j) in pc.order.iter().enumerate() {
        for &x in &pc.layers[i] {
            for &y in &pc.layers[i + 1] {
                if idx.class[j][x as usize] == idx.class[j][y as usize] {
                    return Some((
                        (x, y),
                        format!("{} joins layers {} and {}", sig.dist()[j], i + 1, i + 2),
                    ));
                }
            }
        }
    }
    for &j in &pc.order {
        if let Some(&leaf) = pc
            .leaves
            .iter()
            .find(|&&y| idx.class[j][y as usize] == idx.class[j][pc.root as usize])
        {
            return Some(((pc.root, leaf), format!("{} joins the root and leaf {leaf}", sig.dist()[j])));
        }
    }
    None
}
