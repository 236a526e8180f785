//! Layered pattern components and the recursive construction of the
//! structure over one class.

use std::rc::Rc;

use super::join::join_components;
use super::pattern::{membership, Built, Pattern};
use crate::structures::{Elem, FiniteStructure};
use crate::{Error, Result};

/// One component built for a realized generalized type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternComponent {
    /// Index of the generalized type in the pattern.
    pub gtype: usize,
    /// `layers[i]` is layer `i+1`; the initial part is a prefix of it.
    pub layers: Vec<Vec<Elem>>,
    /// Length of the initial part of each layer.
    pub init_len: Vec<usize>,
    pub root: Elem,
    /// Elements of the last layer, numbered from 1 in this order.
    pub leaves: Vec<Elem>,
    pub structure: FiniteStructure,
    pub pmap: Vec<Elem>,
    /// Distinguished symbol indices in layer order.
    pub order: Vec<usize>,
}

impl PatternComponent {
    pub fn init(&self, i: usize) -> &[Elem] {
        &self.layers[i][..self.init_len[i]]
    }

    /// Layer index (0-based) of every element.
    pub fn layer_of(&self) -> Vec<usize> {
        let mut v = vec![usize::MAX; self.structure.size()];
        for (i, layer) in self.layers.iter().enumerate() {
            for &e in layer {
                v[e as usize] = i;
            }
        }
        v
    }
}

pub(crate) fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask >> j & 1 == 1).collect()
}

impl Pattern {
    /// The structure over the class of `a0` outside `eqs0`, with its map into
    /// the pattern. Results are memoized per `(a0, eqs0)`.
    pub fn build_b0(&mut self, a0: Elem, eqs0: u32) -> Result<Rc<Built>> {
        if a0 as usize >= self.s.size() {
            return Err(Error::Element(a0));
        }
        if eqs0 & !self.all_mask() != 0 {
            return Err(Error::Invalid(format!("equivalence mask {eqs0:#b} out of range")));
        }
        if let Some(b) = self.memo.get(&(a0, eqs0)) {
            return Ok(b.clone());
        }
        let class = self.class_of(a0, eqs0);
        let built = if eqs0 == 0 {
            if class.len() == 1 {
                Built {
                    structure: self.s.restrict(&[a0])?,
                    pmap: vec![a0],
                }
            } else {
                let sig = self.s.sig().clone();
                let ext = self.fake_extension()?;
                let fake_bit = 1 << (ext.k() - 1);
                let b = ext.build_b0(a0, fake_bit)?;
                let mut structure = b.structure.project(&sig)?;
                structure.close_in_place();
                Built {
                    structure,
                    pmap: b.pmap.clone(),
                }
            }
        } else {
            let comps = self.components(a0, eqs0)?;
            join_components(self, &comps, a0, eqs0)?.into_built()
        };
        let built = Rc::new(built);
        self.memo.insert((a0, eqs0), built.clone());
        Ok(built)
    }

    /// One component per generalized type realized in the class of `a0`,
    /// rooted at `a0` for its own type and at the least realizer otherwise.
    pub fn components(&mut self, a0: Elem, eqs0: u32) -> Result<Vec<PatternComponent>> {
        let class = self.class_of(a0, eqs0);
        let mut reps: Vec<(usize, Elem)> = vec![(self.gtype_id(a0), a0)];
        for &a in &class {
            let g = self.gtype_id(a);
            if reps.iter().all(|(h, _)| *h != g) {
                reps.push((g, a));
            }
        }
        reps.iter()
            .map(|&(_, rep)| self.build_pattern_component(rep, eqs0, &class))
            .collect()
    }

    /// Steps 1 and 2 layer by layer, for the class `class` (of `rep`).
    pub fn build_pattern_component(
        &mut self,
        rep: Elem,
        eqs0: u32,
        class: &[Elem],
    ) -> Result<PatternComponent> {
        let within = membership(self.s.size(), class);
        if !within[rep as usize] {
            return Err(Error::Invalid(format!("root {rep} outside the class")));
        }
        let order = bits(eqs0);
        let l = order.len();
        let mut s = self.s.restrict(&[rep])?;
        let mut pmap = vec![rep];
        let mut layers = vec![vec![0]];
        let mut init_len = vec![1];
        for i in 0..l {
            let e = order[i];
            let sub = eqs0 & !(1 << e);
            // Step 1: subcomponents over the E-classes of the initial elements.
            for idx in 0..init_len[i] {
                let c = layers[i][idx];
                let a1 = pmap[c as usize];
                let b1 = self.build_b0(a1, sub)?;
                let anchor = b1
                    .pmap
                    .iter()
                    .position(|&x| x == a1)
                    .ok_or_else(|| Error::Invalid(format!("layer {}: {a1} not in image", i + 1)))?
                    as Elem;
                let map = s.import(&b1.structure, &[(anchor, c)]);
                pmap.resize(s.size(), 0);
                for (src, &dst) in map.iter().enumerate() {
                    if src as Elem != anchor {
                        pmap[dst as usize] = b1.pmap[src];
                        layers[i].push(dst);
                    }
                }
            }
            s.close_in_place();
            // Step 2: witnesses that the subcomponents do not provide.
            let mut next = Vec::new();
            for idx in 0..layers[i].len() {
                let c = layers[i][idx];
                let pc = pmap[c as usize];
                for j in 0..self.nf.m() {
                    let Some(ws) = self.witnesses_in(pc, j, &within) else {
                        continue;
                    };
                    if ws.is_empty() || ws.iter().any(|&w| self.s.eq_holds(e, pc, w)) {
                        continue;
                    }
                    let w = ws[0];
                    let beta = self.s.atomic_type2(pc, w)?;
                    let nw = s.add_element();
                    s.realize_type1(nw, &self.s.atomic_type(w));
                    s.join_by(c, nw, &beta);
                    pmap.push(w);
                    next.push(nw);
                }
            }
            s.close_in_place();
            init_len.push(next.len());
            layers.push(next);
        }
        let leaves = layers[l].clone();
        let pc = PatternComponent {
            gtype: self.gtype_id(rep),
            layers,
            init_len,
            root: 0,
            leaves,
            structure: s,
            pmap,
            order,
        };
        if let Some(log) = &mut self.log {
            log.push((eqs0, pc.clone()));
        }
        Ok(pc)
    }
}
