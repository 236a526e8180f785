use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use super::regular::{RegularTreeModel, TreeNode};
use crate::logic::Signature;
use crate::structures::{Elem, FiniteStructure};
use crate::{Error, Result};

/// A finished (closed) structure with its origin and the map into the
/// unraveling, paths read relative to the node it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdBuilt {
    pub structure: FiniteStructure,
    pub origin: Elem,
    pub pmap: Vec<TreeNode>,
}

/// A layered component for one subtree type, before closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdComponent {
    /// Node the root is mapped to.
    pub rep: TreeNode,
    pub eqs0: u32,
    /// `layers[i]` is layer `i+1`; the last one is the interface layer.
    pub layers: Vec<Vec<Elem>>,
    /// Initial part of each layer.
    pub init: Vec<Vec<Elem>>,
    pub structure: FiniteStructure,
    pub pmap: Vec<TreeNode>,
}

impl NdComponent {
    pub fn root(&self) -> Elem {
        0
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Interface elements in their numbering order.
    pub fn interface(&self) -> &[Elem] {
        self.layers.last().expect("at least one layer")
    }

    /// The last inner layer.
    pub fn leaves(&self) -> &[Elem] {
        &self.layers[self.layers.len() - 2]
    }

    /// 0-based layer of `e`.
    pub fn layer_of(&self, e: Elem) -> usize {
        self.layers
            .iter()
            .position(|l| l.contains(&e))
            .expect("element in some layer")
    }
}

/// Which copy of a component: subtree type index, color, and the slot
/// `(interface number, parent type index)`, absent for the origin copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyIndex {
    pub gtype: usize,
    pub color: u8,
    pub slot: Option<(usize, usize)>,
}

/// Components glued along interface elements and closed.
#[derive(Debug, Clone)]
pub struct NdAssembly {
    /// Copies kept after pruning, in discovery order.
    pub copies: Vec<CopyIndex>,
    /// Merges in the disjoint union: (interface element, root).
    pub identifications: Vec<(Elem, Elem)>,
    /// Edges between copies (by position in `copies`): interface side first.
    pub component_graph: Vec<(usize, usize)>,
    pub result: FiniteStructure,
    pub origin: Elem,
    pub pmap: Vec<TreeNode>,
}

/// Recursion context for one signature. The fake level adds a distinguished
/// identity symbol so that a non-singleton class of all symbols can be split.
pub struct NdPattern {
    r: Rc<RegularTreeModel>,
    sig: Signature,
    t: usize,
    memo: HashMap<(Elem, u32), Rc<NdBuilt>>,
    fake: Option<Box<NdPattern>>,
    log: Option<Vec<NdComponent>>,
    budget: usize,
}

impl NdPattern {
    pub fn new(r: Rc<RegularTreeModel>) -> Self {
        let sig = r.w_signature().clone();
        let t = r.nf().t;
        NdPattern {
            r,
            sig,
            t,
            memo: HashMap::new(),
            fake: None,
            log: None,
            budget: usize::MAX,
        }
    }

    /// Fail with [`Error::BudgetExhausted`] once a component or a joined
    /// structure would exceed `max` elements.
    pub fn set_budget(&mut self, max: usize) {
        self.budget = max;
        if let Some(f) = &mut self.fake {
            f.set_budget(max);
        }
    }

    pub fn model(&self) -> &RegularTreeModel {
        &self.r
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn all_mask(&self) -> u32 {
        (1u32 << self.sig.k()) - 1
    }

    /// Keep every component built from now on (including the fake level).
    pub fn record_components(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    /// Recorded components, fake level last.
    pub fn components_log(&self) -> Vec<&NdComponent> {
        let mut v: Vec<&NdComponent> = self.log.iter().flatten().collect();
        if let Some(f) = &self.fake {
            v.extend(f.components_log());
        }
        v
    }

    fn fake_level(&mut self) -> &mut NdPattern {
        if self.fake.is_none() {
            let mut n = self.sig.k() + 1;
            let name = loop {
                let cand = format!("_fake{n}");
                if self.sig.id(&cand).is_none() {
                    break cand;
                }
                n += 1;
            };
            let mut inner = NdPattern {
                r: self.r.clone(),
                sig: self.sig.clone().with_dist(&name),
                t: self.t,
                memo: HashMap::new(),
                fake: None,
                log: None,
                budget: self.budget,
            };
            if self.log.is_some() {
                inner.record_components();
            }
            self.fake = Some(Box::new(inner));
        }
        self.fake.as_mut().expect("just set")
    }

    /// Distinguished symbols of this level joining two base elements.
    pub fn mask(&self, a: Elem, b: Elem) -> u32 {
        self.r.base_mask(&self.sig, a, b)
    }

    /// Whether the member with W-number `i` of `a`'s witness structure is
    /// joined to `a` by every symbol of `mask`.
    fn member_in(&self, a: Elem, i: usize, mask: u32) -> bool {
        let m = self.r.members(a)[i];
        self.mask(a, m) & mask == mask
    }

    /// One node of each subtree type occurring in the part of the subtree of
    /// `a0` joined to it by every symbol of `tot`; `a0` itself comes first.
    pub fn type_reps(&self, a0: Elem, tot: u32) -> Vec<TreeNode> {
        let mut seen = HashSet::from([a0]);
        let mut reps = vec![TreeNode::root(a0)];
        let mut queue = VecDeque::from([TreeNode::root(a0)]);
        while let Some(x) = queue.pop_front() {
            let a = x.anchor;
            for i in 0..self.r.members(a).len() {
                if i != self.r.self_number(a) && self.member_in(a, i, tot) {
                    let c = self.r.child(&x, i);
                    if seen.insert(c.anchor) {
                        reps.push(c.clone());
                        queue.push_back(c);
                    }
                }
            }
        }
        reps
    }

    /// The structure for the node with anchor `a0` and live symbols `eqs0`.
    pub fn build(&mut self, a0: Elem, eqs0: u32) -> Result<Rc<NdBuilt>> {
        if let Some(b) = self.memo.get(&(a0, eqs0)) {
            return Ok(b.clone());
        }
        let all = self.all_mask();
        if eqs0 & !all != 0 {
            return Err(Error::Invalid(format!("eqs0 mask {eqs0:#b} outside signature")));
        }
        let tot = all & !eqs0;
        let built = if eqs0 == 0 {
            let own = self.r.self_number(a0);
            let singleton =
                (0..self.r.members(a0).len()).all(|i| i == own || !self.member_in(a0, i, tot));
            if singleton {
                NdBuilt {
                    structure: self.r.node_type(a0, &self.sig),
                    origin: 0,
                    pmap: vec![TreeNode::root(a0)],
                }
            } else if self.sig.k() > self.r.base().sig().k() {
                return Err(Error::Invalid(format!(
                    "class of {a0} is not a singleton under the identity symbol"
                )));
            } else {
                let k = self.sig.k();
                let sig = self.sig.clone();
                let inner = self.fake_level().build(a0, 1 << k)?;
                let mut structure = inner.structure.project(&sig)?;
                structure.close_in_place();
                NdBuilt {
                    structure,
                    origin: inner.origin,
                    pmap: inner.pmap.clone(),
                }
            }
        } else {
            let reps = self.type_reps(a0, tot);
            let mut comps = Vec::with_capacity(reps.len());
            for rep in &reps {
                comps.push(self.component(rep, eqs0)?);
            }
            let asm = join_nd_components(&comps, &reps, self.budget)?;
            NdBuilt {
                structure: asm.result,
                origin: asm.origin,
                pmap: asm.pmap,
            }
        };
        let built = Rc::new(built);
        self.memo.insert((a0, eqs0), built.clone());
        Ok(built)
    }

    /// Builds the component whose root is mapped to `rep`.
    pub fn component(&mut self, rep: &TreeNode, eqs0: u32) -> Result<NdComponent> {
        let order: Vec<usize> = (0..32).filter(|j| eqs0 >> j & 1 == 1).collect();
        let l = order.len();
        let tot = self.all_mask() & !eqs0;
        let nlayers = l * (2 * self.t + 1) + 1;
        let mut s = self.r.node_type(rep.anchor, &self.sig);
        s.mark_pre_closure();
        let mut pmap = vec![rep.clone()];
        let mut layers = vec![Vec::new(); nlayers];
        let mut init = vec![Vec::new(); nlayers];
        layers[0].push(0);
        init[0].push(0);
        for i in 0..nlayers - 1 {
            let js = order[i % l];
            // Step 1: a subcomponent for each initial element, glued at it.
            for &c in &init[i].clone() {
                let pc = pmap[c as usize].clone();
                let sub = self.build(pc.anchor, eqs0 & !(1 << js))?;
                let map = s.import(&sub.structure, &[(sub.origin, c)]);
                for (e, &ne) in map.iter().enumerate() {
                    if e as Elem != sub.origin {
                        pmap.push(pc.extend(&sub.pmap[e]));
                        layers[i].push(ne);
                    }
                }
                if s.size() > self.budget {
                    return Err(Error::BudgetExhausted);
                }
            }
            // Step 2: complete the partial witness structures inside the class
            // of all symbols outside eqs0.
            let with_s = tot | 1 << js;
            for &c in &layers[i].clone() {
                let x = pmap[c as usize].clone();
                let a = x.anchor;
                let nm = self.r.members(a).len();
                let mut ids: Vec<Option<Elem>> = vec![None; nm];
                for (idx, id) in ids.iter_mut().enumerate() {
                    if !self.member_in(a, idx, tot) {
                        continue;
                    }
                    if self.member_in(a, idx, with_s) {
                        let wi = self.sig.id(self.r.w_name(idx)).expect("W symbol");
                        let succ: Vec<Elem> = s.successors(wi, c).collect();
                        if succ.len() != 1 {
                            return Err(Error::Invalid(format!(
                                "element {c} has {} partial witnesses numbered {}",
                                succ.len(),
                                idx + 1
                            )));
                        }
                        *id = Some(succ[0]);
                    } else {
                        let f = s.add_element();
                        pmap.push(self.r.child(&x, idx));
                        layers[i + 1].push(f);
                        init[i + 1].push(f);
                        *id = Some(f);
                    }
                }
                let local = self.r.local_structure(a, &self.sig);
                for id in 0..self.sig.num_symbols() {
                    for tu in local.rel(id) {
                        if let Some(u) =
                            tu.iter().map(|e| ids[*e as usize]).collect::<Option<Vec<_>>>()
                        {
                            s.add_tuple(id, u)?;
                        }
                    }
                }
            }
        }
        s.mark_pre_closure();
        let comp = NdComponent {
            rep: rep.clone(),
            eqs0,
            layers,
            init,
            structure: s,
            pmap,
        };
        if let Some(log) = &mut self.log {
            log.push(comp.clone());
        }
        Ok(comp)
    }
}

/// Joins the components (one per entry of `reps`, the first being the type
/// of the origin) by identifying interface elements with roots of copies of
/// the opposite color, keeps the copies reachable from the origin copy and
/// closes the equivalences once.
pub fn join_nd_components(
    comps: &[NdComponent],
    reps: &[TreeNode],
    budget: usize,
) -> Result<NdAssembly> {
    let type_of: HashMap<Elem, usize> = reps.iter().enumerate().map(|(i, r)| (r.anchor, i)).collect();
    // Target copy for the i-th interface element of the copies (g, c).
    let target = |g: usize, color: u8, i: usize| -> Result<CopyIndex> {
        let b = comps[g].interface()[i];
        let anchor = comps[g].pmap[b as usize].anchor;
        let gt = *type_of
            .get(&anchor)
            .ok_or_else(|| Error::Invalid(format!("interface anchor {anchor} has no component")))?;
        Ok(CopyIndex {
            gtype: gt,
            color: 1 - color,
            slot: Some((i, g)),
        })
    };
    let start = CopyIndex {
        gtype: 0,
        color: 0,
        slot: None,
    };
    let mut pos: HashMap<CopyIndex, usize> = HashMap::from([(start, 0)]);
    let mut copies = vec![start];
    let mut graph = Vec::new();
    let mut q = 0;
    while q < copies.len() {
        let x = copies[q];
        for i in 0..comps[x.gtype].interface().len() {
            let y = target(x.gtype, x.color, i)?;
            let next = copies.len();
            let py = *pos.entry(y).or_insert(next);
            if py == next {
                copies.push(y);
            }
            graph.push((q, py));
        }
        q += 1;
    }
    let total: usize = copies.iter().map(|x| comps[x.gtype].structure.size()).sum();
    if total > budget.saturating_mul(2) {
        return Err(Error::BudgetExhausted);
    }
    let sig = comps[0].structure.sig().clone();
    let mut union = FiniteStructure::pre_closure(&sig, 0);
    let mut maps = Vec::with_capacity(copies.len());
    let mut pmap = Vec::new();
    for x in &copies {
        let c = &comps[x.gtype];
        maps.push(union.import(&c.structure, &[]));
        pmap.extend(c.pmap.iter().cloned());
    }
    let mut rep: Vec<Elem> = union.elements().collect();
    let mut identifications = Vec::new();
    for (n, x) in copies.iter().enumerate() {
        for (i, &b) in comps[x.gtype].interface().iter().enumerate() {
            let y = target(x.gtype, x.color, i)?;
            let root = maps[pos[&y]][comps[y.gtype].root() as usize];
            let e = maps[n][b as usize];
            rep[e as usize] = root;
            identifications.push((e, root));
        }
    }
    let (mut result, qmap) = union.quotient(&rep);
    let mut merged = vec![None; result.size()];
    for e in union.elements() {
        if rep[e as usize] == e {
            merged[qmap[e as usize] as usize] = Some(pmap[e as usize].clone());
        }
    }
    let pmap = merged
        .into_iter()
        .map(|p| p.expect("every class has its representative"))
        .collect();
    if result.size() > budget {
        return Err(Error::BudgetExhausted);
    }
    result.close_in_place();
    let origin = qmap[maps[0][comps[0].root() as usize] as usize];
    Ok(NdAssembly {
        copies,
        identifications,
        component_graph: graph,
        result,
        origin,
        pmap,
    })
}
