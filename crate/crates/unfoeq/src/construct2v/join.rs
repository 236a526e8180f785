//! Joining copies of the pattern components into one structure.

use std::collections::{HashMap, VecDeque};

use super::component::PatternComponent;
use super::pattern::{membership, Built, Pattern};
use crate::structures::{AtomicType2, Elem, FiniteStructure};
use crate::{Error, Result};

/// Index of a component copy. `gtype` and `source_gtype` index the
/// pattern's generalized types; `i` and `j` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentIndex {
    pub gtype: usize,
    pub color: u8,
    pub i: usize,
    pub j: usize,
    pub source_gtype: usize,
}

#[derive(Debug, Clone)]
pub struct Join {
    pub leaf: Elem,
    pub root: Elem,
    pub beta: AtomicType2,
    pub from: usize,
    pub to: usize,
}

/// The joined structure. Only copies reachable from the start copy are
/// materialized, in breadth-first order.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub copies: Vec<ComponentIndex>,
    /// Per copy: position of its component in the input list and the map
    /// from component elements to result elements.
    pub copy_maps: Vec<(usize, Vec<Elem>)>,
    pub joins: Vec<Join>,
    pub component_graph: Vec<Vec<usize>>,
    pub result: FiniteStructure,
    pub pmap: Vec<Elem>,
}

impl Assembly {
    pub fn into_built(self) -> Built {
        Built {
            structure: self.result,
            pmap: self.pmap,
        }
    }

    /// Whether every copy induces exactly its component's structure.
    pub fn copies_intact(&self, comps: &[PatternComponent]) -> Option<usize> {
        (0..self.copies.len()).find(|&x| {
            let (ci, map) = &self.copy_maps[x];
            !induces_copy(&self.result, &comps[*ci].structure, map)
        })
    }
}

/// Whether `map` is an isomorphism from `small` onto the substructure of
/// `big` induced by its image.
pub fn induces_copy(big: &FiniteStructure, small: &FiniteStructure, map: &[Elem]) -> bool {
    if big.sig() != small.sig() {
        return false;
    }
    let mut back = HashMap::new();
    for (i, &e) in map.iter().enumerate() {
        if back.insert(e, i as Elem).is_some() {
            return false;
        }
    }
    for id in 0..big.sig().num_symbols() {
        for t in small.rel(id) {
            let u: Vec<Elem> = t.iter().map(|e| map[*e as usize]).collect();
            if !big.holds(id, &u) {
                return false;
            }
        }
        for t in big.rel(id) {
            let Some(u) = t.iter().map(|e| back.get(e).copied()).collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            if !small.holds(id, &u) {
                return false;
            }
        }
    }
    true
}

/// Per leaf and conjunct: witness generalized type and copied 2-type.
type LeafNeeds = Vec<Vec<Option<(usize, AtomicType2)>>>;

/// Needed join for leaf `s` (0-based) and conjunct `j`: the generalized type
/// of the chosen witness and the copied 2-type.
fn leaf_needs(
    pat: &Pattern,
    comp: &PatternComponent,
    within: &[bool],
) -> Result<LeafNeeds> {
    let mut out = Vec::with_capacity(comp.leaves.len());
    for &leaf in &comp.leaves {
        let pc = comp.pmap[leaf as usize];
        let mut row = Vec::with_capacity(pat.nf.m());
        for j in 0..pat.nf.m() {
            let need = match pat.witnesses_in(pc, j, within) {
                Some(ws) if !ws.is_empty() && !ws.contains(&pc) => {
                    let w = ws[0];
                    Some((pat.gtype_id(w), pat.s.atomic_type2(pc, w)?))
                }
                _ => None,
            };
            row.push(need);
        }
        out.push(row);
    }
    Ok(out)
}

/// Joins copies of `comps` (one per realized generalized type of the class
/// of `a0`), starting from a copy of the component rooted at `a0`.
pub fn join_components(
    pat: &Pattern,
    comps: &[PatternComponent],
    a0: Elem,
    eqs0: u32,
) -> Result<Assembly> {
    let class = pat.class_of(a0, eqs0);
    let within = membership(pat.s.size(), &class);
    let by_gt: HashMap<usize, usize> = comps.iter().enumerate().map(|(i, c)| (c.gtype, i)).collect();
    let start_gt = pat.gtype_id(a0);
    let start_ci = *by_gt
        .get(&start_gt)
        .ok_or_else(|| Error::Invalid("no component for the type of a0".into()))?;
    if comps[start_ci].pmap[comps[start_ci].root as usize] != a0 {
        return Err(Error::Invalid("start component is not rooted at a0".into()));
    }
    let needs: Vec<_> = comps
        .iter()
        .map(|c| leaf_needs(pat, c, &within))
        .collect::<Result<_>>()?;
    let start = ComponentIndex {
        gtype: start_gt,
        color: 0,
        i: 1,
        j: 1,
        source_gtype: start_gt,
    };
    let mut ids: HashMap<ComponentIndex, usize> = HashMap::from([(start, 0)]);
    let mut copies = vec![start];
    // (from copy, leaf position, conjunct, to copy)
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut graph: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let cx = copies[x];
        let ci = by_gt[&cx.gtype];
        for (s, row) in needs[ci].iter().enumerate() {
            for (j, need) in row.iter().enumerate() {
                let Some((gt, _)) = need else { continue };
                if !by_gt.contains_key(gt) {
                    return Err(Error::Invalid(format!("missing component for type {gt}")));
                }
                let target = ComponentIndex {
                    gtype: *gt,
                    color: 1 - cx.color,
                    i: s + 1,
                    j: j + 1,
                    source_gtype: cx.gtype,
                };
                let y = *ids.entry(target).or_insert_with(|| {
                    copies.push(target);
                    graph.push(Vec::new());
                    queue.push_back(copies.len() - 1);
                    copies.len() - 1
                });
                edges.push((x, s, j, y));
                if !graph[x].contains(&y) {
                    graph[x].push(y);
                }
            }
        }
    }
    let mut result = FiniteStructure::new(pat.s.sig(), 0);
    let mut pmap = Vec::new();
    let mut copy_maps = Vec::with_capacity(copies.len());
    for cx in &copies {
        let ci = by_gt[&cx.gtype];
        let map = result.import(&comps[ci].structure, &[]);
        pmap.extend_from_slice(&comps[ci].pmap);
        copy_maps.push((ci, map));
    }
    let mut joins = Vec::with_capacity(edges.len());
    for (x, s, j, y) in edges {
        let (cx, mx) = &copy_maps[x];
        let (cy, my) = &copy_maps[y];
        let leaf = mx[comps[*cx].leaves[s] as usize];
        let root = my[comps[*cy].root as usize];
        let beta = needs[*cx][s][j].as_ref().expect("edge from a need").1.clone();
        result.join_by(leaf, root, &beta);
        joins.push(Join {
            leaf,
            root,
            beta,
            from: x,
            to: y,
        });
    }
    result.close_in_place();
    Ok(Assembly {
        copies,
        copy_maps,
        joins,
        component_graph: graph,
        result,
        pmap,
    })
}
