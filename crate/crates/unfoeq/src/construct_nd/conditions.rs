//! Extensional checks for a structure `B` built for a node `a0` with live
//! symbols `eqs0`, where `A_0` is the part of the subtree of `a0` joined to
//! it by every symbol of `E_tot` (the distinguished symbols outside `eqs0`):
//!
//! - d1: every symbol of `E_tot` is total on `B`;
//! - d2: the origin is mapped to `a0`;
//! - d3: `b` has exactly one `W_i`-successor if the `i`-th member of the
//!   witness structure of `p(b)` lies in `A_0`, and none otherwise;
//! - d4: for every set of at most `t` elements, the union of their witness
//!   structures maps homomorphically into `A_0`, isomorphically on each
//!   witness structure, keeping subtree types of the chosen elements and
//!   sending the origin to `a0` when it is chosen;
//! - d5: the witness structure of `b` is isomorphic to the one of `p(b)`
//!   restricted to `A_0`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::component::{NdBuilt, NdComponent};
use super::regular::{grow, RegularTreeModel, TreeNode};
use crate::construct2v::ConditionReport;
use crate::semantics::{any_tuple, find_homomorphism, HomConstraint};
use crate::structures::{Elem, FiniteStructure};
use crate::Result;

/// Depth of the truncated unraveling used as the target of the d4 search:
/// enough for every anchor to recur a few times below the root. The search
/// is sound for any depth (the truncation is an induced substructure), but a
/// too shallow target can miss homomorphisms.
pub fn target_depth(r: &RegularTreeModel) -> usize {
    2 * r.base().size() + 2
}

/// Induced substructure on `elems`, new id `i` being `elems[i]` (no sorting).
pub(crate) fn local_on(s: &FiniteStructure, elems: &[Elem]) -> FiniteStructure {
    let sig = s.sig();
    let mut out = FiniteStructure::pre_closure(sig, elems.len());
    for id in 0..sig.num_symbols() {
        let ar = sig.arity(id);
        any_tuple(elems.len(), ar, &mut |t| {
            let u: Vec<Elem> = t.iter().map(|&i| elems[i as usize]).collect();
            if s.holds(id, &u) {
                out.add_tuple(id, t.to_vec()).expect("arity matches");
            }
            false
        });
    }
    if !s.is_pre_closure() {
        out.close_in_place();
    }
    out
}

/// Witness-structure members of each element by W-number (`None` where there
/// is no successor; the first successor where there are several).
fn w_members(r: &RegularTreeModel, s: &FiniteStructure) -> Vec<Vec<Option<Elem>>> {
    let ids: Vec<usize> = (0..r.num_w())
        .map(|i| s.sig().id(r.w_name(i)).expect("W symbol"))
        .collect();
    s.elements()
        .map(|a| ids.iter().map(|&id| s.successors(id, a).next()).collect())
        .collect()
}

/// Checks d1-d5 for `b` built for `a0`. `depth` bounds the truncated target
/// of the d4 search. For `t = 2`, pairs with unrelated witness sets are
/// checked once per group of interchangeable elements.
pub fn verify_d_conditions(
    r: &RegularTreeModel,
    b: &NdBuilt,
    a0: &TreeNode,
    eqs0: u32,
    t: usize,
    depth: usize,
) -> Result<ConditionReport> {
    verify_d(r, b, a0, eqs0, t, depth, false)
}

/// [`verify_d_conditions`] with d4 run on every set of at most `t` elements.
pub fn verify_d_conditions_exhaustive(
    r: &RegularTreeModel,
    b: &NdBuilt,
    a0: &TreeNode,
    eqs0: u32,
    t: usize,
    depth: usize,
) -> Result<ConditionReport> {
    verify_d(r, b, a0, eqs0, t, depth, true)
}

fn verify_d(
    r: &RegularTreeModel,
    b: &NdBuilt,
    a0: &TreeNode,
    eqs0: u32,
    t: usize,
    depth: usize,
    exhaustive: bool,
) -> Result<ConditionReport> {
    let s = &b.structure;
    let sig = s.sig().clone();
    let all = (1u32 << sig.k()) - 1;
    let tot = all & !eqs0;
    let mut rep = ConditionReport::default();
    let in_a0 = |a: Elem, i: usize| -> bool {
        let m = r.members(a)[i];
        r.base_mask(&sig, a, m) & tot == tot
    };

    // d1
    let class = s.eq_class(b.origin, tot);
    let d1 = if class.len() == s.size() {
        None
    } else {
        let e = s.elements().find(|e| !class.contains(e)).expect("missing element");
        Some(((b.origin, e), format!("elements {} and {e} not joined by every symbol outside eqs0", b.origin)))
    };
    rep.push("d1", d1);

    // d2
    let d2 = (b.pmap[b.origin as usize] != *a0).then(|| {
        (
            (b.origin, b.origin),
            format!("origin mapped to {:?}, expected {:?}", b.pmap[b.origin as usize], a0),
        )
    });
    rep.push("d2", d2);

    // d3
    let ids: Vec<usize> = (0..r.num_w())
        .map(|i| sig.id(r.w_name(i)).expect("W symbol"))
        .collect();
    let mut d3 = None;
    'd3: for a in s.elements() {
        let anchor = b.pmap[a as usize].anchor;
        for (i, &id) in ids.iter().enumerate() {
            let n = s.successors(id, a).count();
            let want = usize::from(i < r.members(anchor).len() && in_a0(anchor, i));
            if n != want {
                d3 = Some((
                    (a, a),
                    format!("element {a} has {n} witnesses numbered {}, expected {want}", i + 1),
                ));
                break 'd3;
            }
        }
    }
    rep.push("d3", d3);
    let ws = w_members(r, s);

    // d5
    let mut locals: HashMap<Elem, FiniteStructure> = HashMap::new();
    let mut d5 = None;
    for a in s.elements() {
        let anchor = b.pmap[a as usize].anchor;
        let nm = r.members(anchor).len();
        let idx: Vec<usize> = (0..nm).filter(|&i| in_a0(anchor, i)).collect();
        let mine: Option<Vec<Elem>> = idx.iter().map(|&i| ws[a as usize][i]).collect();
        let ok = mine.is_some_and(|mine| {
            let local = locals
                .entry(anchor)
                .or_insert_with(|| r.local_structure(anchor, &sig));
            let want: Vec<Elem> = idx.iter().map(|&i| i as Elem).collect();
            let mut distinct = mine.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len() == mine.len() && local_on(s, &mine) == local_on(local, &want)
        });
        if !ok {
            d5 = Some(((a, a), format!("witness structure of {a} differs from its image's")));
            break;
        }
    }
    rep.push("d5", d5);

    // d4
    let d4 = check_d4(r, b, a0, eqs0, t, depth, &ws, exhaustive);
    rep.push("d4", d4);
    rep.results.sort_by_key(|x| x.id);
    Ok(rep)
}

#[derive(Hash, PartialEq, Eq)]
struct D4Key {
    local: FiniteStructure,
    iso: Vec<Vec<Elem>>,
    anchors: Vec<Elem>,
    origin: Vec<bool>,
}

/// Memoized homomorphism search into the truncated class of `a0`.
struct D4Search {
    target: FiniteStructure,
    by_anchor: BTreeMap<Elem, Vec<Elem>>,
    cache: HashMap<D4Key, bool>,
}

impl D4Search {
    /// `key.iso[n][0]` is the position of the `n`-th chosen element.
    fn holds(&mut self, key: D4Key) -> bool {
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let mut c = HomConstraint {
            iso_on: key.iso.clone(),
            ..HomConstraint::preserving()
        };
        for (n, set) in key.iso.iter().enumerate() {
            let pos = set[0];
            let cands = self.by_anchor.get(&key.anchors[n]).cloned().unwrap_or_default();
            c.candidates.insert(pos, cands);
            if key.origin[n] {
                c.fixed.insert(pos, 0);
            }
        }
        let found = find_homomorphism(&key.local, &self.target, &c).is_some();
        self.cache.insert(key, found);
        found
    }
}

#[allow(clippy::too_many_arguments)]
fn check_d4(
    r: &RegularTreeModel,
    b: &NdBuilt,
    a0: &TreeNode,
    eqs0: u32,
    t: usize,
    depth: usize,
    ws: &[Vec<Option<Elem>>],
    exhaustive: bool,
) -> Option<((Elem, Elem), String)> {
    let s = &b.structure;
    let sig = s.sig().clone();
    let all = (1u32 << sig.k()) - 1;
    let tot = all & !eqs0;
    let tree = grow(r, a0.anchor, depth, &sig, &|a, i| {
        r.base_mask(&sig, a, r.members(a)[i]) & tot == tot
    });
    let mut by_anchor: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    for (e, n) in tree.nodes.iter().enumerate() {
        by_anchor.entry(n.anchor).or_default().push(e as Elem);
    }
    let mut search = D4Search {
        target: tree.structure,
        by_anchor,
        cache: HashMap::new(),
    };
    let wset: Vec<Vec<Elem>> = ws
        .iter()
        .enumerate()
        .map(|(a, v)| {
            let mut out = vec![a as Elem];
            for e in v.iter().flatten() {
                if !out.contains(e) {
                    out.push(*e);
                }
            }
            out
        })
        .collect();
    let anchor = |a: Elem| b.pmap[a as usize].anchor;
    // The chosen elements' witness sets, laid out in order with shared
    // elements kept once.
    let element_key = |tuple: &[Elem]| -> D4Key {
        let mut elems: Vec<Elem> = Vec::new();
        let mut iso = Vec::new();
        for &a in tuple {
            let mut set = Vec::new();
            for &e in &wset[a as usize] {
                let p = match elems.iter().position(|x| *x == e) {
                    Some(p) => p,
                    None => {
                        elems.push(e);
                        elems.len() - 1
                    }
                };
                set.push(p as Elem);
            }
            iso.push(set);
        }
        D4Key {
            local: local_on(s, &elems),
            iso,
            anchors: tuple.iter().map(|&a| anchor(a)).collect(),
            origin: tuple.iter().map(|a| *a == b.origin).collect(),
        }
    };
    for a in s.elements() {
        if !search.holds(element_key(&[a])) {
            return Some(((a, a), format!("no homomorphism for the witness structure of {a}")));
        }
    }
    if t < 2 {
        return None;
    }
    if t > 2 || exhaustive {
        for tuple in subsets(s.size(), t) {
            if tuple.len() >= 2 && !search.holds(element_key(&tuple)) {
                return Some(((tuple[0], tuple[1]), format!("no homomorphism for {tuple:?}")));
            }
        }
        return None;
    }
    // Pairs whose witness sets share an element or a base atom are checked
    // one by one.
    let nbr = base_neighbours(s);
    let mut inv: Vec<Vec<Elem>> = vec![Vec::new(); s.size()];
    for (a, set) in wset.iter().enumerate() {
        for &e in set {
            inv[e as usize].push(a as Elem);
        }
    }
    let mut mark = vec![u32::MAX; s.size()];
    for a1 in s.elements() {
        for &e in &wset[a1 as usize] {
            for &z in std::iter::once(&e).chain(&nbr[e as usize]) {
                for &a2 in &inv[z as usize] {
                    if a2 != a1 && mark[a2 as usize] != a1 {
                        mark[a2 as usize] = a1;
                        if !search.holds(element_key(&[a1, a2])) {
                            return Some(((a1, a2), format!("no homomorphism for {{{a1}, {a2}}}")));
                        }
                    }
                }
            }
        }
    }
    // Otherwise the pair's structure is the disjoint union of the two witness
    // structures joined across by the shared classes of symbols in eqs0 (and
    // by every symbol of E_tot), so it depends only on each element's own
    // witness structure, anchor and classes. Elements agreeing on these form
    // one group; a failing group pair fails for every pair it describes,
    // since the described structure maps onto any linked pair's.
    let live: Vec<usize> = (0..sig.k()).filter(|j| eqs0 >> j & 1 == 1).collect();
    let class_id: Vec<Vec<Elem>> = live
        .iter()
        .map(|&j| {
            let id = sig.dist_id(j);
            s.elements().map(|e| s.successors(id, e).next().unwrap_or(e)).collect()
        })
        .collect();
    let mut profiles: HashMap<FiniteStructure, u32> = HashMap::new();
    let mut groups: HashMap<(u32, Elem, bool, Vec<Elem>), usize> = HashMap::new();
    let mut members: Vec<Vec<Elem>> = Vec::new();
    for a in s.elements() {
        let local = local_on(s, &wset[a as usize]);
        let next = profiles.len() as u32;
        let pid = *profiles.entry(local).or_insert(next);
        let classes: Vec<Elem> = class_id
            .iter()
            .flat_map(|cl| wset[a as usize].iter().map(move |&e| cl[e as usize]))
            .collect();
        let next = members.len();
        let g = *groups.entry((pid, anchor(a), a == b.origin, classes)).or_insert(next);
        if g == next {
            members.push(Vec::new());
        }
        members[g].push(a);
    }
    let mut groups_in_class: HashMap<(usize, Elem), Vec<usize>> = HashMap::new();
    for (g, ms) in members.iter().enumerate() {
        let a = ms[0];
        for (jj, cl) in class_id.iter().enumerate() {
            for &e in &wset[a as usize] {
                let v = groups_in_class.entry((jj, cl[e as usize])).or_default();
                if v.last() != Some(&g) {
                    v.push(g);
                }
            }
        }
    }
    let mut seen = vec![usize::MAX; members.len()];
    for (g1, ms1) in members.iter().enumerate() {
        let a1 = ms1[0];
        for (jj, cl) in class_id.iter().enumerate() {
            for &e in &wset[a1 as usize] {
                for &g2 in &groups_in_class[&(jj, cl[e as usize])] {
                    if g2 < g1 || seen[g2] == g1 || (g2 == g1 && ms1.len() < 2) {
                        continue;
                    }
                    seen[g2] = g1;
                    let a2 = if g2 == g1 { ms1[1] } else { members[g2][0] };
                    let key = group_key(s, &wset, &class_id, tot, a1, a2, b.origin, &anchor);
                    if !search.holds(key) {
                        return Some(((a1, a2), format!("no homomorphism for {{{a1}, {a2}}}")));
                    }
                }
            }
        }
    }
    None
}

/// Disjoint union of the witness structures of `a1` and `a2`, joined across
/// by equal classes of the live symbols and by every symbol of `tot`.
#[allow(clippy::too_many_arguments)]
fn group_key(
    s: &FiniteStructure,
    wset: &[Vec<Elem>],
    class_id: &[Vec<Elem>],
    tot: u32,
    a1: Elem,
    a2: Elem,
    origin: Elem,
    anchor: &dyn Fn(Elem) -> Elem,
) -> D4Key {
    let sig = s.sig();
    let w1 = &wset[a1 as usize];
    let w2 = &wset[a2 as usize];
    let n1 = w1.len();
    let mut u = FiniteStructure::pre_closure(sig, 0);
    u.import(&local_on(s, w1), &[]);
    u.import(&local_on(s, w2), &[]);
    let live: Vec<usize> = (0..sig.k()).filter(|j| tot >> j & 1 == 0).collect();
    for (x, &ex) in w1.iter().enumerate() {
        for (y, &ey) in w2.iter().enumerate() {
            let (x, y) = (x as Elem, (n1 + y) as Elem);
            for j in 0..sig.k() {
                let joined = match live.iter().position(|&l| l == j) {
                    Some(jj) => class_id[jj][ex as usize] == class_id[jj][ey as usize],
                    None => true,
                };
                if joined {
                    let id = sig.dist_id(j);
                    u.add_tuple(id, vec![x, y]).expect("binary");
                    u.add_tuple(id, vec![y, x]).expect("binary");
                }
            }
        }
    }
    u.close_in_place();
    D4Key {
        local: u,
        iso: vec![
            (0..n1 as Elem).collect(),
            (n1 as Elem..(n1 + w2.len()) as Elem).collect(),
        ],
        anchors: vec![anchor(a1), anchor(a2)],
        origin: vec![a1 == origin, a2 == origin],
    }
}

fn base_neighbours(s: &FiniteStructure) -> Vec<Vec<Elem>> {
    let sig = s.sig();
    let mut nbr: Vec<Vec<Elem>> = vec![Vec::new(); s.size()];
    for id in 0..sig.num_symbols() {
        if sig.is_dist(id) {
            continue;
        }
        for tu in s.rel(id) {
            for &x in tu {
                for &y in tu {
                    if x != y && !nbr[x as usize].contains(&y) {
                        nbr[x as usize].push(y);
                    }
                }
            }
        }
    }
    nbr
}


fn subsets(n: usize, t: usize) -> Vec<Vec<Elem>> {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == t {
            return;
        }
        for a in start..n {
            cur.push(a as Elem);
            go(a + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, t, &mut Vec::new(), &mut out);
    out
}

/// Gaifman distance, with the symbols outside `eqs0` removed, between the
/// first `l` layers and the last `l` inner layers of the closed component is
/// at least `t`: no connected induced subgraph of at most `t` elements meets
/// both.
pub fn separation_check(comp: &NdComponent, t: usize) -> bool {
    let closed = comp.structure.close_equivalences();
    let l = comp.eqs0.count_ones() as usize;
    let n_inner = comp.num_layers() - 1;
    if l == 0 || t == 0 {
        return true;
    }
    let first: Vec<Elem> = comp.layers[..l.min(n_inner)].concat();
    let last: Vec<Elem> = comp.layers[n_inner.saturating_sub(l)..n_inner].concat();
    let dist = gaifman_distances(&closed, comp.eqs0, &first);
    last.iter().all(|&e| dist[e as usize].is_none_or(|d| d >= t))
}

/// Breadth-first distances from `sources` in the Gaifman graph keeping base
/// atoms and the distinguished symbols in `eqs0`.
pub(crate) fn gaifman_distances(s: &FiniteStructure, eqs0: u32, sources: &[Elem]) -> Vec<Option<usize>> {
    let sig = s.sig();
    let n = s.size();
    let nbr = base_neighbours(s);
    let live: Vec<usize> = (0..sig.k()).filter(|j| eqs0 >> j & 1 == 1).map(|j| sig.dist_id(j)).collect();
    let mut expanded: Vec<Vec<bool>> = vec![vec![false; n]; live.len()];
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for &e in sources {
        if dist[e as usize].is_none() {
            dist[e as usize] = Some(0);
            queue.push_back(e);
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize].expect("queued elements have distances");
        let mut next: Vec<Elem> = nbr[x as usize].clone();
        for (k, &id) in live.iter().enumerate() {
            if expanded[k][x as usize] {
                continue;
            }
            let members: Vec<Elem> = s.successors(id, x).collect();
            for &m in &members {
                expanded[k][m as usize] = true;
            }
            next.extend(members);
        }
        for y in next {
            if dist[y as usize].is_none() {
                dist[y as usize] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Separation by enumerating connected element sets of size at most `t`
/// (for cross-checking on small components).
pub fn separation_check_exhaustive(comp: &NdComponent, t: usize) -> bool {
    let closed = comp.structure.close_equivalences();
    let l = comp.eqs0.count_ones() as usize;
    let n_inner = comp.num_layers() - 1;
    if l == 0 {
        return true;
    }
    let n = closed.size();
    let mut first = vec![false; n];
    let mut last = vec![false; n];
    for &e in comp.layers[..l.min(n_inner)].concat().iter() {
        first[e as usize] = true;
    }
    for &e in comp.layers[n_inner.saturating_sub(l)..n_inner].concat().iter() {
        last[e as usize] = true;
    }
    let adj = |x: Elem, y: Elem| -> bool {
        let sig = closed.sig();
        (0..sig.num_symbols()).any(|id| {
            if sig.is_dist(id) {
                let j = (0..sig.k()).find(|&j| sig.dist_id(j) == id).expect("dist");
                comp.eqs0 >> j & 1 == 1 && closed.holds(id, &[x, y])
            } else {
                closed.rel(id).iter().any(|tu| tu.contains(&x) && tu.contains(&y))
            }
        })
    };
    for set in subsets(n, t) {
        if !set.iter().any(|e| first[*e as usize]) || !set.iter().any(|e| last[*e as usize]) {
            continue;
        }
        let mut seen = vec![false; set.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for j in 0..set.len() {
                if !seen[j] && adj(set[i], set[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().all(|x| *x) {
            return false;
        }
    }
    true
}
