use crate::logic::{NormalFormFormula, Signature, SymId};
use crate::semantics::{check_model, model_failure, phi_witness_structure, WitnessStructure};
use crate::structures::{Elem, FiniteStructure};
use crate::{Error, Result};

/// A finite model with one fixed witness structure per element. Unraveling
/// it along these choices gives a tree-like model in which the subtree below
/// a node depends only on the node's anchor, so anchors serve as subtree
/// types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularTreeModel {
    base: FiniteStructure,
    nf: NormalFormFormula,
    witness_choice: Vec<WitnessStructure>,
    self_number: Vec<usize>,
    wsig: Signature,
    w_ids: Vec<SymId>,
}

/// A node of the unraveling: its anchor in the base model and the W-numbers
/// (0-based) leading to it from a designated root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    pub anchor: Elem,
    pub path: Vec<u16>,
}

impl TreeNode {
    pub fn root(anchor: Elem) -> Self {
        TreeNode {
            anchor,
            path: Vec::new(),
        }
    }

    /// `rel` read relative to `self`.
    pub fn extend(&self, rel: &TreeNode) -> TreeNode {
        let mut path = self.path.clone();
        path.extend_from_slice(&rel.path);
        TreeNode {
            anchor: rel.anchor,
            path,
        }
    }
}

/// Deterministic witness choice (least tuples per conjunct) and W-numbering
/// (members in increasing order) for a finite model of `nf`.
pub fn regularize(base: &FiniteStructure, nf: &NormalFormFormula) -> Result<RegularTreeModel> {
    if !check_model(base, nf) {
        let why = model_failure(base, nf).unwrap_or_default();
        return Err(Error::Invalid(format!("base is not a model: {why}")));
    }
    let witness_choice: Vec<WitnessStructure> = base
        .elements()
        .map(|a| phi_witness_structure(base, nf, a).expect("model has witnesses"))
        .collect();
    let self_number = witness_choice
        .iter()
        .map(|w| w.local(w.owner).expect("owner is a member") as usize)
        .collect();
    let q = witness_choice.iter().map(|w| w.members.len()).max().unwrap_or(1);
    let sig = base.sig();
    let mut prefix = String::from("_W");
    while (1..=q).any(|i| sig.id(&format!("{prefix}{i}")).is_some()) {
        prefix.push('_');
    }
    let mut wsig = sig.clone();
    for i in 1..=q {
        wsig.add_base(&format!("{prefix}{i}"), 2)?;
    }
    let w_ids = (1..=q)
        .map(|i| wsig.id(&format!("{prefix}{i}")).expect("just added"))
        .collect();
    Ok(RegularTreeModel {
        base: base.clone(),
        nf: nf.clone(),
        witness_choice,
        self_number,
        wsig,
        w_ids,
    })
}

impl RegularTreeModel {
    pub fn base(&self) -> &FiniteStructure {
        &self.base
    }

    pub fn nf(&self) -> &NormalFormFormula {
        &self.nf
    }

    pub fn witness_choice(&self, a: Elem) -> &WitnessStructure {
        &self.witness_choice[a as usize]
    }

    /// Members of the witness structure of `a`, in W-number order.
    pub fn members(&self, a: Elem) -> &[Elem] {
        &self.witness_choice[a as usize].members
    }

    /// W-number of `a` inside its own witness structure.
    pub fn self_number(&self, a: Elem) -> usize {
        self.self_number[a as usize]
    }

    /// Number of W symbols.
    pub fn num_w(&self) -> usize {
        self.w_ids.len()
    }

    /// The base signature with the W symbols added.
    pub fn w_signature(&self) -> &Signature {
        &self.wsig
    }

    /// Name of the W symbol for 0-based number `i`.
    pub fn w_name(&self, i: usize) -> &str {
        self.wsig.name(self.w_ids[i])
    }

    pub fn num_subtree_types(&self) -> usize {
        self.base.size()
    }

    /// The node reached from `node` through W-number `i`.
    pub fn child(&self, node: &TreeNode, i: usize) -> TreeNode {
        let mut path = node.path.clone();
        path.push(i as u16);
        TreeNode {
            anchor: self.members(node.anchor)[i],
            path,
        }
    }

    /// Whether the anchors along the path of `node`, read from `root`, follow
    /// the chosen witness structures.
    pub fn is_valid_node(&self, root: Elem, node: &TreeNode) -> bool {
        let mut a = root;
        for &i in &node.path {
            let ms = self.members(a);
            let i = i as usize;
            if i >= ms.len() || i == self.self_number(a) {
                return false;
            }
            a = ms[i];
        }
        (root as usize) < self.base.size() && a == node.anchor
    }

    /// The witness structure of a node with anchor `a`, over `sig` (which
    /// extends the W signature; extra distinguished symbols are identities).
    /// Local id `i` is the member with W-number `i`. Besides the base atoms it
    /// holds `W_i(owner, member_i)` and each member's own self-loop.
    pub fn local_structure(&self, a: Elem, sig: &Signature) -> FiniteStructure {
        let ws = &self.witness_choice[a as usize];
        let mut s = ws
            .structure
            .reinterpret(sig)
            .expect("signature extends the base");
        let owner = self.self_number(a) as Elem;
        for (i, &m) in ws.members.iter().enumerate() {
            let wi = sig.id(self.w_name(i)).expect("W symbol present");
            s.add_tuple(wi, vec![owner, i as Elem]).expect("binary");
            let ws_m = sig.id(self.w_name(self.self_number(m))).expect("W symbol present");
            s.add_tuple(ws_m, vec![i as Elem, i as Elem]).expect("binary");
        }
        s.close_in_place();
        s
    }

    /// The 1-element structure carrying the 1-type of a node with anchor `a`.
    pub fn node_type(&self, a: Elem, sig: &Signature) -> FiniteStructure {
        let own = self.self_number(a) as Elem;
        self.local_structure(a, sig)
            .restrict(&[own])
            .expect("owner in domain")
    }

    /// Bitmask of the distinguished symbols of `sig` joining `a` and `b` in
    /// the base; symbols missing from the base act as identities.
    pub fn base_mask(&self, sig: &Signature, a: Elem, b: Elem) -> u32 {
        let k0 = self.base.sig().k();
        let mut m = self.base.eq_mask(a, b);
        if a == b {
            for j in k0..sig.k() {
                m |= 1 << j;
            }
        }
        m
    }
}

/// A truncated unraveling: levels of tree nodes, with the map to the base.
#[derive(Debug, Clone)]
pub struct Unraveling {
    pub structure: FiniteStructure,
    pub levels: Vec<Vec<Elem>>,
    pub nodes: Vec<TreeNode>,
    pub parent: Vec<Option<Elem>>,
    /// Copies of witness structures: owner and members in W-number order
    /// (`None` for members dropped by the child filter).
    pub blocks: Vec<(Elem, Vec<Option<Elem>>)>,
}

impl Unraveling {
    /// The map to the base model.
    pub fn map(&self) -> Vec<Elem> {
        self.nodes.iter().map(|n| n.anchor).collect()
    }
}

/// Unraveling from element 0 of the base, over the base signature.
pub fn unravel_truncated(r: &RegularTreeModel, depth: usize) -> Unraveling {
    unravel_from(r, 0, depth)
}

/// Unraveling from `root`, over the base signature.
pub fn unravel_from(r: &RegularTreeModel, root: Elem, depth: usize) -> Unraveling {
    let sig = r.base.sig().clone();
    let tree = grow(r, root, depth, r.w_signature(), &|_, _| true);
    let structure = tree.structure.project(&sig).expect("sub-signature");
    Unraveling { structure, ..tree }
}

/// Builds levels `0..=depth` below a root with anchor `root` over `sig`,
/// keeping a child only when `keep(parent_anchor, w_number)` holds, and
/// closes the equivalences.
pub(crate) fn grow(
    r: &RegularTreeModel,
    root: Elem,
    depth: usize,
    sig: &Signature,
    keep: &dyn Fn(Elem, usize) -> bool,
) -> Unraveling {
    let mut s = FiniteStructure::pre_closure(sig, 0);
    let mut nodes = vec![TreeNode::root(root)];
    let mut parent = vec![None];
    let mut levels = vec![vec![0]];
    let mut blocks = Vec::new();
    s.add_element();
    for level in 0..=depth {
        let mut next = Vec::new();
        for &x in &levels[level].clone() {
            let node = nodes[x as usize].clone();
            let a = node.anchor;
            let local = r.local_structure(a, sig);
            let own = r.self_number(a);
            let mut ids: Vec<Option<Elem>> = vec![None; r.members(a).len()];
            ids[own] = Some(x);
            if level < depth {
                for i in 0..ids.len() {
                    if i != own && keep(a, i) {
                        let c = s.add_element();
                        nodes.push(r.child(&node, i));
                        parent.push(Some(x));
                        ids[i] = Some(c);
                        next.push(c);
                    }
                }
                blocks.push((x, ids.clone()));
            }
            for id in 0..sig.num_symbols() {
                for t in local.rel(id) {
                    if let Some(u) = t.iter().map(|e| ids[*e as usize]).collect::<Option<Vec<_>>>() {
                        s.add_tuple(id, u).expect("arity matches");
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    s.close_in_place();
    Unraveling {
        structure: s,
        levels,
        nodes,
        parent,
        blocks,
    }
}

/// Outcome of the tree-likeness checks (i)-(v) on an unraveling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLikeReport {
    pub levels: bool,
    pub witnesses_next_level: bool,
    pub disjoint_blocks: bool,
    pub base_atoms_in_blocks: bool,
    pub dist_from_closure: bool,
}

impl TreeLikeReport {
    pub fn all_hold(&self) -> bool {
        self.levels
            && self.witnesses_next_level
            && self.disjoint_blocks
            && self.base_atoms_in_blocks
            && self.dist_from_closure
    }
}

/// Structural checks: (i) the levels partition the domain and parents sit one
/// level up; (ii) every element below the last level has all its witnesses
/// inside its block; (iii) blocks of one level share no children; (iv) base
/// tuples stay inside a block; (v) the distinguished relations are the
/// closure of their restrictions to blocks.
pub fn tree_like_report(r: &RegularTreeModel, u: &Unraveling) -> TreeLikeReport {
    let s = &u.structure;
    let n = s.size();
    let mut level_of = vec![usize::MAX; n];
    let mut levels = true;
    for (i, l) in u.levels.iter().enumerate() {
        for &e in l {
            if level_of[e as usize] != usize::MAX {
                levels = false;
            }
            level_of[e as usize] = i;
        }
    }
    levels &= level_of.iter().all(|&l| l != usize::MAX);
    if levels {
        for e in 0..n {
            match u.parent[e] {
                None => levels &= level_of[e] == 0,
                Some(p) => levels &= level_of[p as usize] + 1 == level_of[e],
            }
        }
    }
    let block_sets: Vec<Vec<Elem>> = u
        .blocks
        .iter()
        .map(|(_, ms)| {
            let mut v: Vec<Elem> = ms.iter().flatten().copied().collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut witnesses_next_level = true;
    for ((owner, _), set) in u.blocks.iter().zip(&block_sets) {
        let (sub, old) = s.restrict_with_map(set).expect("block in domain");
        let local = old.binary_search(owner).expect("owner in block") as Elem;
        for i in 0..r.nf().m() {
            if crate::semantics::least_witness(&sub, r.nf(), local, i).is_none() {
                witnesses_next_level = false;
            }
        }
    }
    let mut disjoint_blocks = true;
    let mut seen = vec![false; n];
    for (owner, ms) in &u.blocks {
        for &c in ms.iter().flatten() {
            if c != *owner {
                disjoint_blocks &= !seen[c as usize];
                seen[c as usize] = true;
            }
        }
    }
    let mut in_block = std::collections::HashSet::new();
    for set in &block_sets {
        for &a in set {
            for &b in set {
                in_block.insert((a, b));
            }
        }
    }
    let sig = s.sig();
    let mut base_atoms_in_blocks = true;
    for id in 0..sig.num_symbols() {
        if sig.is_dist(id) {
            continue;
        }
        for t in s.rel(id) {
            let ok = t.iter().all(|&a| t.iter().all(|&b| a == b || in_block.contains(&(a, b))));
            if !ok {
                base_atoms_in_blocks = false;
            }
        }
    }
    let mut local = FiniteStructure::pre_closure(sig, n);
    for j in 0..sig.k() {
        let id = sig.dist_id(j);
        for t in s.rel(id) {
            if t[0] == t[1] || in_block.contains(&(t[0], t[1])) {
                local.add_tuple(id, t.clone()).expect("binary");
            }
        }
    }
    local.close_in_place();
    let dist_from_closure = (0..sig.k()).all(|j| {
        let id = sig.dist_id(j);
        local.rel(id) == s.rel(id)
    });
    TreeLikeReport {
        levels,
        witnesses_next_level,
        disjoint_blocks,
        base_atoms_in_blocks,
        dist_from_closure,
    }
}
