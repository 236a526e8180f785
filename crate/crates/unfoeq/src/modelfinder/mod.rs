//! Bounded exhaustive model search, used as the independent oracle for
//! satisfiability claims.
//!
//! Distinguished symbols range over set partitions (or over transitive
//! relations for the transitive-semantics variant); base relations range
//! over all subsets, explored by backtracking over ground atoms with
//! three-valued pruning of the ground constraints.

mod enumerate;
mod ground;

pub use enumerate::{canonical_partitions, partitions, transitive_relations};

use ground::{constraints, Atoms, G};

use crate::logic::NormalFormFormula;
use crate::structures::{Elem, FiniteStructure};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_size: usize,
    /// Maximum number of search nodes (atom assignments) over the whole call.
    pub node_limit: Option<u64>,
    /// Restrict the first distinguished symbol to one partition per
    /// isomorphism class; counts are then not exact.
    pub canonical_only: bool,
}

impl SearchBudget {
    pub fn upto(max_size: usize) -> Self {
        SearchBudget {
            max_size: max_size.max(1),
            node_limit: None,
            canonical_only: false,
        }
    }
}

/// How distinguished symbols are interpreted during search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistSemantics {
    Equivalence,
    /// Arbitrary transitive relations.
    Transitive,
}

type DistRel = Vec<bool>;

struct Solver<'a> {
    nf: &'a NormalFormFormula,
    sem: DistSemantics,
    budget: SearchBudget,
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(nf: &'a NormalFormFormula, sem: DistSemantics, budget: SearchBudget) -> Self {
        Solver {
            nf,
            sem,
            budget,
            nodes: 0,
        }
    }

    fn dist_options(&self, n: usize, first: bool) -> Vec<DistRel> {
        match self.sem {
            DistSemantics::Equivalence => {
                let ps = if first && self.budget.canonical_only {
                    canonical_partitions(n)
                } else {
                    partitions(n)
                };
                ps.iter()
                    .map(|rgs| {
                        let mut r = vec![false; n * n];
                        for a in 0..n {
                            for b in 0..n {
                                r[a * n + b] = rgs[a] == rgs[b];
                            }
                        }
                        r
                    })
                    .collect()
            }
            DistSemantics::Transitive => transitive_relations(n)
                .into_iter()
                .map(|m| (0..n * n).map(|i| m >> i & 1 == 1).collect())
                .collect(),
        }
    }

    /// Visits every model of size `n`; `visit` receives the structure and
    /// the number of models it stands for (unconstrained atoms are free) and
    /// returns `true` to stop.
    fn run(
        &mut self,
        n: usize,
        want_structures: bool,
        visit: &mut dyn FnMut(Option<FiniteStructure>, u128) -> bool,
    ) -> Result<bool> {
        let sig = self.nf.signature.clone();
        let k = sig.k();
        let atoms = Atoms::new(&sig, n);
        let options: Vec<Vec<DistRel>> = (0..k).map(|j| self.dist_options(n, j == 0)).collect();
        let mut choice = vec![0usize; k];
        loop {
            if options.iter().all(|o| !o.is_empty()) {
                let rels: Vec<&DistRel> = (0..k).map(|j| &options[j][choice[j]]).collect();
                if self.solve_fixed(n, &atoms, &rels, want_structures, visit)? {
                    return Ok(true);
                }
            }
            let mut j = k;
            loop {
                if j == 0 {
                    return Ok(false);
                }
                j -= 1;
                choice[j] += 1;
                if choice[j] < options[j].len() {
                    break;
                }
                choice[j] = 0;
            }
        }
    }

    fn solve_fixed(
        &mut self,
        n: usize,
        atoms: &Atoms,
        rels: &[&DistRel],
        want_structures: bool,
        visit: &mut dyn FnMut(Option<FiniteStructure>, u128) -> bool,
    ) -> Result<bool> {
        let dist = |j: usize, a: Elem, b: Elem| rels[j][a as usize * n + b as usize];
        let mut cs = constraints(self.nf, atoms, &dist);
        if cs.contains(&G::Const(false)) {
            return Ok(false);
        }
        cs.retain(|c| *c != G::Const(true));
        let mut watch: Vec<Vec<usize>> = vec![Vec::new(); atoms.list.len()];
        for (ci, c) in cs.iter().enumerate() {
            let mut at = Vec::new();
            c.atoms(&mut at);
            at.sort_unstable();
            at.dedup();
            for a in at {
                watch[a].push(ci);
            }
        }
        let order: Vec<usize> = (0..atoms.list.len()).filter(|a| !watch[*a].is_empty()).collect();
        let free = (atoms.list.len() - order.len()) as u32;
        let weight = 1u128.checked_shl(free).unwrap_or(u128::MAX);
        let mut vals = vec![None; atoms.list.len()];
        let mut ctx = Dfs {
            cs: &cs,
            watch: &watch,
            order: &order,
            vals: &mut vals,
        };
        let mut stop = false;
        let limit = self.budget.node_limit;
        let mut nodes = self.nodes;
        let res = {
            let mut leaf = |vals: &[Option<bool>]| -> bool {
                let s = want_structures.then(|| self.build(n, atoms, rels, vals));
                stop = visit(s, weight);
                stop
            };
            ctx.dfs(0, &mut nodes, limit, &mut leaf)
        };
        self.nodes = nodes;
        res?;
        Ok(stop)
    }

    fn build(&self, n: usize, atoms: &Atoms, rels: &[&DistRel], vals: &[Option<bool>]) -> FiniteStructure {
        let sig = &self.nf.signature;
        let mut s = FiniteStructure::pre_closure(sig, n);
        for (j, r) in rels.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    if r[a * n + b] {
                        s.add_tuple(sig.dist_id(j), vec![a as Elem, b as Elem]).unwrap();
                    }
                }
            }
        }
        for (i, (id, t)) in atoms.list.iter().enumerate() {
            if vals[i] == Some(true) {
                s.add_tuple(*id, t.clone()).unwrap();
            }
        }
        if self.sem == DistSemantics::Equivalence {
            s.close_in_place();
        } else {
            s.mark_pre_closure();
        }
        s
    }
}

struct Dfs<'a> {
    cs: &'a [G],
    watch: &'a [Vec<usize>],
    order: &'a [usize],
    vals: &'a mut Vec<Option<bool>>,
}

impl Dfs<'_> {
    fn dfs(
        &mut self,
        depth: usize,
        nodes: &mut u64,
        limit: Option<u64>,
        leaf: &mut dyn FnMut(&[Option<bool>]) -> bool,
    ) -> Result<bool> {
        if depth == self.order.len() {
            return Ok(leaf(self.vals));
        }
        let a = self.order[depth];
        for v in [false, true] {
            *nodes += 1;
            if limit.is_some_and(|l| *nodes > l) {
                return Err(Error::BudgetExhausted);
            }
            self.vals[a] = Some(v);
            let ok = self.watch[a]
                .iter()
                .all(|&ci| self.cs[ci].eval(self.vals) != Some(false));
            if ok && self.dfs(depth + 1, nodes, limit, leaf)? {
                self.vals[a] = None;
                return Ok(true);
            }
        }
        self.vals[a] = None;
        Ok(false)
    }
}

/// Least model (by size, then search order) of size at most `b.max_size`.
pub fn find_model(nf: &NormalFormFormula, b: SearchBudget) -> Result<Option<FiniteStructure>> {
    find_model_with(nf, b, DistSemantics::Equivalence)
}

pub fn find_model_with(
    nf: &NormalFormFormula,
    b: SearchBudget,
    sem: DistSemantics,
) -> Result<Option<FiniteStructure>> {
    let mut solver = Solver::new(nf, sem, b);
    for n in 1..=b.max_size {
        if let Some(s) = find_in(&mut solver, n)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// First model of exactly `n` elements.
pub fn find_model_of_size(
    nf: &NormalFormFormula,
    n: usize,
    b: SearchBudget,
    sem: DistSemantics,
) -> Result<Option<FiniteStructure>> {
    let mut solver = Solver::new(nf, sem, b);
    find_in(&mut solver, n)
}

fn find_in(solver: &mut Solver, n: usize) -> Result<Option<FiniteStructure>> {
    let mut found = None;
    solver.run(n, true, &mut |s, _| {
        found = s;
        true
    })?;
    Ok(found)
}

/// Number of labelled models with exactly `size` elements.
pub fn count_models(nf: &NormalFormFormula, size: usize) -> Result<u128> {
    count_models_with(nf, size, DistSemantics::Equivalence, SearchBudget::upto(size))
}

pub fn count_models_with(
    nf: &NormalFormFormula,
    size: usize,
    sem: DistSemantics,
    b: SearchBudget,
) -> Result<u128> {
    let mut solver = Solver::new(nf, sem, b);
    let mut total = 0u128;
    solver.run(size, false, &mut |_, w| {
        total += w;
        false
    })?;
    Ok(total)
}

/// Whether a model with at most `size` elements exists.
pub fn is_satisfiable_upto(nf: &NormalFormFormula, size: usize) -> Result<bool> {
    Ok(find_model(nf, SearchBudget::upto(size))?.is_some())
}

/// Every model of exactly `size` elements (desk scale only).
pub fn all_models(
    nf: &NormalFormFormula,
    size: usize,
    sem: DistSemantics,
    b: SearchBudget,
) -> Result<Vec<FiniteStructure>> {
    let mut solver = Solver::new(nf, sem, b);
    let mut out = Vec::new();
    solver.run(size, true, &mut |s, w| {
        if w == 1 {
            out.push(s.expect("structures requested"));
        } else {
            out.extend(expand_free(s.expect("structures requested"), nf));
        }
        false
    })?;
    Ok(out)
}

/// Expands a model found with unconstrained atoms set to false into all
/// models differing only on base tuples not mentioned by any constraint.
fn expand_free(s: FiniteStructure, nf: &NormalFormFormula) -> Vec<FiniteStructure> {
    let sig = nf.signature.clone();
    let atoms = Atoms::new(&sig, s.size());
    let n = s.size();
    let dist = |j: usize, a: Elem, b: Elem| s.eq_holds(j, a, b) || s.holds(sig.dist_id(j), &[a, b]);
    let cs = constraints(nf, &atoms, &dist);
    let mut used = vec![false; atoms.list.len()];
    for c in &cs {
        let mut at = Vec::new();
        c.atoms(&mut at);
        for a in at {
            used[a] = true;
        }
    }
    let free: Vec<usize> = (0..atoms.list.len()).filter(|a| !used[*a]).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << free.len() {
        let mut t = s.clone();
        for (bit, &a) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                let (id, tuple) = &atoms.list[a];
                t.add_tuple(*id, tuple.clone()).unwrap();
            }
        }
        debug_assert_eq!(t.size(), n);
        out.push(t);
    }
    out
}
