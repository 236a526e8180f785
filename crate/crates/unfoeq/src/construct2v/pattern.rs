//! A pattern model prepared for the construction: generalized types,
//! interned 1-types and per-element witness lists.

use std::collections::HashMap;
use std::rc::Rc;

use crate::logic::{NormalFormFormula, Signature};
use crate::semantics::{eval_rec, Assignment};
use super::component::PatternComponent;
use crate::structures::{Elem, FiniteStructure, GeneralizedType, TypeIndex, TypeInterner};
use crate::{Error, Result};

/// A constructed structure with its map into the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Built {
    pub structure: FiniteStructure,
    pub pmap: Vec<Elem>,
}

/// Finite pattern model of a two-variable normal form.
#[derive(Debug)]
pub struct Pattern {
    pub(crate) s: FiniteStructure,
    pub(crate) nf: NormalFormFormula,
    pub(crate) interner: TypeInterner,
    pub(crate) index: TypeIndex,
    /// Distinct generalized types, in order of first realization.
    pub(crate) gtypes: Vec<GeneralizedType>,
    pub(crate) gt_of: Vec<usize>,
    /// `f_ids[g][mask]`: sorted interned 1-types of `gtypes[g].f[mask]`.
    pub(crate) f_ids: Vec<Vec<Vec<u32>>>,
    /// `witnesses[a][j]`: elements `w` with the matrix of conjunct `j` true
    /// at `(a, w)`; `None` for conjuncts without a witness variable.
    pub(crate) witnesses: Vec<Vec<Option<Vec<Elem>>>>,
    pub(crate) memo: HashMap<(Elem, u32), Rc<Built>>,
    pub(crate) fake: Option<Box<Pattern>>,
    /// Components built so far with their `eqs0`, when recording.
    pub(crate) log: Option<Vec<(u32, PatternComponent)>>,
}

impl Pattern {
    /// Checks that `nf` is two-variable, that `s` has arity at most 2 and
    /// valid equivalences, and that `s` is a model of `nf`.
    pub fn new(s: &FiniteStructure, nf: &NormalFormFormula) -> Result<Self> {
        nf.validate()?;
        if nf.t > 2 || nf.conjuncts.iter().any(|c| c.witnesses > 1) {
            return Err(Error::Fragment(
                "the two-variable construction needs t <= 2 and one witness per conjunct".into(),
            ));
        }
        if s.sig().max_arity() > 2 {
            return Err(Error::Invalid("pattern uses a symbol of arity above 2".into()));
        }
        for name in nf.signature.base().iter().map(|(n, _)| n).chain(nf.signature.dist()) {
            if s.sig().id(name).is_none() {
                return Err(Error::UndeclaredSymbol(name.clone()));
            }
        }
        s.validate_equivalences()?;
        if let Some(why) = crate::semantics::model_failure(s, nf) {
            return Err(Error::Invalid(format!("pattern is not a model: {why}")));
        }
        Self::prepare(s.clone(), nf.clone())
    }

    fn prepare(s: FiniteStructure, nf: NormalFormFormula) -> Result<Self> {
        let mut interner = TypeInterner::default();
        let index = TypeIndex::new(&s, &mut interner)?;
        let mut gtypes: Vec<GeneralizedType> = Vec::new();
        let mut gt_of = Vec::with_capacity(s.size());
        for a in s.elements() {
            let g = s.generalized_type(a);
            let id = match gtypes.iter().position(|h| *h == g) {
                Some(i) => i,
                None => {
                    gtypes.push(g);
                    gtypes.len() - 1
                }
            };
            gt_of.push(id);
        }
        let f_ids = gtypes
            .iter()
            .map(|g| {
                g.f.iter()
                    .map(|set| {
                        let mut v: Vec<u32> = set.iter().map(|t| interner.id(t)).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        let mut witnesses = Vec::with_capacity(s.size());
        for a in s.elements() {
            let mut row = Vec::with_capacity(nf.m());
            for c in &nf.conjuncts {
                if c.witnesses == 0 {
                    row.push(None);
                    continue;
                }
                let ws = s
                    .elements()
                    .filter(|&w| eval_rec(&s, &c.matrix, &mut Assignment::from_slice(&[a, w])))
                    .collect();
                row.push(Some(ws));
            }
            witnesses.push(row);
        }
        Ok(Pattern {
            s,
            nf,
            interner,
            index,
            gtypes,
            gt_of,
            f_ids,
            witnesses,
            memo: HashMap::new(),
            fake: None,
            log: None,
        })
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.s
    }

    pub fn nf(&self) -> &NormalFormFormula {
        &self.nf
    }

    pub fn k(&self) -> usize {
        self.s.sig().k()
    }

    /// Mask of all distinguished symbols.
    pub fn all_mask(&self) -> u32 {
        ((1u64 << self.k()) - 1) as u32
    }

    /// Number of realized generalized types.
    pub fn num_gtypes(&self) -> usize {
        self.gtypes.len()
    }

    pub fn gtype(&self, a: Elem) -> &GeneralizedType {
        &self.gtypes[self.gt_of[a as usize]]
    }

    pub fn gtype_id(&self, a: Elem) -> usize {
        self.gt_of[a as usize]
    }

    /// The class of `a0` under every distinguished symbol outside `eqs0`.
    pub fn class_of(&self, a0: Elem, eqs0: u32) -> Vec<Elem> {
        self.s.eq_class(a0, self.all_mask() & !eqs0)
    }

    /// Witnesses for conjunct `j` of `a` that lie in `within`.
    pub(crate) fn witnesses_in(&self, a: Elem, j: usize, within: &[bool]) -> Option<Vec<Elem>> {
        self.witnesses[a as usize][j]
            .as_ref()
            .map(|ws| ws.iter().copied().filter(|w| within[*w as usize]).collect())
    }

    /// Keeps every component built from now on (including those of the
    /// fake extension) for [`audit`](Self::audit).
    pub fn record_components(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    /// Checks b1-b6 on every memoized intermediate structure and c1-c7 on
    /// every recorded component, here and in the fake extension. Labels
    /// name the level: `b0 a0=.. eqs=..` or `component root=.. eqs=..`, with
    /// a `fake ` prefix inside the extension.
    pub fn audit(&self) -> Result<Vec<(String, super::ConditionReport)>> {
        let mut out = Vec::new();
        let mut keys: Vec<&(Elem, u32)> = self.memo.keys().collect();
        keys.sort();
        for &(a0, eqs0) in keys {
            let b = &self.memo[&(a0, eqs0)];
            let r = self.verify_b_conditions(&b.structure, &b.pmap, a0, eqs0)?;
            out.push((format!("b0 a0={a0} eqs={eqs0:#b}"), r));
        }
        for (eqs0, pc) in self.log.iter().flatten() {
            let r = self.verify_c_conditions(pc, *eqs0)?;
            out.push((format!("component root={} eqs={eqs0:#b}", pc.pmap[pc.root as usize]), r));
        }
        if let Some(f) = &self.fake {
            for (label, r) in f.audit()? {
                out.push((format!("fake {label}"), r));
            }
        }
        Ok(out)
    }

    /// The same pattern with an extra distinguished symbol interpreted as
    /// the identity.
    pub(crate) fn fake_extension(&mut self) -> Result<&mut Pattern> {
        if self.fake.is_none() {
            let sig = self.s.sig();
            let mut n = sig.k() + 1;
            let name = loop {
                let cand = format!("_fake{n}");
                if sig.id(&cand).is_none() {
                    break cand;
                }
                n += 1;
            };
            let ext: Signature = sig.clone().with_dist(&name);
            let mut s = self.s.reinterpret(&ext)?;
            s.close_in_place();
            let mut ext = Self::prepare(s, self.nf.clone())?;
            if self.log.is_some() {
                ext.record_components();
            }
            self.fake = Some(Box::new(ext));
        }
        Ok(self.fake.as_mut().expect("just set"))
    }
}

pub(crate) fn membership(n: usize, set: &[Elem]) -> Vec<bool> {
    let mut v = vec![false; n];
    for &e in set {
        v[e as usize] = true;
    }
    v
}
