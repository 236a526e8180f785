use crate::logic::{Formula, Kind, NormalFormFormula, Var};
use std::collections::HashMap;

use crate::structures::{Elem, FiniteStructure, PairKey, TypeIndex, TypeInterner};
use crate::{Error, Result};

/// Partial map from variables to elements, indexed by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(Vec<Option<Elem>>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `vals[i]` to variable `i`.
    pub fn from_slice(vals: &[Elem]) -> Self {
        Assignment(vals.iter().map(|e| Some(*e)).collect())
    }

    pub fn get(&self, v: Var) -> Option<Elem> {
        self.0.get(v as usize).copied().flatten()
    }

    pub fn set(&mut self, v: Var, e: Option<Elem>) {
        let i = v as usize;
        if self.0.len() <= i {
            self.0.resize(i + 1, None);
        }
        self.0[i] = e;
    }
}

/// Truth of `f` in `s` under `asg`, which must cover the free variables.
pub fn evaluate(s: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool> {
    if let Some(v) = f.free_vars().iter().find(|v| asg.get(**v).is_none()) {
        return Err(Error::Unassigned(format!("v{v}")));
    }
    for sym in f.symbols() {
        if s.sig().id(&sym).is_none() {
            return Err(Error::UndeclaredSymbol(sym));
        }
    }
    let mut a = asg.clone();
    Ok(eval_rec(s, f, &mut a))
}

pub(crate) fn eval_rec(s: &FiniteStructure, f: &Formula, asg: &mut Assignment) -> bool {
    match f.kind() {
        Kind::Atom { sym, args } => {
            let id = s.sig().id(sym).expect("declared symbol");
            let t: Vec<Elem> = args.iter().map(|v| asg.get(*v).expect("assigned")).collect();
            s.holds(id, &t)
        }
        Kind::Equality(a, b) => asg.get(*a) == asg.get(*b),
        Kind::And(cs) => cs.iter().all(|c| eval_rec(s, c, asg)),
        Kind::Or(cs) => cs.iter().any(|c| eval_rec(s, c, asg)),
        Kind::Neg(b) => !eval_rec(s, b, asg),
        Kind::Exists(vs, b) => exists_rec(s, vs, b, asg),
        Kind::UnivNeg(vs, b) => !exists_rec(s, vs, b, asg),
    }
}

fn exists_rec(s: &FiniteStructure, vs: &[Var], body: &Formula, asg: &mut Assignment) -> bool {
    let Some((&v, rest)) = vs.split_first() else {
        return eval_rec(s, body, asg);
    };
    let saved = asg.get(v);
    let mut found = false;
    for e in s.elements() {
        asg.set(v, Some(e));
        if exists_rec(s, rest, body, asg) {
            found = true;
            break;
        }
    }
    asg.set(v, saved);
    found
}

/// Calls `f` on every tuple of length `len` over `0..n` in lexicographic
/// order until it returns `true`; reports whether it did.
pub fn any_tuple(n: usize, len: usize, f: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
    if len == 0 {
        return f(&[]);
    }
    if n == 0 {
        return false;
    }
    let mut t = vec![0 as Elem; len];
    loop {
        if f(&t) {
            return true;
        }
        let mut i = len;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            t[i] += 1;
            if (t[i] as usize) < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// First `t`-tuple satisfying `phi0`, if any.
pub fn universal_violation(s: &FiniteStructure, nf: &NormalFormFormula) -> Option<Vec<Elem>> {
    let mut bad = None;
    any_tuple(s.size(), nf.t, &mut |t| {
        if eval_rec(s, &nf.phi0, &mut Assignment::from_slice(t)) {
            bad = Some(t.to_vec());
            true
        } else {
            false
        }
    });
    bad
}

/// Whether `a` has witnesses for conjunct `i` (0-based).
pub fn has_witness(s: &FiniteStructure, nf: &NormalFormFormula, a: Elem, i: usize) -> bool {
    least_witness(s, nf, a, i).is_some()
}

/// Lexicographically least witness tuple for `a` and conjunct `i` (0-based).
pub fn least_witness(
    s: &FiniteStructure,
    nf: &NormalFormFormula,
    a: Elem,
    i: usize,
) -> Option<Vec<Elem>> {
    let c = &nf.conjuncts[i];
    let mut found = None;
    let mut buf = vec![a];
    any_tuple(s.size(), c.witnesses, &mut |t| {
        buf.truncate(1);
        buf.extend_from_slice(t);
        if eval_rec(s, &c.matrix, &mut Assignment::from_slice(&buf)) {
            found = Some(t.to_vec());
            true
        } else {
            false
        }
    });
    found
}

/// Direct evaluation of a normal form: the universal conjunct over all
/// `t`-tuples and each existential conjunct at every element.
pub fn check_model(s: &FiniteStructure, nf: &NormalFormFormula) -> bool {
    model_failure(s, nf).is_none()
}

/// Human-readable reason why `s` is not a model, if it is not.
pub fn model_failure(s: &FiniteStructure, nf: &NormalFormFormula) -> Option<String> {
    if s.size() == 0 {
        return Some("empty domain".into());
    }
    if let Err(e) = s.validate_equivalences() {
        return Some(e.to_string());
    }
    if s.size() > 32 && nf.t <= 2 && nf.max_witnesses() <= 1 && s.sig().max_arity() <= 2 {
        return typed_failure(s, nf);
    }
    if let Some(t) = universal_violation(s, nf) {
        return Some(format!("universal conjunct fails at {t:?}"));
    }
    for a in s.elements() {
        for i in 0..nf.m() {
            if !has_witness(s, nf, a, i) {
                return Some(format!("element {a} lacks witnesses for conjunct {}", i + 1));
            }
        }
    }
    None
}

/// The same checks for two-variable normal forms, evaluating each matrix
/// once per realized atomic type.
fn typed_failure(s: &FiniteStructure, nf: &NormalFormFormula) -> Option<String> {
    let mut interner = TypeInterner::default();
    let idx = TypeIndex::new(s, &mut interner).ok()?;
    let holds = |f: &Formula, t: &[Elem]| eval_rec(s, f, &mut Assignment::from_slice(t));
    let mut on_one: HashMap<(usize, u32), bool> = HashMap::new();
    let mut on_two: HashMap<(usize, PairKey), bool> = HashMap::new();
    // Formula slot 0 is phi0, slot i+1 the matrix of conjunct i.
    let mut one = |slot: usize, f: &Formula, a: Elem| {
        *on_one
            .entry((slot, idx.t1[a as usize]))
            .or_insert_with(|| holds(f, &vec![a; if slot == 0 { nf.t } else { 2 }]))
    };
    for a in s.elements() {
        if one(0, &nf.phi0, a) {
            return Some(format!("universal conjunct fails at {:?}", vec![a; nf.t]));
        }
    }
    let mut bad = None;
    for a in s.elements() {
        let mut missing: Vec<usize> = Vec::new();
        for (i, c) in nf.conjuncts.iter().enumerate() {
            let ok = if c.witnesses == 0 {
                holds(&c.matrix, &[a])
            } else {
                one(i + 1, &c.matrix, a)
            };
            if !ok {
                missing.push(i);
            }
        }
        if nf.t < 2 && missing.is_empty() {
            continue;
        }
        idx.scan_row(a, &mut |b, key| {
            if nf.t == 2 {
                let v = *on_two
                    .entry((0, key))
                    .or_insert_with(|| holds(&nf.phi0, &[a, b]));
                if v {
                    bad = Some(format!("universal conjunct fails at {:?}", [a, b]));
                    return true;
                }
            }
            missing.retain(|&i| {
                !*on_two
                    .entry((i + 1, key))
                    .or_insert_with(|| holds(&nf.conjuncts[i].matrix, &[a, b]))
            });
            nf.t < 2 && missing.is_empty()
        });
        if bad.is_some() {
            return bad;
        }
        if let Some(i) = missing.first() {
            return Some(format!("element {a} lacks witnesses for conjunct {}", i + 1));
        }
    }
    None
}

/// Same as [`check_model`] but distinguished relations are only required to
/// be transitive (used with the reduction to transitive semantics).
pub fn check_model_transitive(s: &FiniteStructure, nf: &NormalFormFormula) -> bool {
    s.size() > 0
        && universal_violation(s, nf).is_none()
        && s.elements()
            .all(|a| (0..nf.m()).all(|i| has_witness(s, nf, a, i)))
}
