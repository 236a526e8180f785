use super::eval::least_witness;
use crate::logic::NormalFormFormula;
use crate::structures::{Elem, FiniteStructure};

/// A witness structure for `owner`: the induced substructure on the owner
/// and its chosen witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStructure {
    pub owner: Elem,
    /// 1-based conjunct index, or `None` for the union over all conjuncts.
    pub conjunct: Option<usize>,
    /// Chosen witness tuple for a single conjunct (empty for the union).
    pub witnesses: Vec<Elem>,
    /// Sorted member ids in the parent structure.
    pub members: Vec<Elem>,
    /// `parent` restricted to `members`; local id `i` is `members[i]`.
    pub structure: FiniteStructure,
}

impl WitnessStructure {
    /// Local id of a parent element.
    pub fn local(&self, e: Elem) -> Option<Elem> {
        self.members.binary_search(&e).ok().map(|i| i as Elem)
    }
}

/// Witnesses for `a` and conjunct `i` (1-based); the lexicographically least
/// tuple is chosen.
pub fn find_witnesses(
    s: &FiniteStructure,
    nf: &NormalFormFormula,
    a: Elem,
    i: usize,
) -> Option<WitnessStructure> {
    assert!(i >= 1 && i <= nf.m(), "conjunct index out of range");
    let w = least_witness(s, nf, a, i - 1)?;
    let mut members = w.clone();
    members.push(a);
    members.sort_unstable();
    members.dedup();
    let structure = s.restrict(&members).expect("members in domain");
    Some(WitnessStructure {
        owner: a,
        conjunct: Some(i),
        witnesses: w,
        members,
        structure,
    })
}

/// Union of the per-conjunct witness structures of `a`; absent when some
/// conjunct has no witnesses. With `m = 0` it is the singleton on `a`.
pub fn phi_witness_structure(
    s: &FiniteStructure,
    nf: &NormalFormFormula,
    a: Elem,
) -> Option<WitnessStructure> {
    let mut members = vec![a];
    for i in 1..=nf.m() {
        members.extend(find_witnesses(s, nf, a, i)?.members);
    }
    members.sort_unstable();
    members.dedup();
    let structure = s.restrict(&members).expect("members in domain");
    Some(WitnessStructure {
        owner: a,
        conjunct: None,
        witnesses: Vec::new(),
        members,
        structure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Conjunct, Formula, Signature};

    fn nf(sig: &Signature, matrices: Vec<Formula>) -> NormalFormFormula {
        NormalFormFormula {
            t: 1,
            phi0: Formula::falsity(),
            conjuncts: matrices
                .into_iter()
                .map(|matrix| Conjunct { witnesses: 1, matrix })
                .collect(),
            signature: sig.clone(),
        }
    }

    #[test]
    fn reflexive_witness_is_the_owner() {
        let sig = Signature::new().with_dist("E1");
        let s = FiniteStructure::new(&sig, 3);
        let n = nf(&sig, vec![Formula::atom("E1", vec![0, 1])]);
        let w = find_witnesses(&s, &n, 2, 1).unwrap();
        assert_eq!(w.witnesses, vec![2]);
        assert_eq!(w.members, vec![2]);
    }

    #[test]
    fn only_qualifying_element_is_chosen() {
        let sig = Signature::new().with_base("P", 1).with_base("R", 2);
        let mut s = FiniteStructure::new(&sig, 3);
        for b in 0..3 {
            s.add_named("R", vec![0, b]).unwrap();
        }
        s.add_named("P", vec![0]).unwrap();
        s.add_named("P", vec![1]).unwrap();
        let m = Formula::and(vec![
            Formula::atom("R", vec![0, 1]),
            Formula::neg(Formula::atom("P", vec![1])),
        ]);
        let n = nf(&sig, vec![m]);
        let w = find_witnesses(&s, &n, 0, 1).unwrap();
        assert_eq!(w.members, vec![0, 2]);
        assert_eq!(find_witnesses(&s, &n, 0, 1), Some(w));
        assert!(find_witnesses(&s, &n, 1, 1).is_none());
    }

    #[test]
    fn union_and_absence() {
        let sig = Signature::new().with_base("P", 1).with_base("R", 2);
        let mut s = FiniteStructure::new(&sig, 3);
        s.add_named("R", vec![0, 1]).unwrap();
        s.add_named("R", vec![0, 2]).unwrap();
        s.add_named("P", vec![2]).unwrap();
        let n = nf(
            &sig,
            vec![
                Formula::atom("R", vec![0, 1]),
                Formula::and(vec![Formula::atom("R", vec![0, 1]), Formula::atom("P", vec![1])]),
            ],
        );
        let w = phi_witness_structure(&s, &n, 0).unwrap();
        assert_eq!(w.members, vec![0, 1, 2]);
        assert_eq!(w.structure.size(), 3);
        assert!(phi_witness_structure(&s, &n, 1).is_none());
        let single = FiniteStructure::new(&sig, 1);
        let empty = nf(&sig, vec![]);
        assert_eq!(phi_witness_structure(&single, &empty, 0).unwrap().members, vec![0]);
    }
}
