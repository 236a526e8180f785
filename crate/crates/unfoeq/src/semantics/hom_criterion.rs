use std::collections::HashMap;

use super::eval::has_witness;
use super::hom::{find_homomorphism, HomConstraint};
use crate::logic::NormalFormFormula;
use crate::structures::{Elem, FiniteStructure};

/// Outcome of the homomorphism criterion for modelhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomCriterionReport {
    /// Elements lacking witnesses, with the 1-based conjunct.
    pub missing_witnesses: Vec<(Elem, usize)>,
    /// First element set (of size at most `t`) with no 1-type-preserving
    /// homomorphism of its induced substructure into the pattern.
    pub failing_tuple: Option<Vec<Elem>>,
    /// Number of distinct element sets examined.
    pub tuples_checked: usize,
}

impl HomCriterionReport {
    pub fn witnesses_ok(&self) -> bool {
        self.missing_witnesses.is_empty()
    }

    pub fn homomorphisms_ok(&self) -> bool {
        self.failing_tuple.is_none()
    }

    pub fn verdict(&self) -> bool {
        self.witnesses_ok() && self.homomorphisms_ok()
    }
}

/// Checks that every element of `cand` has witnesses and that for every tuple
/// of at most `t` elements (repetitions allowed) the induced substructure maps
/// homomorphically, preserving 1-types, into `pattern`. A tuple with
/// repetitions induces the same substructure as its set of entries, so the
/// sets of size `1..=t` are enumerated.
pub fn check_model_by_homomorphisms(
    cand: &FiniteStructure,
    pattern: &FiniteStructure,
    nf: &NormalFormFormula,
) -> HomCriterionReport {
    let mut missing = Vec::new();
    for a in cand.elements() {
        for i in 0..nf.m() {
            if !has_witness(cand, nf, a, i) {
                missing.push((a, i + 1));
            }
        }
    }
    let mut cache: HashMap<FiniteStructure, bool> = HashMap::new();
    let mut checked = 0;
    let mut failing = None;
    let n = cand.size() as Elem;
    let mut set: Vec<Elem> = Vec::new();
    subsets(n, nf.t, 0, &mut set, &mut |s| {
        checked += 1;
        let sub = cand.restrict(s).expect("subset of domain");
        let ok = *cache.entry(sub.clone()).or_insert_with(|| {
            find_homomorphism(&sub, pattern, &HomConstraint::preserving()).is_some()
        });
        if !ok {
            failing = Some(s.to_vec());
        }
        !ok
    });
    HomCriterionReport {
        missing_witnesses: missing,
        failing_tuple: failing,
        tuples_checked: checked,
    }
}

/// Visits strictly increasing sequences of length `1..=max` over `0..n`;
/// stops when `f` returns `true`.
fn subsets(n: Elem, max: usize, from: Elem, cur: &mut Vec<Elem>, f: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
    for a in from..n {
        cur.push(a);
        if f(cur) || (cur.len() < max && subsets(n, max, a + 1, cur, f)) {
            cur.pop();
            return true;
        }
        cur.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Conjunct, Formula, Signature};
    use crate::semantics::check_model;

    fn setup() -> (FiniteStructure, NormalFormFormula) {
        let sig = Signature::new().with_base("P", 1).with_base("R", 2);
        let mut s = FiniteStructure::new(&sig, 2);
        s.add_named("P", vec![0]).unwrap();
        s.add_named("R", vec![0, 1]).unwrap();
        s.add_named("R", vec![1, 0]).unwrap();
        let nf = NormalFormFormula {
            t: 2,
            phi0: Formula::and(vec![
                Formula::atom("P", vec![0]),
                Formula::atom("P", vec![1]),
                Formula::atom("R", vec![0, 1]),
            ]),
            conjuncts: vec![Conjunct {
                witnesses: 1,
                matrix: Formula::atom("R", vec![0, 1]),
            }],
            signature: sig,
        };
        (s, nf)
    }

    #[test]
    fn pattern_against_itself() {
        let (s, nf) = setup();
        assert!(check_model(&s, &nf));
        assert!(check_model_by_homomorphisms(&s, &s, &nf).verdict());
    }

    #[test]
    fn disjoint_copies_pass() {
        let (s, nf) = setup();
        let mut two = s.clone();
        two.import(&s, &[]);
        let rep = check_model_by_homomorphisms(&two, &s, &nf);
        assert!(rep.verdict());
        assert!(check_model(&two, &nf));
    }

    #[test]
    fn missing_witness_is_reported() {
        let (s, nf) = setup();
        let mut broken = s.clone();
        broken.remove_tuple(1, &[1, 0]);
        let rep = check_model_by_homomorphisms(&broken, &s, &nf);
        assert_eq!(rep.missing_witnesses, vec![(1, 1)]);
        assert!(!rep.verdict());
        assert!(!check_model(&broken, &nf));
    }
}
