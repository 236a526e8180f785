use super::formula::{Formula, Kind};
use super::normal_form::{Conjunct, NormalFormFormula};
use super::signature::Signature;

/// Replaces every distinguished atom `E(x,y)` by `E(x,y) & E(y,x)`.
pub fn symmetrize_atoms(f: &Formula, sig: &Signature) -> Formula {
    match f.kind() {
        Kind::Atom { sym, args } if sig.dist_index(sym).is_some() => Formula::and(vec![
            f.clone(),
            Formula::atom(sym, vec![args[1], args[0]]),
        ]),
        Kind::Atom { .. } | Kind::Equality(..) => f.clone(),
        Kind::And(cs) => Formula::and(cs.iter().map(|c| symmetrize_atoms(c, sig)).collect()),
        Kind::Or(cs) => Formula::or(cs.iter().map(|c| symmetrize_atoms(c, sig)).collect()),
        Kind::Exists(vs, b) => Formula::exists(vs.clone(), symmetrize_atoms(b, sig)),
        Kind::Neg(b) => Formula::neg(symmetrize_atoms(b, sig)),
        Kind::UnivNeg(vs, b) => Formula::univ_neg(vs.clone(), symmetrize_atoms(b, sig)),
    }
}

/// Reduction to transitive semantics: distinguished atoms are symmetrized and
/// `forall x . E(x,x)` is appended for every distinguished `E`. The result is
/// read with the distinguished symbols interpreted as transitive relations.
pub fn reduce_to_transitive(nf: &NormalFormFormula) -> Formula {
    let (f, _) = nf.to_formula();
    let sig = &nf.signature;
    let mut parts = vec![symmetrize_atoms(&f, sig)];
    for e in sig.dist() {
        parts.push(Formula::univ_neg(
            vec![0],
            Formula::neg(Formula::atom(e, vec![0, 0])),
        ));
    }
    Formula::and(parts)
}

/// The same reduction kept in normal-form shape: reflexivity is folded into
/// the universal conjunct as `~E(x1,x1)` disjuncts.
pub fn reduce_to_transitive_nf(nf: &NormalFormFormula) -> NormalFormFormula {
    let sig = &nf.signature;
    let mut phi0 = vec![symmetrize_atoms(&nf.phi0, sig)];
    for e in sig.dist() {
        phi0.push(Formula::neg(Formula::atom(e, vec![0, 0])));
    }
    NormalFormFormula {
        t: nf.t,
        phi0: Formula::or(phi0),
        conjuncts: nf
            .conjuncts
            .iter()
            .map(|c| Conjunct {
                witnesses: c.witnesses,
                matrix: symmetrize_atoms(&c.matrix, sig),
            })
            .collect(),
        signature: nf.signature.clone(),
    }
}
