//! Random normal forms and structures for property tests and fuzzing.

use rand::Rng;

use crate::logic::{Conjunct, Formula, NormalFormFormula, Signature, Var};
use crate::semantics::{any_tuple, eval_rec, Assignment};
use crate::structures::{Elem, FiniteStructure};

/// Shape of generated formulas. Unary symbols are `P1..`, binary base
/// symbols `R1..`, distinguished symbols `E1..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub unary: usize,
    pub binary: usize,
    pub k: usize,
    pub t: usize,
    pub max_m: usize,
    pub max_witnesses: usize,
    /// Most literals in one conjunction.
    pub max_lits: usize,
    /// For fitted formulas: require matrices that no element satisfies with
    /// itself as the only witness.
    pub avoid_self_witness: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            unary: 2,
            binary: 1,
            k: 2,
            t: 2,
            max_m: 2,
            max_witnesses: 1,
            max_lits: 3,
            avoid_self_witness: false,
        }
    }
}

impl GenParams {
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for i in 1..=self.unary {
            sig.add_base(&format!("P{i}"), 1).expect("fresh name");
        }
        for i in 1..=self.binary {
            sig.add_base(&format!("R{i}"), 2).expect("fresh name");
        }
        for i in 1..=self.k {
            sig.add_dist(&format!("E{i}")).expect("fresh name");
        }
        sig
    }
}

/// A literal over `vars`: unary atoms of either sign, positive binary atoms
/// and positive equalities (so the result stays in the unary negation
/// fragment).
fn literal<R: Rng>(rng: &mut R, p: &GenParams, vars: &[Var]) -> Formula {
    let pick = |rng: &mut R| vars[rng.random_range(0..vars.len())];
    let binary_kinds = p.binary + p.k + 1;
    let unary_weight = 2 * p.unary;
    let roll = rng.random_range(0..unary_weight + binary_kinds);
    if roll < unary_weight {
        let sym = format!("P{}", roll / 2 + 1);
        let a = Formula::atom(&sym, vec![pick(rng)]);
        return if rng.random_bool(0.5) { Formula::neg(a) } else { a };
    }
    let (x, y) = (pick(rng), pick(rng));
    let r = rng.random_range(0..binary_kinds);
    if r < p.binary {
        Formula::atom(&format!("R{}", r + 1), vec![x, y])
    } else if r < p.binary + p.k {
        Formula::atom(&format!("E{}", r - p.binary + 1), vec![x, y])
    } else {
        Formula::equality(x, y)
    }
}

fn conjunction<R: Rng>(rng: &mut R, p: &GenParams, vars: &[Var]) -> Formula {
    let n = rng.random_range(1..=p.max_lits.max(1));
    Formula::and((0..n).map(|_| literal(rng, p, vars)).collect())
}

fn dnf<R: Rng>(rng: &mut R, p: &GenParams, vars: &[Var]) -> Formula {
    let n = rng.random_range(1..=2);
    Formula::or((0..n).map(|_| conjunction(rng, p, vars)).collect())
}

/// A random normal form with `t` universal variables and up to `max_m`
/// existential conjuncts.
pub fn random_nf<R: Rng>(rng: &mut R, p: &GenParams) -> NormalFormFormula {
    let uvars: Vec<Var> = (0..p.t as Var).collect();
    let phi0 = conjunction(rng, p, &uvars);
    let m = rng.random_range(0..=p.max_m);
    let conjuncts = (0..m)
        .map(|_| {
            let witnesses = rng.random_range(1..=p.max_witnesses.max(1));
            let vars: Vec<Var> = (0..=witnesses as Var).collect();
            Conjunct {
                witnesses,
                matrix: dnf(rng, p, &vars),
            }
        })
        .collect();
    NormalFormFormula {
        t: p.t,
        phi0,
        conjuncts,
        signature: p.signature(),
    }
}

/// A structure of size `n` over `sig` with random equivalences and base
/// tuples present with probability `density`.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    n: usize,
    density: f64,
) -> FiniteStructure {
    let mut s = FiniteStructure::pre_closure(sig, n);
    for id in 0..sig.base().len() {
        let r = sig.arity(id);
        any_tuple(n, r, &mut |t| {
            if rng.random_bool(density) {
                s.add_tuple(id, t.to_vec()).expect("in range");
            }
            false
        });
    }
    for j in 0..sig.k() {
        let id = sig.dist_id(j);
        let mut block: Vec<Elem> = Vec::with_capacity(n);
        for a in 0..n {
            let fresh = block.iter().copied().max().map_or(0, |b| b + 1);
            let b = rng.random_range(0..=fresh);
            block.push(b);
            for (c, &bc) in block.iter().enumerate() {
                if bc == b {
                    s.add_tuple(id, vec![a as Elem, c as Elem]).expect("in range");
                }
            }
        }
    }
    s.close_in_place();
    s
}

/// A random normal form of shape `p` that `s` satisfies, or `None` when
/// `tries` attempts per part do not find one. Matrices that some element
/// satisfies only with a different witness are preferred; with
/// `avoid_self_witness` they are required for every element.
pub fn fitted_nf<R: Rng>(
    rng: &mut R,
    s: &FiniteStructure,
    p: &GenParams,
    tries: usize,
) -> Option<NormalFormFormula> {
    let uvars: Vec<Var> = (0..p.t as Var).collect();
    let phi0 = (0..tries).map(|_| conjunction(rng, p, &uvars)).find(|f| {
        !any_tuple(s.size(), p.t, &mut |t| eval_rec(s, f, &mut Assignment::from_slice(t)))
    })?;
    let m = rng.random_range(1..=p.max_m.max(1));
    let mut conjuncts = Vec::with_capacity(m);
    for _ in 0..m {
        let witnesses = rng.random_range(1..=p.max_witnesses.max(1));
        let vars: Vec<Var> = (0..=witnesses as Var).collect();
        let mut fallback = None;
        let mut chosen = None;
        for _ in 0..tries {
            let matrix = dnf(rng, p, &vars);
            let mut needs_other = false;
            let mut any_self = false;
            let all = s.elements().all(|a| {
                let mut buf = vec![a];
                let mut self_ok = false;
                let found = any_tuple(s.size(), witnesses, &mut |t| {
                    buf.truncate(1);
                    buf.extend_from_slice(t);
                    let ok = eval_rec(s, &matrix, &mut Assignment::from_slice(&buf));
                    if ok && t.iter().all(|&e| e == a) {
                        self_ok = true;
                    }
                    ok
                });
                needs_other |= found && !self_ok;
                any_self |= self_ok;
                found
            });
            if all && (if p.avoid_self_witness { !any_self } else { needs_other }) {
                chosen = Some(matrix);
                break;
            }
            if all && fallback.is_none() && !p.avoid_self_witness {
                fallback = Some(matrix);
            }
        }
        conjuncts.push(Conjunct {
            witnesses,
            matrix: chosen.or(fallback)?,
        });
    }
    Some(NormalFormFormula {
        t: p.t,
        phi0,
        conjuncts,
        signature: s.sig().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_formulas_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = GenParams::default();
        for _ in 0..200 {
            let nf = random_nf(&mut rng, &p);
            nf.validate().unwrap();
            assert!(nf.m() <= 2);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let p = GenParams::default();
        let a = random_nf(&mut ChaCha8Rng::seed_from_u64(3), &p);
        let b = random_nf(&mut ChaCha8Rng::seed_from_u64(3), &p);
        assert_eq!(a, b);
    }

    #[test]
    fn fitted_formulas_hold_in_their_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = GenParams::default();
        let sig = p.signature();
        let mut fitted = 0;
        for n in 1..=4 {
            for _ in 0..20 {
                let s = random_structure(&mut rng, &sig, n, 0.3);
                s.validate_equivalences().unwrap();
                if let Some(nf) = fitted_nf(&mut rng, &s, &p, 200) {
                    nf.validate().unwrap();
                    assert!(crate::semantics::check_model(&s, &nf));
                    fitted += 1;
                }
            }
        }
        assert!(fitted > 40);
    }
}
