//! Grounding of a normal form over a fixed domain size and fixed
//! distinguished relations.

use crate::logic::{Formula, Kind, NormalFormFormula, Signature};
use crate::structures::Elem;

/// Quantifier-free formula with resolved symbols.
#[derive(Debug, Clone)]
pub(crate) enum Q {
    Base(usize, Vec<u32>),
    Dist(usize, u32, u32),
    Eq(u32, u32),
    And(Vec<Q>),
    Or(Vec<Q>),
    Not(Box<Q>),
}

pub(crate) fn compile(f: &Formula, sig: &Signature) -> Q {
    match f.kind() {
        Kind::Atom { sym, args } => {
            let id = sig.id(sym).expect("declared symbol");
            if sig.is_dist(id) {
                Q::Dist(id - sig.base().len(), args[0], args[1])
            } else {
                Q::Base(id, args.clone())
            }
        }
        Kind::Equality(a, b) => Q::Eq(*a, *b),
        Kind::And(cs) => Q::And(cs.iter().map(|c| compile(c, sig)).collect()),
        Kind::Or(cs) => Q::Or(cs.iter().map(|c| compile(c, sig)).collect()),
        Kind::Neg(b) => Q::Not(Box::new(compile(b, sig))),
        Kind::Exists(..) | Kind::UnivNeg(..) => panic!("matrix must be quantifier-free"),
    }
}

/// Ground formula in negation normal form over atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum G {
    Const(bool),
    Lit(usize, bool),
    And(Vec<G>),
    Or(Vec<G>),
}

impl G {
    fn and(cs: Vec<G>) -> G {
        let mut out = Vec::new();
        for c in cs {
            match c {
                G::Const(true) => {}
                G::Const(false) => return G::Const(false),
                G::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => G::Const(true),
            1 => out.pop().unwrap(),
            _ => G::And(out),
        }
    }

    pub(crate) fn or(cs: Vec<G>) -> G {
        let mut out = Vec::new();
        for c in cs {
            match c {
                G::Const(false) => {}
                G::Const(true) => return G::Const(true),
                G::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => G::Const(false),
            1 => out.pop().unwrap(),
            _ => G::Or(out),
        }
    }

    /// Three-valued evaluation; `vals[i]` is `None` while unassigned.
    pub(crate) fn eval(&self, vals: &[Option<bool>]) -> Option<bool> {
        match self {
            G::Const(b) => Some(*b),
            G::Lit(i, pos) => vals[*i].map(|v| v == *pos),
            G::And(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval(vals) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                (!unknown).then_some(true)
            }
            G::Or(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval(vals) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                (!unknown).then_some(false)
            }
        }
    }

    pub(crate) fn atoms(&self, out: &mut Vec<usize>) {
        match self {
            G::Const(_) => {}
            G::Lit(i, _) => out.push(*i),
            G::And(cs) | G::Or(cs) => cs.iter().for_each(|c| c.atoms(out)),
        }
    }
}

/// Atom table: base tuples of a domain of size `n`, ordered by largest
/// element, then symbol, then tuple.
pub(crate) struct Atoms {
    pub n: usize,
    pub list: Vec<(usize, Vec<Elem>)>,
    index: std::collections::HashMap<(usize, Vec<Elem>), usize>,
}

impl Atoms {
    pub fn new(sig: &Signature, n: usize) -> Self {
        let mut list = Vec::new();
        for (id, (_, r)) in sig.base().iter().enumerate() {
            crate::semantics::any_tuple(n, *r, &mut |t| {
                list.push((id, t.to_vec()));
                false
            });
        }
        list.sort_by(|a, b| {
            let ma = a.1.iter().max();
            let mb = b.1.iter().max();
            ma.cmp(&mb).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1))
        });
        let index = list
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Atoms { n, list, index }
    }

    pub fn get(&self, sym: usize, t: &[Elem]) -> usize {
        self.index[&(sym, t.to_vec())]
    }
}

/// Grounds `q` under `asg`; `dist(j,a,b)` decides distinguished atoms.
pub(crate) fn ground(
    q: &Q,
    asg: &[Elem],
    positive: bool,
    atoms: &Atoms,
    dist: &dyn Fn(usize, Elem, Elem) -> bool,
) -> G {
    match q {
        Q::Base(id, args) => {
            let t: Vec<Elem> = args.iter().map(|v| asg[*v as usize]).collect();
            G::Lit(atoms.get(*id, &t), positive)
        }
        Q::Dist(j, a, b) => G::Const(dist(*j, asg[*a as usize], asg[*b as usize]) == positive),
        Q::Eq(a, b) => G::Const((asg[*a as usize] == asg[*b as usize]) == positive),
        Q::And(cs) | Q::Or(cs) => {
            let gs = cs
                .iter()
                .map(|c| ground(c, asg, positive, atoms, dist))
                .collect();
            if matches!(q, Q::And(_)) == positive {
                G::and(gs)
            } else {
                G::or(gs)
            }
        }
        Q::Not(b) => ground(b, asg, !positive, atoms, dist),
    }
}

/// All ground constraints of `nf` at domain size `atoms.n`.
pub(crate) fn constraints(
    nf: &NormalFormFormula,
    atoms: &Atoms,
    dist: &dyn Fn(usize, Elem, Elem) -> bool,
) -> Vec<G> {
    let sig = &nf.signature;
    let n = atoms.n;
    let phi0 = compile(&nf.phi0, sig);
    let mut out = Vec::new();
    crate::semantics::any_tuple(n, nf.t, &mut |t| {
        out.push(ground(&phi0, t, false, atoms, dist));
        false
    });
    for c in &nf.conjuncts {
        let q = compile(&c.matrix, sig);
        for a in 0..n as Elem {
            let mut options = Vec::new();
            let mut buf = vec![a];
            crate::semantics::any_tuple(n, c.witnesses, &mut |w| {
                buf.truncate(1);
                buf.extend_from_slice(w);
                options.push(ground(&q, &buf, true, atoms, dist));
                false
            });
            out.push(G::or(options));
        }
    }
    out
}
