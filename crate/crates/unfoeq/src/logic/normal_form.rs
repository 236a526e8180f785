use std::collections::HashMap;

use super::formula::{Formula, Kind, Var, VarNames};
use super::fragment::validate_fragment;
use super::signature::Signature;
use crate::{Error, Result};

/// One `forall x exists y1..yl . matrix` conjunct. The head variable is 0 and
/// the witness variables are `1..=l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct {
    pub witnesses: usize,
    pub matrix: Formula,
}

impl Conjunct {
    pub fn head_var(&self) -> Var {
        0
    }

    pub fn witness_vars(&self) -> Vec<Var> {
        (1..=self.witnesses as Var).collect()
    }
}

/// `forall x1..xt ~phi0 & AND_i forall x exists ybar . phi_i`, with `phi0`
/// over variables `0..t` and all matrices quantifier-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormFormula {
    pub t: usize,
    pub phi0: Formula,
    pub conjuncts: Vec<Conjunct>,
    pub signature: Signature,
}

impl NormalFormFormula {
    pub fn m(&self) -> usize {
        self.conjuncts.len()
    }

    /// Largest number of witness variables in a conjunct.
    pub fn max_witnesses(&self) -> usize {
        self.conjuncts.iter().map(|c| c.witnesses).max().unwrap_or(0)
    }

    /// Checks the shape invariants.
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Invalid("normal form needs t >= 1".into()));
        }
        let check = |f: &Formula, bound: usize, what: &str| -> Result<()> {
            if !f.is_quantifier_free() {
                return Err(Error::Invalid(format!("{what} is not quantifier-free")));
            }
            if f.free_vars().iter().any(|v| *v as usize >= bound) {
                return Err(Error::Invalid(format!("{what} uses an unbound variable")));
            }
            let mut bad = None;
            f.visit(&mut |g| {
                if let Kind::Atom { sym, args } = g.kind() {
                    match self.signature.arity_of(sym) {
                        None => bad = Some(Error::UndeclaredSymbol(sym.clone())),
                        Some(a) if a != args.len() => {
                            bad = Some(Error::Arity {
                                sym: sym.clone(),
                                expected: a,
                                found: args.len(),
                            })
                        }
                        _ => {}
                    }
                }
            });
            bad.map_or(Ok(()), Err)
        };
        check(&self.phi0, self.t, "phi0")?;
        for (i, c) in self.conjuncts.iter().enumerate() {
            check(&c.matrix, c.witnesses + 1, &format!("conjunct {}", i + 1))?;
        }
        let rep = validate_fragment(&self.to_formula().0, &self.signature);
        if !(rep.is_unfo || rep.is_bgnfo1_eq) {
            return Err(Error::Fragment(format!("{:?}", rep.violations)));
        }
        Ok(())
    }

    /// The sentence denoted by this normal form, with printable names.
    /// Universal variables get ids `0..t`; conjunct variables start at `t`.
    pub fn to_formula(&self) -> (Formula, VarNames) {
        let t = self.t as Var;
        let mut names = VarNames::universal(self.t);
        names.0.extend(VarNames::conjunct(self.max_witnesses()).0);
        let mut parts = vec![Formula::univ_neg((0..t).collect(), self.phi0.clone())];
        for c in &self.conjuncts {
            let m = c.matrix.rename(&|v| v + t);
            let inner = Formula::exists((1..=c.witnesses as Var).map(|v| v + t).collect(), m);
            parts.push(Formula::neg(Formula::exists(vec![t], Formula::neg(inner))));
        }
        (Formula::and(parts), names)
    }

    pub fn pretty(&self) -> String {
        let (f, names) = self.to_formula();
        f.pretty(&names)
    }

    /// Names of the fresh symbols introduced by normalization, if any.
    pub fn fresh_symbols(&self) -> Vec<String> {
        self.signature
            .base()
            .iter()
            .filter(|(n, _)| n.starts_with("_nf"))
            .map(|(n, _)| n.clone())
            .collect()
    }
}

struct Normalizer {
    sig: Signature,
    next_var: Var,
    next_fresh: usize,
    univ: Vec<(Vec<Var>, Formula)>,
    conj: Vec<(Var, Vec<Var>, Formula)>,
}

type Env = HashMap<Var, Var>;

/// Scott-style normalization. Positive quantifier blocks are moved to the
/// front of their conjunct; every quantifier block occurring inside a negated
/// formula is replaced by an atom over a fresh unary symbol `_nfN` (numbered
/// in pre-order, left to right) and axiomatized in both directions.
pub fn to_normal_form(f: &Formula, sig: &Signature) -> Result<(NormalFormFormula, Signature)> {
    let rep = validate_fragment(f, sig);
    if !(rep.is_unfo || rep.is_bgnfo1_eq) {
        let why = rep
            .violations
            .first()
            .map(|(p, r)| format!("{r} at {p}"))
            .unwrap_or_default();
        return Err(Error::Fragment(why));
    }
    if !f.is_sentence() {
        return Err(Error::Fragment("formula has free variables".into()));
    }
    let mut n = Normalizer {
        sig: sig.clone(),
        next_var: f.all_vars().last().map_or(0, |v| v + 1),
        next_fresh: 0,
        univ: Vec::new(),
        conj: Vec::new(),
    };
    n.top(f)?;
    let t = n.univ.iter().map(|(vs, _)| vs.len()).max().unwrap_or(1).max(1);
    let phi0 = if n.univ.is_empty() {
        Formula::falsity()
    } else {
        Formula::or(
            n.univ
                .iter()
                .map(|(vs, m)| m.rename(&|v| canon(vs, None, v)))
                .collect(),
        )
    };
    let conjuncts = n
        .conj
        .iter()
        .map(|(h, ws, m)| Conjunct {
            witnesses: ws.len(),
            matrix: m.rename(&|v| canon(ws, Some(*h), v)),
        })
        .collect();
    let nf = NormalFormFormula {
        t,
        phi0,
        conjuncts,
        signature: n.sig.clone(),
    };
    Ok((nf, n.sig))
}

fn canon(vs: &[Var], head: Option<Var>, v: Var) -> Var {
    let off = head.is_some() as Var;
    if head == Some(v) {
        return 0;
    }
    vs.iter()
        .position(|w| *w == v)
        .map(|i| i as Var + off)
        .expect("variable bound in its conjunct")
}

impl Normalizer {
    fn fresh_var(&mut self) -> Var {
        self.next_var += 1;
        self.next_var - 1
    }

    fn fresh_symbol(&mut self) -> String {
        loop {
            let name = format!("_nf{}", self.next_fresh);
            self.next_fresh += 1;
            if self.sig.id(&name).is_none() {
                self.sig.add_base(&name, 1).expect("fresh unary symbol");
                return name;
            }
        }
    }

    fn top(&mut self, f: &Formula) -> Result<()> {
        match f.kind() {
            Kind::And(cs) if !cs.is_empty() => {
                for c in cs {
                    self.top(c)?;
                }
                Ok(())
            }
            Kind::UnivNeg(vs, body) => {
                let b = Formula::exists(vs.clone(), (**body).clone());
                self.universal(&b)
            }
            Kind::Neg(body) => {
                if let Kind::Exists(xs, inner) = body.kind() {
                    if let (1, Kind::Neg(g)) = (xs.len(), inner.kind()) {
                        if let Kind::Exists(..) = g.kind() {
                            return self.forall_exists(xs[0], g);
                        }
                    }
                }
                self.universal(body)
            }
            _ => {
                let anchor = self.fresh_var();
                let (pulled, m) = self.positive(f, &Env::new(), anchor)?;
                self.conj.push((anchor, pulled, m));
                Ok(())
            }
        }
    }

    /// `forall x . exists ybar . g`, already of the conjunct shape.
    fn forall_exists(&mut self, x: Var, g: &Formula) -> Result<()> {
        let head = self.fresh_var();
        let env: Env = [(x, head)].into_iter().collect();
        let (pulled, m) = self.positive(g, &env, head)?;
        self.conj.push((head, pulled, m));
        Ok(())
    }

    /// Adds `forall ... ~body` to the universal part.
    fn universal(&mut self, body: &Formula) -> Result<()> {
        let anchor = self.fresh_var();
        let (mut pulled, m) = self.positive(body, &Env::new(), anchor)?;
        if pulled.is_empty() || m.free_vars().contains(&anchor) {
            pulled.push(anchor);
        }
        self.univ.push((pulled, m));
        Ok(())
    }

    /// Prenexes positive existential blocks; returns the pulled variables and
    /// the quantifier-free matrix.
    fn positive(&mut self, f: &Formula, env: &Env, anchor: Var) -> Result<(Vec<Var>, Formula)> {
        match f.kind() {
            Kind::Atom { .. } | Kind::Equality(..) => Ok((vec![], rename(f, env))),
            Kind::And(cs) | Kind::Or(cs) => {
                let mut pulled = Vec::new();
                let mut ms = Vec::new();
                for c in cs {
                    let (p, m) = self.positive(c, env, anchor)?;
                    pulled.extend(p);
                    ms.push(m);
                }
                let m = if matches!(f.kind(), Kind::And(_)) {
                    Formula::and(ms)
                } else {
                    Formula::or(ms)
                };
                Ok((pulled, m))
            }
            Kind::Exists(vs, b) => {
                let mut env2 = env.clone();
                let mut pulled = Vec::new();
                for v in vs {
                    let w = self.fresh_var();
                    env2.insert(*v, w);
                    pulled.push(w);
                }
                let (p, m) = self.positive(b, &env2, anchor)?;
                pulled.extend(p);
                Ok((pulled, m))
            }
            Kind::Neg(b) => Ok((vec![], Formula::neg(self.under_neg(b, env, anchor)?))),
            Kind::UnivNeg(vs, b) => {
                let e = Formula::exists(vs.clone(), (**b).clone());
                Ok((vec![], Formula::neg(self.under_neg(&e, env, anchor)?)))
            }
        }
    }

    /// Makes a negated formula quantifier-free by naming its outermost blocks.
    fn under_neg(&mut self, f: &Formula, env: &Env, anchor: Var) -> Result<Formula> {
        match f.kind() {
            Kind::Atom { .. } | Kind::Equality(..) => Ok(rename(f, env)),
            Kind::And(cs) | Kind::Or(cs) => {
                let ms = cs
                    .iter()
                    .map(|c| self.under_neg(c, env, anchor))
                    .collect::<Result<Vec<_>>>()?;
                Ok(if matches!(f.kind(), Kind::And(_)) {
                    Formula::and(ms)
                } else {
                    Formula::or(ms)
                })
            }
            Kind::Neg(b) => Ok(Formula::neg(self.under_neg(b, env, anchor)?)),
            Kind::UnivNeg(vs, b) => {
                let e = Formula::exists(vs.clone(), (**b).clone());
                Ok(Formula::neg(self.name_block(&e, env, anchor)?))
            }
            Kind::Exists(..) => self.name_block(f, env, anchor),
        }
    }

    fn name_block(&mut self, block: &Formula, env: &Env, anchor: Var) -> Result<Formula> {
        let free: Vec<Var> = block.free_vars().iter().map(|v| env[v]).collect();
        if free.len() > 1 {
            return Err(Error::Fragment(
                "quantifier block under a negation leaves more than one variable free".into(),
            ));
        }
        let v = free.first().copied().unwrap_or(anchor);
        let sym = self.fresh_symbol();
        let (pulled, m) = self.positive(block, env, v)?;
        let p = Formula::atom(&sym, vec![v]);
        let mut uvars = vec![v];
        uvars.extend(&pulled);
        self.univ.push((
            uvars,
            Formula::and(vec![m.clone(), Formula::neg(p.clone())]),
        ));
        self.conj
            .push((v, pulled, Formula::or(vec![Formula::neg(p.clone()), m])));
        Ok(p)
    }
}

fn rename(f: &Formula, env: &Env) -> Formula {
    f.rename(&|v| *env.get(&v).expect("free variable in scope"))
}
