use std::fmt::Write as _;

/// Variables are interned as small integers; see [`VarNames`] for printing.
pub type Var = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Atom { sym: String, args: Vec<Var> },
    Equality(Var, Var),
    /// Empty conjunction is `true`.
    And(Vec<Formula>),
    /// Empty disjunction is `false`.
    Or(Vec<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Neg(Box<Formula>),
    /// `forall vars . ~body`, the same formula as `Neg(Exists(vars, body))`.
    UnivNeg(Vec<Var>, Box<Formula>),
}

/// Formula tree node with its free variables cached (sorted, deduplicated).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    kind: Kind,
    free: Vec<Var>,
}

fn union(a: &[Var], b: &[Var]) -> Vec<Var> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

impl Formula {
    fn from_kind(kind: Kind) -> Self {
        let free = match &kind {
            Kind::Atom { args, .. } => {
                let mut v = args.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            Kind::Equality(a, b) => {
                let mut v = vec![*a, *b];
                v.sort_unstable();
                v.dedup();
                v
            }
            Kind::And(cs) | Kind::Or(cs) => cs.iter().fold(Vec::new(), |acc, c| union(&acc, &c.free)),
            Kind::Exists(vs, b) | Kind::UnivNeg(vs, b) => {
                b.free.iter().copied().filter(|v| !vs.contains(v)).collect()
            }
            Kind::Neg(b) => b.free.clone(),
        };
        Formula { kind, free }
    }

    pub fn atom(sym: &str, args: Vec<Var>) -> Self {
        Self::from_kind(Kind::Atom {
            sym: sym.to_string(),
            args,
        })
    }

    pub fn equality(a: Var, b: Var) -> Self {
        Self::from_kind(Kind::Equality(a, b))
    }

    /// Conjunction; a single child is returned unchanged.
    pub fn and(mut cs: Vec<Formula>) -> Self {
        if cs.len() == 1 {
            return cs.pop().unwrap();
        }
        Self::from_kind(Kind::And(cs))
    }

    /// Disjunction; a single child is returned unchanged.
    pub fn or(mut cs: Vec<Formula>) -> Self {
        if cs.len() == 1 {
            return cs.pop().unwrap();
        }
        Self::from_kind(Kind::Or(cs))
    }

    pub fn truth() -> Self {
        Self::from_kind(Kind::And(vec![]))
    }

    pub fn falsity() -> Self {
        Self::from_kind(Kind::Or(vec![]))
    }

    pub fn exists(vars: Vec<Var>, body: Formula) -> Self {
        if vars.is_empty() {
            return body;
        }
        Self::from_kind(Kind::Exists(vars, Box::new(body)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(body: Formula) -> Self {
        Self::from_kind(Kind::Neg(Box::new(body)))
    }

    pub fn univ_neg(vars: Vec<Var>, body: Formula) -> Self {
        Self::from_kind(Kind::UnivNeg(vars, Box::new(body)))
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }

    pub fn is_sentence(&self) -> bool {
        self.free.is_empty()
    }

    /// Replaces `UnivNeg` nodes by `Neg(Exists ..)` throughout.
    pub fn desugar(&self) -> Formula {
        self.map_children(&|c| c.desugar(), true)
    }

    fn map_children(&self, f: &dyn Fn(&Formula) -> Formula, desugar: bool) -> Formula {
        match &self.kind {
            Kind::Atom { .. } | Kind::Equality(..) => self.clone(),
            Kind::And(cs) => Self::from_kind(Kind::And(cs.iter().map(f).collect())),
            Kind::Or(cs) => Self::from_kind(Kind::Or(cs.iter().map(f).collect())),
            Kind::Exists(vs, b) => Self::from_kind(Kind::Exists(vs.clone(), Box::new(f(b)))),
            Kind::Neg(b) => Self::neg(f(b)),
            Kind::UnivNeg(vs, b) if desugar => {
                Self::neg(Self::from_kind(Kind::Exists(vs.clone(), Box::new(f(b)))))
            }
            Kind::UnivNeg(vs, b) => Self::univ_neg(vs.clone(), f(b)),
        }
    }

    /// Renames every variable occurrence, bound or free.
    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Formula {
        match &self.kind {
            Kind::Atom { sym, args } => Self::atom(sym, args.iter().map(|v| map(*v)).collect()),
            Kind::Equality(a, b) => Self::equality(map(*a), map(*b)),
            Kind::Exists(vs, b) => Self::from_kind(Kind::Exists(
                vs.iter().map(|v| map(*v)).collect(),
                Box::new(b.rename(map)),
            )),
            Kind::UnivNeg(vs, b) => {
                Self::univ_neg(vs.iter().map(|v| map(*v)).collect(), b.rename(map))
            }
            _ => self.map_children(&|c| c.rename(map), false),
        }
    }

    /// True when no quantifier occurs.
    pub fn is_quantifier_free(&self) -> bool {
        match &self.kind {
            Kind::Atom { .. } | Kind::Equality(..) => true,
            Kind::And(cs) | Kind::Or(cs) => cs.iter().all(|c| c.is_quantifier_free()),
            Kind::Neg(b) => b.is_quantifier_free(),
            Kind::Exists(..) | Kind::UnivNeg(..) => false,
        }
    }

    /// Every variable occurring anywhere, sorted.
    pub fn all_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match &self.kind {
            Kind::Atom { args, .. } => out.extend(args),
            Kind::Equality(a, b) => out.extend([*a, *b]),
            Kind::And(cs) | Kind::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
            Kind::Exists(vs, b) | Kind::UnivNeg(vs, b) => {
                out.extend(vs);
                b.collect_vars(out);
            }
            Kind::Neg(b) => b.collect_vars(out),
        }
    }

    /// Symbols used in atoms, in first-occurrence order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |f| {
            if let Kind::Atom { sym, .. } = &f.kind {
                if !out.contains(sym) {
                    out.push(sym.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match &self.kind {
            Kind::Atom { .. } | Kind::Equality(..) => {}
            Kind::And(cs) | Kind::Or(cs) => cs.iter().for_each(|c| c.visit(f)),
            Kind::Exists(_, b) | Kind::UnivNeg(_, b) | Kind::Neg(b) => b.visit(f),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn pretty(&self, names: &VarNames) -> String {
        let mut s = String::new();
        self.write(&mut s, names);
        s
    }

    fn ends_open(&self) -> bool {
        match &self.kind {
            Kind::Exists(..) | Kind::UnivNeg(..) => true,
            Kind::Neg(b) => b.ends_open(),
            _ => false,
        }
    }

    fn write_operand(&self, s: &mut String, names: &VarNames) {
        let bare = match &self.kind {
            Kind::And(cs) | Kind::Or(cs) => cs.is_empty(),
            Kind::Equality(..) => false,
            _ => true,
        };
        if bare {
            self.write(s, names);
        } else {
            s.push('(');
            self.write(s, names);
            s.push(')');
        }
    }

    fn write(&self, s: &mut String, names: &VarNames) {
        match &self.kind {
            Kind::Atom { sym, args } => {
                s.push_str(sym);
                s.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    s.push_str(&names.name(*a));
                }
                s.push(')');
            }
            Kind::Equality(a, b) => {
                let _ = write!(s, "{} = {}", names.name(*a), names.name(*b));
            }
            Kind::And(cs) | Kind::Or(cs) => {
                let is_and = matches!(self.kind, Kind::And(_));
                if cs.is_empty() {
                    s.push_str(if is_and { "true" } else { "false" });
                    return;
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        s.push_str(if is_and { " & " } else { " | " });
                    }
                    let nested = match &c.kind {
                        Kind::And(g) | Kind::Or(g) => !g.is_empty(),
                        _ => false,
                    };
                    if nested || c.ends_open() {
                        s.push('(');
                        c.write(s, names);
                        s.push(')');
                    } else {
                        c.write(s, names);
                    }
                }
            }
            Kind::Exists(vs, b) => {
                s.push_str("exists");
                for v in vs {
                    s.push(' ');
                    s.push_str(&names.name(*v));
                }
                s.push_str(" . ");
                b.write(s, names);
            }
            Kind::Neg(b) => {
                s.push('~');
                b.write_operand(s, names);
            }
            Kind::UnivNeg(vs, b) => {
                s.push_str("forall");
                for v in vs {
                    s.push(' ');
                    s.push_str(&names.name(*v));
                }
                s.push_str(" . ~");
                b.write_operand(s, names);
            }
        }
    }
}

/// Surface names of interned variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarNames(pub Vec<String>);

impl VarNames {
    pub fn name(&self, v: Var) -> String {
        self.0
            .get(v as usize)
            .cloned()
            .unwrap_or_else(|| format!("v{v}"))
    }

    /// Interns `name`, returning its variable.
    pub fn intern(&mut self, name: &str) -> Var {
        match self.0.iter().position(|n| n == name) {
            Some(i) => i as Var,
            None => {
                self.0.push(name.to_string());
                (self.0.len() - 1) as Var
            }
        }
    }

    /// Names `x1..xt` used for the universal conjunct of a normal form.
    pub fn universal(t: usize) -> Self {
        VarNames((1..=t).map(|i| format!("x{i}")).collect())
    }

    /// Names `x, y1..yl` used for the existential conjuncts of a normal form.
    pub fn conjunct(l: usize) -> Self {
        let mut v = vec!["x".to_string()];
        v.extend((1..=l).map(|i| format!("y{i}")));
        VarNames(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_are_cached() {
        let f = Formula::exists(
            vec![1],
            Formula::and(vec![Formula::atom("R", vec![0, 1]), Formula::equality(1, 2)]),
        );
        assert_eq!(f.free_vars(), &[0, 2]);
        let g = Formula::univ_neg(vec![0, 2], f.clone());
        assert!(g.is_sentence());
        assert_eq!(g.desugar(), Formula::neg(Formula::exists(vec![0, 2], f)));
    }

    #[test]
    fn printer_parenthesizes_open_quantifiers() {
        let names = VarNames(vec!["x".into(), "y".into()]);
        let f = Formula::and(vec![
            Formula::exists(vec![1], Formula::atom("R", vec![0, 1])),
            Formula::atom("P", vec![0]),
        ]);
        assert_eq!(f.pretty(&names), "(exists y . R(x,y)) & P(x)");
        let g = Formula::neg(Formula::or(vec![Formula::atom("P", vec![0]), Formula::equality(0, 1)]));
        assert_eq!(g.pretty(&names), "~(P(x) | x = y)");
        assert_eq!(Formula::truth().pretty(&names), "true");
    }
}
