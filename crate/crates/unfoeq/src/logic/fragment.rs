use super::formula::{Formula, Kind};
use super::signature::Signature;

/// Outcome of fragment classification.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FragmentReport {
    pub is_unfo: bool,
    pub is_gnfo1: bool,
    pub is_bgnfo1_eq: bool,
    /// Offending node (child indices from the root, dot-separated) and reason.
    pub violations: Vec<(String, String)>,
}

#[derive(Default)]
struct Scan {
    unary_ok: bool,
    guarded_any: bool,
    guarded_base: bool,
    one_dim: bool,
    violations: Vec<(String, String)>,
}

fn path_str(path: &[usize]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Classifies `f`. Negations of formulas with at most one free variable count
/// as guarded (by the equality `x = x`), so every unary-negation formula is
/// also accepted by the two guarded checks.
pub fn validate_fragment(f: &Formula, sig: &Signature) -> FragmentReport {
    let mut s = Scan {
        unary_ok: true,
        guarded_any: true,
        guarded_base: true,
        one_dim: true,
        violations: Vec::new(),
    };
    let mut path = Vec::new();
    walk(f, None, false, sig, &mut path, &mut s);
    let is_unfo = s.unary_ok;
    FragmentReport {
        is_unfo,
        is_gnfo1: is_unfo || (s.guarded_any && s.one_dim),
        is_bgnfo1_eq: is_unfo || (s.guarded_base && s.one_dim),
        violations: s.violations,
    }
}

fn walk(
    f: &Formula,
    parent: Option<&Formula>,
    parent_is_exists: bool,
    sig: &Signature,
    path: &mut Vec<usize>,
    s: &mut Scan,
) {
    let negated = matches!(f.kind(), Kind::Neg(_) | Kind::UnivNeg(..));
    if negated {
        let free = f.free_vars();
        if free.len() > 1 {
            s.unary_ok = false;
            s.violations.push((
                path_str(path),
                format!("negated subformula has {} free variables", free.len()),
            ));
            let (any, base) = guard_status(f, parent, sig);
            if !any {
                s.guarded_any = false;
                s.violations
                    .push((path_str(path), "negation without an atomic guard".into()));
            }
            if !base {
                s.guarded_base = false;
                if any {
                    s.violations
                        .push((path_str(path), "negation guard is not a base atom".into()));
                }
            }
        }
    }
    let block_top = match f.kind() {
        Kind::Exists(..) => !parent_is_exists,
        Kind::UnivNeg(..) => true,
        _ => false,
    };
    if block_top && f.free_vars().len() > 1 {
        s.one_dim = false;
        s.violations.push((
            path_str(path),
            format!("quantifier block leaves {} variables free", f.free_vars().len()),
        ));
    }
    match f.kind() {
        Kind::Atom { .. } | Kind::Equality(..) => {}
        Kind::And(cs) | Kind::Or(cs) => {
            for (i, c) in cs.iter().enumerate() {
                path.push(i);
                walk(c, Some(f), false, sig, path, s);
                path.pop();
            }
        }
        Kind::Exists(_, b) | Kind::UnivNeg(_, b) => {
            path.push(0);
            walk(b, Some(f), matches!(f.kind(), Kind::Exists(..)), sig, path, s);
            path.pop();
        }
        Kind::Neg(b) => {
            path.push(0);
            walk(b, Some(f), false, sig, path, s);
            path.pop();
        }
    }
}

/// Whether a conjunct sibling atom covers the free variables of `neg`:
/// (any atom, base atom).
fn guard_status(neg: &Formula, parent: Option<&Formula>, sig: &Signature) -> (bool, bool) {
    let Some(Kind::And(siblings)) = parent.map(|p| p.kind()) else {
        return (false, false);
    };
    let mut any = false;
    let mut base = false;
    for g in siblings {
        let covers = |args: &[u32]| neg.free_vars().iter().all(|v| args.contains(v));
        match g.kind() {
            Kind::Atom { sym, args } if covers(args) => {
                any = true;
                if sig.id(sym).is_some_and(|id| !sig.is_dist(id)) {
                    base = true;
                }
            }
            Kind::Equality(a, b) if covers(&[*a, *b]) => any = true,
            _ => {}
        }
    }
    (any, base)
}
