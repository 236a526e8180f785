use std::io::Write;
use std::rc::Rc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::files::{self, graph_dot, load_formula, load_model, load_nf, Pmap};
use super::{Command, Outputs, EXIT_BUDGET, EXIT_NO, EXIT_USAGE, EXIT_YES};
use crate::bounds::{size_bound_m_capped, size_bound_t, size_bound_t_capped, within_size_bound_m};
use crate::construct2v::{join_components, ConditionReport, Pattern};
use crate::construct_nd::{
    join_nd_components, regularize, target_depth, tree_like_report, unravel_from,
    verify_d_conditions, NdBuilt, NdPattern, TreeNode,
};
use crate::generate::{fitted_nf, random_structure, GenParams};
use crate::logic::{reduce_to_transitive, validate_fragment};
use crate::modelfinder::{find_model_with, DistSemantics, SearchBudget};
use crate::semantics::{check_model, model_failure};
use crate::structures::{load_structure, FiniteStructure};
use crate::{Error, Result};

/// Key/value report lines.
struct Report<'a> {
    out: &'a mut dyn Write,
}

impl Report<'_> {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{key}: {value}");
    }

    fn conditions(&mut self, rep: &ConditionReport) {
        for r in &rep.results {
            if r.holds {
                self.kv(r.id, "ok");
            } else {
                let (a, b) = r.pair.unwrap_or_default();
                self.kv(r.id, format!("fail ({a},{b}) {}", r.detail));
            }
        }
    }
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn emit(outputs: &Outputs, s: &FiniteStructure) -> Result<()> {
    if let Some(p) = &outputs.out {
        files::write(p, &s.to_text())?;
    }
    if let Some(p) = &outputs.dot {
        files::write(p, &s.to_dot())?;
    }
    Ok(())
}

pub fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let mut rep = Report { out };
    match cmd {
        Command::Validate { input } => {
            let f = load_formula(&input)?;
            let fr = validate_fragment(&f.formula, &f.sig);
            rep.kv("unfo", fr.is_unfo);
            rep.kv("gnfo1", fr.is_gnfo1);
            rep.kv("bgnfo1_eq", fr.is_bgnfo1_eq);
            for (at, why) in &fr.violations {
                rep.kv("violation", format!("{at} {why}"));
            }
            Ok(verdict(fr.is_unfo))
        }
        Command::Normalize { input, out, sig_out } => {
            let (_, nf) = load_nf(&input)?;
            rep.kv("t", nf.t);
            rep.kv("m", nf.m());
            rep.kv("fresh", nf.fresh_symbols().join(","));
            rep.kv("formula", nf.pretty());
            if let Some(p) = out {
                files::write(&p, &format!("{}\n", nf.pretty()))?;
            }
            if let Some(p) = sig_out {
                files::write(&p, &nf.signature.to_text())?;
            }
            Ok(EXIT_YES)
        }
        Command::Reduce { input, out } => {
            let (_, nf) = load_nf(&input)?;
            let (_, names) = nf.to_formula();
            let text = reduce_to_transitive(&nf).pretty(&names);
            rep.kv("formula", &text);
            if let Some(p) = out {
                files::write(&p, &format!("{text}\n"))?;
            }
            Ok(EXIT_YES)
        }
        Command::Check { input, structure } => {
            let (_, nf) = load_nf(&input)?;
            let s = load_model(&structure, &nf)?;
            let failure = model_failure(&s, &nf);
            rep.kv("size", s.size());
            rep.kv("model", failure.is_none());
            if let Some(why) = &failure {
                rep.kv("reason", why);
            }
            Ok(verdict(failure.is_none()))
        }
        Command::Solve {
            input,
            max_size,
            node_limit,
            transitive,
            outputs,
        } => {
            let (_, nf) = load_nf(&input)?;
            let budget = SearchBudget {
                node_limit,
                ..SearchBudget::upto(max_size)
            };
            let sem = if transitive {
                DistSemantics::Transitive
            } else {
                DistSemantics::Equivalence
            };
            match find_model_with(&nf, budget, sem)? {
                Some(s) => {
                    rep.kv("satisfiable", true);
                    rep.kv("size", s.size());
                    emit(&outputs, &s)?;
                    Ok(EXIT_YES)
                }
                None => {
                    rep.kv("satisfiable", format!("none up to {max_size}"));
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Construct2v {
            input,
            structure,
            origin,
            pmap,
            outputs,
        } => {
            let (_, nf) = load_nf(&input)?;
            let s = load_model(&structure, &nf)?;
            if origin as usize >= s.size() {
                return Err(Error::Element(origin));
            }
            let mut pat = Pattern::new(&s, &nf)?;
            let all = pat.all_mask();
            let built = pat.build_b0(origin, all)?;
            let report = pat.verify_b_conditions(&built.structure, &built.pmap, origin, all)?;
            let model = check_model(&built.structure, &nf);
            let kk = pat.num_gtypes() as u32;
            let l = nf.signature.k() as u32 + 1;
            rep.kv("size", built.structure.size());
            rep.kv("generalized_types", kk);
            rep.kv("model", model);
            match size_bound_t_capped(l, kk, nf.m() as u32, 1 << 16) {
                Some(b) => {
                    rep.kv("bound", &b);
                    rep.kv("within_bound", BigUint::from(built.structure.size()) <= b);
                }
                None => rep.kv("within_bound", "true (bound exceeds 2^65536)"),
            }
            rep.conditions(&report);
            if let Some(p) = &outputs.out {
                files::write(p, &built.structure.to_text())?;
            }
            if let Some(p) = pmap {
                files::write(&p, &files::pmap_text(&built.pmap))?;
            }
            if let Some(p) = &outputs.dot {
                let comps = pat.components(origin, all)?;
                let asm = join_components(&pat, &comps, origin, all)?;
                let labels: Vec<String> = asm
                    .copies
                    .iter()
                    .map(|c| format!("g{} c{} ({},{}) from g{}", c.gtype, c.color, c.i, c.j, c.source_gtype))
                    .collect();
                let edges: Vec<(usize, usize)> = asm
                    .component_graph
                    .iter()
                    .enumerate()
                    .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
                    .collect();
                files::write(p, &graph_dot("components", &labels, &edges))?;
            }
            Ok(verdict(model && report.all_hold()))
        }
        Command::Constructnd {
            input,
            structure,
            origin,
            max_size,
            pmap,
            full_out,
            outputs,
        } => {
            let (f, nf) = load_nf(&input)?;
            let s = load_model(&structure, &nf)?;
            if origin as usize >= s.size() {
                return Err(Error::Element(origin));
            }
            let r = Rc::new(regularize(&s, &nf)?);
            let mut pat = NdPattern::new(r.clone());
            pat.set_budget(max_size);
            let all = pat.all_mask();
            let node = TreeNode::root(origin);
            let b = pat.build(origin, all)?;
            let report = verify_d_conditions(&r, &b, &node, all, nf.t, target_depth(&r))?;
            let plain = b.structure.project(s.sig())?;
            let model = check_model(&plain, &nf);
            let n = f.formula.size() as u32;
            let g = r.num_subtree_types() as u32;
            let l = nf.signature.k() as u32 + 1;
            let within = within_size_bound_m(&BigUint::from(plain.size()), l, n, g);
            rep.kv("size", plain.size());
            rep.kv("subtree_types", g);
            rep.kv("model", model);
            rep.kv("within_bound", within);
            rep.conditions(&report);
            if let Some(p) = &outputs.out {
                files::write(p, &plain.to_text())?;
            }
            if let Some(p) = full_out {
                files::write(&p, &b.structure.to_text())?;
            }
            if let Some(p) = pmap {
                files::write(&p, &files::tree_pmap_text(&b.pmap))?;
            }
            if let Some(p) = &outputs.dot {
                let reps = pat.type_reps(origin, 0);
                let mut comps = Vec::with_capacity(reps.len());
                for rp in &reps {
                    comps.push(pat.component(rp, all)?);
                }
                let asm = join_nd_components(&comps, &reps, max_size)?;
                let labels: Vec<String> = asm
                    .copies
                    .iter()
                    .map(|c| format!("anchor {} c{}", reps[c.gtype].anchor, c.color))
                    .collect();
                files::write(p, &graph_dot("components", &labels, &asm.component_graph))?;
            }
            Ok(verdict(model && within && report.all_hold()))
        }
        Command::Unravel {
            input,
            structure,
            depth,
            root,
            pmap,
            outputs,
        } => {
            let (_, nf) = load_nf(&input)?;
            let s = load_model(&structure, &nf)?;
            if root as usize >= s.size() {
                return Err(Error::Element(root));
            }
            let r = regularize(&s, &nf)?;
            let u = unravel_from(&r, root, depth);
            let tl = tree_like_report(&r, &u);
            rep.kv("size", u.structure.size());
            rep.kv("levels", u.levels.len());
            rep.kv("tree_like", tl.all_hold());
            emit(&outputs, &u.structure)?;
            if let Some(p) = pmap {
                files::write(&p, &files::tree_pmap_text(&u.nodes))?;
            }
            Ok(verdict(tl.all_hold()))
        }
        Command::Verify {
            input,
            pattern,
            result,
            pmap,
            origin,
        } => {
            let (_, nf) = load_nf(&input)?;
            let s = load_model(
                &super::StructureInput {
                    structure: pattern,
                    no_close: false,
                },
                &nf,
            )?;
            let text = files::read(&result)?;
            match files::parse_pmap(&files::read(&pmap)?)? {
                Pmap::Flat(map) => {
                    let b = load_structure(&text, &nf.signature, true)?;
                    if map.len() != b.size() {
                        return Err(Error::Invalid("pmap does not cover the result".into()));
                    }
                    let pat = Pattern::new(&s, &nf)?;
                    let report = pat.verify_b_conditions(&b, &map, origin, pat.all_mask())?;
                    rep.kv("construction", "two-variable");
                    rep.conditions(&report);
                    Ok(verdict(report.all_hold()))
                }
                Pmap::Tree(map) => {
                    let r = regularize(&s, &nf)?;
                    let structure = load_structure(&text, r.w_signature(), true)?;
                    if map.len() != structure.size() {
                        return Err(Error::Invalid("pmap does not cover the result".into()));
                    }
                    let node = TreeNode::root(origin);
                    let Some(o) = map.iter().position(|n| *n == node) else {
                        return Err(Error::Invalid(format!("no element maps to the root {origin}")));
                    };
                    let b = NdBuilt {
                        structure,
                        origin: o as u32,
                        pmap: map,
                    };
                    let all = (1u32 << nf.signature.k()) - 1;
                    let report = verify_d_conditions(&r, &b, &node, all, nf.t, target_depth(&r))?;
                    rep.kv("construction", "general");
                    rep.conditions(&report);
                    Ok(verdict(report.all_hold()))
                }
            }
        }
        Command::Bounds {
            t,
            k,
            m,
            big_m,
            n,
            g,
            max_bits,
        } => {
            if t.is_none() && big_m.is_none() {
                rep.kv("error", "give --T or --M");
                return Ok(EXIT_USAGE);
            }
            let mut code = EXIT_YES;
            if let Some(l) = t {
                match size_bound_t_capped(l, k, m, max_bits) {
                    Some(v) => {
                        let _ = writeln!(rep.out, "{v}");
                    }
                    None => code = EXIT_BUDGET,
                }
            }
            if let Some(l) = big_m {
                match size_bound_m_capped(l, n, g, max_bits) {
                    Some(v) => {
                        let _ = writeln!(rep.out, "{v}");
                    }
                    None => code = EXIT_BUDGET,
                }
            }
            Ok(code)
        }
        Command::Fuzz { seed, count, k } => fuzz(&mut rep, seed, count, k),
    }
}

fn fuzz(rep: &mut Report, seed: u64, count: usize, k: usize) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = GenParams {
        k,
        avoid_self_witness: true,
        ..GenParams::default()
    };
    let sig = p.signature();
    let (mut tried, mut ok2, mut oknd, mut skipped) = (0, 0, 0, 0);
    while tried < count {
        let s = random_structure(&mut rng, &sig, 2 + tried % 2, 0.3);
        let Some(nf) = fitted_nf(&mut rng, &s, &p, 200) else {
            continue;
        };
        tried += 1;
        let mut pat = Pattern::new(&s, &nf)?;
        let all = pat.all_mask();
        let b = pat.build_b0(0, all)?;
        let r2 = pat.verify_b_conditions(&b.structure, &b.pmap, 0, all)?;
        let bound = size_bound_t(k as u32 + 1, pat.num_gtypes() as u32, nf.m() as u32);
        if check_model(&b.structure, &nf) && r2.all_hold() && BigUint::from(b.structure.size()) <= bound {
            ok2 += 1;
        } else {
            rep.kv("failure", format!("two-variable #{} {}", tried - 1, nf.pretty()));
        }
        let r = regularize(&s, &nf)?;
        match build_a0prime_budget(&r, all) {
            Ok(b) => {
                let d = verify_d_conditions(&r, &b, &TreeNode::root(0), all, nf.t, target_depth(&r))?;
                if check_model(&b.structure.project(s.sig())?, &nf) && d.all_hold() {
                    oknd += 1;
                } else {
                    rep.kv("failure", format!("general #{} {}", tried - 1, nf.pretty()));
                }
            }
            Err(Error::BudgetExhausted) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    rep.kv("formulas", tried);
    rep.kv("two_variable_ok", ok2);
    rep.kv("general_ok", oknd);
    rep.kv("general_over_budget", skipped);
    Ok(verdict(ok2 == tried && oknd + skipped == tried))
}

fn build_a0prime_budget(r: &crate::construct_nd::RegularTreeModel, all: u32) -> Result<NdBuilt> {
    let mut pat = NdPattern::new(Rc::new(r.clone()));
    pat.set_budget(2000);
    let b = pat.build(0, all)?;
    Ok(b.as_ref().clone())
}
