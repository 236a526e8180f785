use std::rc::Rc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::faults::{inject, NdFault};
use super::*;
use crate::bounds::within_size_bound_m;
use crate::generate::{fitted_nf, random_structure, GenParams};
use crate::logic::{parse_formula, to_normal_form, Signature};
use crate::semantics::{check_model, find_homomorphism, HomConstraint};
use crate::structures::Elem;
use crate::NormalFormFormula;

fn nf_of(text: &str, sig: &Signature) -> NormalFormFormula {
    let f = parse_formula(text, sig).unwrap().formula;
    to_normal_form(&f, sig).unwrap().0
}

fn corpus(n: usize, seed: u64, k: usize) -> Vec<(NormalFormFormula, FiniteStructure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = GenParams {
        k,
        avoid_self_witness: true,
        ..GenParams::default()
    };
    let sig = p.signature();
    let mut out = Vec::new();
    while out.len() < n {
        let size = 2 + out.len() % 2;
        let s = random_structure(&mut rng, &sig, size, 0.3);
        if let Some(nf) = fitted_nf(&mut rng, &s, &p, 200) {
            out.push((nf, s));
        }
    }
    out
}

/// Two `E1`-equivalent elements of opposite colors joined by `R` both ways;
/// each needs the other, and no two colored elements may be `R`-joined.
fn two_color_pattern() -> (NormalFormFormula, FiniteStructure) {
    let sig = Signature::new()
        .with_base("P", 1)
        .with_base("R", 2)
        .with_dist("E1");
    let nf = nf_of(
        "(forall x . exists y . E1(x,y) & R(x,y) & (P(x) & ~P(y) | ~P(x) & P(y))) \
         & ~(exists x y . R(x,y) & P(x) & P(y))",
        &sig,
    );
    let mut s = FiniteStructure::new(&nf.signature, 2);
    s.add_named("P", vec![0]).unwrap();
    s.add_named("R", vec![0, 1]).unwrap();
    s.add_named("R", vec![1, 0]).unwrap();
    s.add_named("E1", vec![0, 1]).unwrap();
    s.close_in_place();
    (nf, s)
}

/// `P` somewhere, with every `E1` class a singleton.
fn singleton_classes() -> (NormalFormFormula, FiniteStructure) {
    let sig = Signature::new().with_base("P", 1).with_dist("E1");
    let nf = nf_of("forall x . exists y . P(y)", &sig);
    let mut s = FiniteStructure::new(&nf.signature, 2);
    s.add_named("P", vec![1]).unwrap();
    s.close_in_place();
    (nf, s)
}

fn all_mask(r: &RegularTreeModel) -> u32 {
    (1u32 << r.base().sig().k()) - 1
}

#[test]
fn regularize_singleton_has_one_type() {
    let sig = Signature::new().with_base("P", 1).with_dist("E1");
    let nf = nf_of("forall x . exists y . P(y) & E1(x,y)", &sig);
    let mut s = FiniteStructure::new(&nf.signature, 1);
    s.add_named("P", vec![0]).unwrap();
    s.close_in_place();
    let r = regularize(&s, &nf).unwrap();
    assert_eq!(r.num_subtree_types(), 1);
    assert_eq!(r.members(0), &[0]);
    assert_eq!(r.self_number(0), 0);
    assert_eq!(unravel_truncated(&r, 3).structure.size(), 1);
}

#[test]
fn regularize_two_elements_numbering_is_consistent() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    assert_eq!(r.num_subtree_types(), 2);
    assert_eq!(r.members(0), &[0, 1]);
    assert_eq!(r.members(1), &[0, 1]);
    assert_eq!((r.self_number(0), r.self_number(1)), (0, 1));
    for a in s.elements() {
        let local = r.local_structure(a, r.w_signature());
        assert_eq!(local.project(s.sig()).unwrap(), s);
        for i in 0..2 {
            assert!(local.holds_named(r.w_name(i), &[a, i as Elem]));
            assert!(local.holds_named(r.w_name(i), &[i as Elem, i as Elem]));
        }
    }
}

#[test]
fn regularize_is_deterministic_and_rejects_non_models() {
    let (nf, s) = two_color_pattern();
    assert_eq!(regularize(&s, &nf).unwrap(), regularize(&s, &nf).unwrap());
    let mut bad = s.clone();
    let id = bad.sig().id("R").unwrap();
    bad.remove_tuple(id, &[0, 1]);
    assert!(regularize(&bad, &nf).is_err());
}

#[test]
fn unravel_map_is_a_homomorphism_and_tree_like() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    for depth in 0..=3 {
        let u = unravel_truncated(&r, depth);
        assert_eq!(u.structure.size(), depth + 1);
        let h = u.map();
        let c = HomConstraint {
            fixed: h.iter().enumerate().map(|(a, b)| (a as Elem, *b)).collect(),
            ..HomConstraint::preserving()
        };
        assert_eq!(find_homomorphism(&u.structure, &s, &c), Some(h));
        assert!(tree_like_report(&r, &u).all_hold(), "depth {depth}");
    }
}

#[test]
fn tree_like_report_catches_a_stray_atom() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    let mut u = unravel_truncated(&r, 3);
    u.structure.add_named("R", vec![0, 3]).unwrap();
    let rep = tree_like_report(&r, &u);
    assert!(!rep.base_atoms_in_blocks);
    assert!(rep.levels && rep.disjoint_blocks);
}

#[test]
fn no_live_symbol_on_a_singleton_class_gives_one_element() {
    let (nf, s) = singleton_classes();
    let r = regularize(&s, &nf).unwrap();
    let a0 = TreeNode::root(0);
    let b = build_a0prime(&r, &a0, 0).unwrap();
    assert_eq!(b.structure.size(), 1);
    assert_eq!(b.pmap, vec![a0.clone()]);
    let rep = verify_d_conditions(&r, &b, &a0, 0, nf.t, target_depth(&r)).unwrap();
    assert!(rep.all_hold(), "{rep}");
}

#[test]
fn no_live_symbol_on_a_larger_class_passes_d_conditions() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    let a0 = TreeNode::root(0);
    let b = build_a0prime(&r, &a0, 0).unwrap();
    assert!(b.structure.size() > 1);
    let rep = verify_d_conditions(&r, &b, &a0, 0, nf.t, target_depth(&r)).unwrap();
    assert!(rep.all_hold(), "{rep}");
}

#[test]
fn two_elements_with_two_universal_variables() {
    let (nf, s) = two_color_pattern();
    assert_eq!(nf.t, 2);
    let c = construct_nd(&s, &nf, 0).unwrap();
    assert!(c.report.all_hold(), "{}", c.report);
    assert!(check_model(&c.structure, &nf));
    assert_eq!(c.built.structure.close_equivalences(), c.built.structure);
    assert_eq!(c.num_subtree_types, 2);
}

#[test]
fn nodes_below_a_root_are_handled() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    let a0 = r.child(&TreeNode::root(0), 1);
    let b = build_a0prime(&r, &a0, 1).unwrap();
    assert_eq!(b.pmap[b.origin as usize], a0);
    let rep = verify_d_conditions(&r, &b, &a0, 1, nf.t, target_depth(&r)).unwrap();
    assert!(rep.all_hold(), "{rep}");
    let bogus = TreeNode {
        anchor: 0,
        path: vec![0, 0],
    };
    assert!(build_a0prime(&r, &bogus, 1).is_err());
}

/// Runs the construction with every component recorded; `None` when the
/// size budget runs out.
fn run(nf: &NormalFormFormula, s: &FiniteStructure) -> Option<(RegularTreeModel, NdPattern, NdBuilt)> {
    let r = regularize(s, nf).unwrap();
    let mut pat = NdPattern::new(Rc::new(r.clone()));
    pat.set_budget(2000);
    pat.record_components();
    match build_with(&mut pat, &TreeNode::root(0), all_mask(&r)) {
        Ok(b) => Some((r, pat, b)),
        Err(crate::Error::BudgetExhausted) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn corpus_outputs_are_models_within_bound() {
    let mut done = 0;
    for k in 1..=2 {
        for (nf, s) in corpus(8, 3, k) {
            let Some((r, _, b)) = run(&nf, &s) else {
                continue;
            };
            done += 1;
            let all = all_mask(&r);
            let rep = verify_d_conditions(&r, &b, &TreeNode::root(0), all, nf.t, target_depth(&r))
                .unwrap();
            assert!(rep.all_hold(), "{}\n{rep}", nf.pretty());
            let plain = b.structure.project(s.sig()).unwrap();
            assert!(check_model(&plain, &nf), "{}", nf.pretty());
            let n = nf.to_formula().0.size() as u32;
            let size = BigUint::from(b.structure.size());
            assert!(within_size_bound_m(&size, k as u32 + 1, n, r.num_subtree_types() as u32));
        }
    }
    assert!(done >= 12, "only {done} runs within budget");
}

#[test]
fn components_are_layered_separated_and_witnessed() {
    let mut checked = 0;
    for k in 1..=2 {
        for (nf, s) in corpus(6, 5, k) {
            let Some((r, pat, _)) = run(&nf, &s) else {
                continue;
            };
            for c in pat.components_log() {
                let l = c.eqs0.count_ones() as usize;
                assert_eq!(c.num_layers(), l * (2 * nf.t + 1) + 1);
                assert!(separation_check(c, nf.t), "eqs0 {:#b}", c.eqs0);
                if c.structure.size() <= 40 {
                    assert!(separation_check_exhaustive(c, nf.t));
                }
                let closed = c.structure.close_equivalences();
                let sig = closed.sig().clone();
                let tot = ((1u32 << sig.k()) - 1) & !c.eqs0;
                // Inner elements carry a W-successor for every member joined
                // to them by all of E_tot, anchored at that member.
                for layer in &c.layers[..c.num_layers() - 1] {
                    for &e in layer {
                        let a = c.pmap[e as usize].anchor;
                        for (i, &m) in r.members(a).iter().enumerate() {
                            if r.base_mask(&sig, a, m) & tot != tot {
                                continue;
                            }
                            let id = sig.id(r.w_name(i)).unwrap();
                            let w: Vec<Elem> = closed.successors(id, e).collect();
                            assert_eq!(w.len(), 1, "element {e} member {i}");
                            assert_eq!(c.pmap[w[0] as usize].anchor, m);
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 10, "only {checked} components");
}

#[test]
fn interface_elements_match_the_roots_they_join() {
    for (nf, s) in corpus(6, 9, 2) {
        let Some((_, pat, _)) = run(&nf, &s) else {
            continue;
        };
        let log = pat.components_log();
        for c in &log {
            let closed = c.structure.close_equivalences();
            for &b in c.interface() {
                let anchor = c.pmap[b as usize].anchor;
                let Some(root) = log.iter().find(|d| {
                    d.eqs0 == c.eqs0 && d.rep.anchor == anchor && d.structure.sig() == c.structure.sig()
                }) else {
                    continue;
                };
                let rc = root.structure.close_equivalences();
                assert_eq!(closed.atomic_type(b), rc.atomic_type(root.root()));
            }
        }
    }
}

#[test]
fn shortened_component_fails_separation() {
    let (nf, s) = two_color_pattern();
    let (_, pat, _) = run(&nf, &s).unwrap();
    let c = pat
        .components_log()
        .into_iter()
        .find(|c| c.eqs0.count_ones() == 1 && c.structure.size() > 2)
        .unwrap()
        .clone();
    assert!(separation_check(&c, nf.t));
    // Keeping two layers makes the first and the last inner layer coincide.
    let mut short = c.clone();
    short.layers.truncate(2);
    short.init.truncate(2);
    assert!(!separation_check(&short, nf.t));
    assert!(!separation_check_exhaustive(&short, nf.t));
}

#[test]
fn faults_fail_d_conditions() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    let a0 = TreeNode::root(0);
    let b = build_a0prime(&r, &a0, 1).unwrap();
    let check = |f: &NdFault| {
        let bad = inject(&r, &b, f);
        verify_d_conditions(&r, &bad, &a0, 1, nf.t, target_depth(&r)).unwrap()
    };
    let o = b.origin;
    let rep = check(&NdFault::DropWitnessEdge { a: o, i: 1 });
    assert!(!rep.get("d3").unwrap().holds, "{rep}");
    let rep = check(&NdFault::Remap { a: o, anchor: 1 });
    assert!(!rep.get("d2").unwrap().holds, "{rep}");
    let other = (o + 1) % b.structure.size() as Elem;
    let flipped = 1 - b.pmap[other as usize].anchor;
    assert!(!check(&NdFault::Remap { a: other, anchor: flipped }).all_hold());
    let rep = check(&NdFault::AddBaseEdge {
        sym: "R".into(),
        a: o,
        b: o,
    });
    assert!(!rep.all_hold(), "{rep}");
}

#[test]
fn isolating_an_element_breaks_totality() {
    let (nf, s) = two_color_pattern();
    let r = regularize(&s, &nf).unwrap();
    let a0 = TreeNode::root(0);
    let b = build_a0prime(&r, &a0, 0).unwrap();
    let bad = inject(&r, &b, &NdFault::Isolate { a: b.origin });
    let rep = verify_d_conditions(&r, &bad, &a0, 0, nf.t, target_depth(&r)).unwrap();
    assert!(!rep.get("d1").unwrap().holds, "{rep}");
}

#[test]
fn construction_is_deterministic() {
    let (nf, s) = two_color_pattern();
    let a = construct_nd(&s, &nf, 1).unwrap();
    let b = construct_nd(&s, &nf, 1).unwrap();
    assert_eq!(a.built, b.built);
}
