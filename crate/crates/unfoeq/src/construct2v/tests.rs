use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::faults::{inject, Fault};
use super::*;
use crate::bounds::size_bound_t;
use crate::generate::{fitted_nf, random_structure, GenParams};
use crate::logic::{parse_formula, to_normal_form, Signature};
use crate::semantics::check_model;
use num_bigint::BigUint;
use std::rc::Rc;

fn corpus(n: usize, seed: u64) -> Vec<(NormalFormFormula, FiniteStructure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = GenParams {
        avoid_self_witness: true,
        ..GenParams::default()
    };
    let sig = p.signature();
    let mut out = Vec::new();
    while out.len() < n {
        let size = 2 + out.len() % 3;
        let s = random_structure(&mut rng, &sig, size, 0.3);
        if let Some(nf) = fitted_nf(&mut rng, &s, &p, 200) {
            out.push((nf, s));
        }
    }
    out
}

fn nf_of(text: &str, sig: &Signature) -> NormalFormFormula {
    let f = parse_formula(text, sig).unwrap().formula;
    to_normal_form(&f, sig).unwrap().0
}

/// Two elements in one `E1`-class with opposite colors, each needing the
/// other as a witness.
fn two_color_pattern() -> (NormalFormFormula, FiniteStructure) {
    let sig = Signature::new().with_base("P", 1).with_dist("E1");
    let nf = nf_of(
        "forall x . exists y . E1(x,y) & (P(x) & ~P(y) | ~P(x) & P(y))",
        &sig,
    );
    let mut s = FiniteStructure::new(&nf.signature, 2);
    s.add_named("P", vec![0]).unwrap();
    s.add_named("E1", vec![0, 1]).unwrap();
    s.close_in_place();
    (nf, s)
}

#[test]
fn singleton_class_gives_singleton() {
    let sig = Signature::new().with_base("P", 1).with_dist("E1");
    let nf = nf_of("forall x . P(x)", &sig);
    let mut s = FiniteStructure::new(&nf.signature, 2);
    s.add_named("P", vec![0]).unwrap();
    s.add_named("P", vec![1]).unwrap();
    let mut pat = Pattern::new(&s, &nf).unwrap();
    let b = pat.build_b0(1, 0).unwrap();
    assert_eq!(b.structure.size(), 1);
    assert_eq!(b.pmap, vec![1]);
    assert!(pat.verify_b_conditions(&b.structure, &b.pmap, 1, 0).unwrap().all_hold());
}

#[test]
fn one_equivalence_two_elements() {
    let (nf, s) = two_color_pattern();
    let mut pat = Pattern::new(&s, &nf).unwrap();
    pat.record_components();
    let b = pat.build_b0(0, 1).unwrap();
    let r = pat.verify_b_conditions(&b.structure, &b.pmap, 0, 1).unwrap();
    assert!(r.all_hold(), "{r}");
    assert!(check_model(&b.structure, &nf));
    for (label, r) in pat.audit().unwrap() {
        assert!(r.all_hold(), "{label}\n{r}");
    }
}

#[test]
fn connected_witness_adds_no_layer_element() {
    let (nf, s) = two_color_pattern();
    let mut pat = Pattern::new(&s, &nf).unwrap();
    let class = pat.class_of(0, 1);
    let pc = pat.build_pattern_component(0, 1, &class).unwrap();
    assert_eq!(pc.layers.len(), 2);
    assert!(pc.layers[1].is_empty());
    assert!(pc.leaves.is_empty());
    // The subcomponent supplies the witness inside layer 1.
    assert!(pc.layers[0].len() >= 2);
    let r = pat.verify_c_conditions(&pc, 1).unwrap();
    assert!(r.all_hold(), "{r}");
}

#[test]
fn empty_leaves_give_single_component() {
    let (nf, s) = two_color_pattern();
    let mut pat = Pattern::new(&s, &nf).unwrap();
    let comps = pat.components(0, 1).unwrap();
    let asm = join_components(&pat, &comps, 0, 1).unwrap();
    assert_eq!(asm.copies.len(), 1);
    assert!(asm.joins.is_empty());
    assert_eq!(asm.result, comps[0].structure);
}

#[test]
fn constructions_are_models_within_bound() {
    for (i, (nf, s)) in corpus(60, 99).into_iter().enumerate() {
        let mut pat = Pattern::new(&s, &nf).unwrap();
        pat.record_components();
        let all = pat.all_mask();
        let b = pat.build_b0(0, all).unwrap();
        assert!(check_model(&b.structure, &nf), "case {i}");
        let k = pat.k() as u32;
        let bound = size_bound_t(k + 1, pat.num_gtypes() as u32, nf.m() as u32);
        assert!(BigUint::from(b.structure.size()) <= bound, "case {i}");
        for (label, r) in pat.audit().unwrap() {
            assert!(r.all_hold(), "case {i} {label}\n{r}");
        }
    }
}

#[test]
fn joins_alternate_colors_and_keep_copies_intact() {
    let mut nontrivial = 0;
    for (nf, s) in corpus(40, 5) {
        let mut pat = Pattern::new(&s, &nf).unwrap();
        let all = pat.all_mask();
        let comps = pat.components(0, all).unwrap();
        let asm = join_components(&pat, &comps, 0, all).unwrap();
        assert_eq!(asm.copies_intact(&comps), None);
        for j in &asm.joins {
            assert_ne!(asm.copies[j.from].color, asm.copies[j.to].color);
            let (ci, map) = &asm.copy_maps[j.to];
            assert_eq!(j.root, map[comps[*ci].root as usize]);
        }
        nontrivial += usize::from(!asm.joins.is_empty());
        for pc in &comps {
            for &e in &pc.order {
                let root_class = pc.structure.eq_class(pc.root, 1 << e);
                assert!(pc.leaves.iter().all(|l| !root_class.contains(l)));
            }
        }
    }
    assert!(nontrivial >= 2, "{nontrivial}");
}

#[test]
fn construction_is_deterministic() {
    for (nf, s) in corpus(10, 3) {
        let a = construct(&s, &nf, 0).unwrap();
        let b = construct(&s, &nf, 0).unwrap();
        assert_eq!(a.structure.to_text(), b.structure.to_text());
        assert_eq!(a.pmap, b.pmap);
    }
}

/// A corpus case whose construction has a component with at least three
/// layers in use and an output of some size.
fn rich_case() -> (Pattern, Rc<Built>, u32) {
    for (nf, s) in corpus(200, 17) {
        let mut pat = Pattern::new(&s, &nf).unwrap();
        let all = pat.all_mask();
        let b = pat.build_b0(0, all).unwrap();
        let comps = pat.components(0, all).unwrap();
        if b.structure.size() >= 8 && comps.iter().any(|c| !c.layers[2].is_empty()) {
            return (pat, b, all);
        }
    }
    panic!("no rich case in corpus");
}

fn fails(pat: &Pattern, s: &FiniteStructure, p: &[Elem], a0: Elem, eqs0: u32, id: &str) -> bool {
    !pat.verify_b_conditions(s, p, a0, eqs0).unwrap().get(id).unwrap().holds
}

#[test]
fn mutants_fail_named_b_conditions() {
    let (pat, b, all) = rich_case();
    let (s, p) = (&b.structure, &b.pmap);
    assert!(pat.verify_b_conditions(s, p, 0, all).unwrap().all_hold());
    let n = s.size() as Elem;
    let mut killed = Vec::new();

    // b1 needs a level with a total symbol.
    let (a1, sub) = pat
        .memo
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .filter(|((_, e), v)| *e != all && v.structure.size() >= 2)
        .min_by_key(|(k, _)| *k)
        .expect("an intermediate level");
    let (a1, e1) = a1;
    let j = (0..pat.k()).find(|j| e1 >> j & 1 == 0).unwrap();
    let (ms, mp) = inject(&sub.structure, &sub.pmap, Fault::IsolateFromClass { j, a: 0 });
    assert!(fails(&pat, &ms, &mp, a1, e1, "b1"));
    killed.push("b1");

    // b2: strip the base edges of some element until a witness goes missing.
    if (0..n).any(|a| {
        let (ms, mp) = inject(s, p, Fault::DropBaseEdges { a });
        fails(&pat, &ms, &mp, 0, all, "b2")
    }) {
        killed.push("b2");
    }

    // b3: send an element to a realizer of another generalized type.
    let ps = pat.structure().size() as Elem;
    if (0..n).any(|a| {
        (0..ps).any(|to| {
            let (ms, mp) = inject(s, p, Fault::Remap { a, to });
            fails(&pat, &ms, &mp, 0, all, "b3")
        })
    }) {
        killed.push("b3");
    }

    // b4: change a 1-type.
    let (ms, mp) = inject(s, p, Fault::FlipUnary { sym: 0, a: n - 1 });
    assert!(fails(&pat, &ms, &mp, 0, all, "b4"));
    killed.push("b4");

    // b5: a base edge between two elements that the class never joins so.
    let r = pat.structure().sig().id("R1").unwrap();
    if (0..n).any(|a| {
        (0..n).any(|c| {
            a != c && !s.holds(r, &[a, c]) && {
                let (ms, mp) = inject(s, p, Fault::AddBaseEdge { sym: r, a, b: c });
                fails(&pat, &ms, &mp, 0, all, "b5")
            }
        })
    }) {
        killed.push("b5");
    }

    // b6: no element maps to a0.
    let mut mp = p.clone();
    let other = (0..ps).find(|&x| pat.gtype_id(x) == pat.gtype_id(0) && x != 0);
    for v in mp.iter_mut().filter(|v| **v == 0) {
        *v = other.unwrap_or(ps - 1);
    }
    assert!(fails(&pat, s, &mp, 0, all, "b6"));
    killed.push("b6");

    assert!(killed.len() >= 5, "{killed:?}");
}

#[test]
fn mutants_fail_named_c_conditions() {
    let (mut pat, _, all) = rich_case();
    let comps = pat.components(0, all).unwrap();
    let pc = comps.iter().find(|c| !c.layers[2].is_empty()).unwrap().clone();
    assert!(pat.verify_c_conditions(&pc, all).unwrap().all_hold());
    let with = |s: FiniteStructure, p: Vec<Elem>| PatternComponent {
        structure: s,
        pmap: p,
        ..pc.clone()
    };
    let check = |m: &PatternComponent, id: &str| !pat.verify_c_conditions(m, all).unwrap().get(id).unwrap().holds;
    let mut killed = Vec::new();

    // c2: drop the edge to a witness in the next layer.
    let l2 = pc.layers[1][0];
    let (s, p) = inject(&pc.structure, &pc.pmap, Fault::IsolateFromClass { j: 0, a: l2 });
    let (s, p) = inject(&s, &p, Fault::IsolateFromClass { j: 1, a: l2 });
    let (s, p) = inject(&s, &p, Fault::DropBaseEdges { a: l2 });
    let m = with(s, p);
    if check(&m, "c2") || check(&m, "c5") {
        killed.push("c2/c5");
    }

    // c4: flip a unary atom.
    let (s, p) = inject(&pc.structure, &pc.pmap, Fault::FlipUnary { sym: 1, a: pc.root });
    assert!(check(&with(s, p), "c4"));
    killed.push("c4");

    // c6: a base edge from layer 1 to layer 3.
    let r = pc.structure.sig().id("R1").unwrap();
    let far = pc.layers[2][0];
    let (s, p) = inject(&pc.structure, &pc.pmap, Fault::AddBaseEdge { sym: r, a: pc.root, b: far });
    assert!(check(&with(s, p), "c6"));
    killed.push("c6");

    // c7: join the root with a layer-2 element by the first symbol.
    let (s, p) = inject(
        &pc.structure,
        &pc.pmap,
        Fault::MergeClasses { j: pc.order[0], a: pc.root, b: pc.layers[1][0] },
    );
    assert!(check(&with(s, p), "c7"));
    killed.push("c7");

    // c3: identify the images of two elements the first symbol joins while
    // keeping their types apart.
    let (s, p) = inject(&pc.structure, &pc.pmap, Fault::Remap { a: pc.root, to: pc.pmap[l2 as usize] });
    let m = with(s, p);
    if check(&m, "c3") || check(&m, "c4") {
        killed.push("c3/c4");
    }
    assert!(killed.len() >= 4, "{killed:?}");
}

#[test]
fn c1_detects_broken_total_symbol() {
    let (nf, s) = two_color_pattern();
    let mut pat = Pattern::new(&s, &nf).unwrap();
    pat.record_components();
    pat.build_b0(0, 1).unwrap();
    let ext = pat.fake.as_ref().unwrap();
    let (eqs0, pc) = ext.log.as_ref().unwrap().iter().find(|(_, c)| c.structure.size() >= 2).unwrap().clone();
    assert!(ext.verify_c_conditions(&pc, eqs0).unwrap().all_hold());
    let (s2, p2) = inject(&pc.structure, &pc.pmap, Fault::IsolateFromClass { j: 0, a: pc.root });
    let m = PatternComponent { structure: s2, pmap: p2, ..pc };
    assert!(!ext.verify_c_conditions(&m, eqs0).unwrap().get("c1").unwrap().holds);
}
