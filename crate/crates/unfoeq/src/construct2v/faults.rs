//! Deliberate corruptions of construction outputs, for testing that the
//! condition checkers notice them.

use crate::structures::{Elem, FiniteStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Split the class of `a` under symbol `j` by removing `a` from it.
    IsolateFromClass { j: usize, a: Elem },
    /// Remove every base binary tuple containing `a`.
    DropBaseEdges { a: Elem },
    /// Redirect the map at `a`.
    Remap { a: Elem, to: Elem },
    /// Add a base binary tuple.
    AddBaseEdge { sym: usize, a: Elem, b: Elem },
    /// Merge the classes of `a` and `b` under symbol `j`.
    MergeClasses { j: usize, a: Elem, b: Elem },
    /// Flip the unary symbol `sym` at `a`.
    FlipUnary { sym: usize, a: Elem },
}

/// Applies `fault`, keeping the distinguished relations equivalences.
pub fn inject(s: &FiniteStructure, pmap: &[Elem], fault: Fault) -> (FiniteStructure, Vec<Elem>) {
    let mut s = s.clone();
    let mut pmap = pmap.to_vec();
    let sig = s.sig().clone();
    match fault {
        Fault::IsolateFromClass { j, a } => {
            let id = sig.dist_id(j);
            let others: Vec<Elem> = s.successors(id, a).filter(|&b| b != a).collect();
            for b in others {
                s.remove_tuple(id, &[a, b]);
                s.remove_tuple(id, &[b, a]);
            }
        }
        Fault::DropBaseEdges { a } => {
            for id in 0..sig.base().len() {
                if sig.arity(id) == 2 {
                    let ts: Vec<Vec<Elem>> = s
                        .rel(id)
                        .iter()
                        .filter(|t| t[0] != t[1] && t.contains(&a))
                        .cloned()
                        .collect();
                    for t in ts {
                        s.remove_tuple(id, &t);
                    }
                }
            }
        }
        Fault::Remap { a, to } => pmap[a as usize] = to,
        Fault::AddBaseEdge { sym, a, b } => {
            s.add_tuple(sym, vec![a, b]).expect("elements in range");
        }
        Fault::MergeClasses { j, a, b } => {
            s.add_tuple(sig.dist_id(j), vec![a, b]).expect("elements in range");
            s.close_in_place();
        }
        Fault::FlipUnary { sym, a } => {
            if !s.remove_tuple(sym, &[a]) {
                s.add_tuple(sym, vec![a]).expect("element in range");
            }
        }
    }
    (s, pmap)
}
