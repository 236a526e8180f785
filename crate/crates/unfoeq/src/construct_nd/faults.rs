//! Deliberate corruptions of a built structure, for testing the checkers.

use super::component::NdBuilt;
use super::regular::RegularTreeModel;
use crate::structures::Elem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NdFault {
    /// Remove the `W_i` edge (0-based `i`) leaving `a`.
    DropWitnessEdge { a: Elem, i: usize },
    /// Send `a` to another anchor (path kept).
    Remap { a: Elem, anchor: Elem },
    /// Separate `a` from every other element in all distinguished relations.
    Isolate { a: Elem },
    /// Add a base tuple.
    AddBaseEdge { sym: String, a: Elem, b: Elem },
}

pub fn inject(r: &RegularTreeModel, b: &NdBuilt, fault: &NdFault) -> NdBuilt {
    let mut out = b.clone();
    let s = &mut out.structure;
    match fault {
        NdFault::DropWitnessEdge { a, i } => {
            let id = s.sig().id(r.w_name(*i)).expect("W symbol");
            let succ: Vec<Elem> = s.successors(id, *a).collect();
            for c in succ {
                s.remove_tuple(id, &[*a, c]);
            }
        }
        NdFault::Remap { a, anchor } => out.pmap[*a as usize].anchor = *anchor,
        NdFault::Isolate { a } => {
            for j in 0..s.sig().k() {
                let id = s.sig().dist_id(j);
                for c in s.elements() {
                    if c != *a {
                        s.remove_tuple(id, &[*a, c]);
                        s.remove_tuple(id, &[c, *a]);
                    }
                }
            }
        }
        NdFault::AddBaseEdge { sym, a, b } => {
            s.add_named(sym, vec![*a, *b]).expect("binary base symbol");
        }
    }
    out
}
