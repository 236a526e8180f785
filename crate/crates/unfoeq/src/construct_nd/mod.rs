//! Finite models for normal forms of any width: the pattern model is read as
//! a regular tree-like model (fixed witness choices, numbered by W symbols),
//! and layered components over its subtree types are built by recursion on
//! the live equivalences, joined along interface elements and closed.

mod component;
mod conditions;
pub mod faults;
mod regular;

pub use component::{join_nd_components, CopyIndex, NdAssembly, NdBuilt, NdComponent, NdPattern};
pub use conditions::{
    separation_check, separation_check_exhaustive, target_depth, verify_d_conditions,
    verify_d_conditions_exhaustive,
};
pub use regular::{
    regularize, tree_like_report, unravel_from, unravel_truncated, RegularTreeModel, TreeLikeReport,
    TreeNode, Unraveling,
};

use std::rc::Rc;

use crate::construct2v::ConditionReport;
use crate::structures::FiniteStructure;
use crate::{Error, Result};

/// Builds the structure for node `a0` with live symbols `eqs0`; the map sends
/// elements to nodes read from the same root as `a0`.
pub fn build_a0prime(r: &RegularTreeModel, a0: &TreeNode, eqs0: u32) -> Result<NdBuilt> {
    let mut pat = NdPattern::new(Rc::new(r.clone()));
    build_with(&mut pat, a0, eqs0)
}

/// [`build_a0prime`] inside an existing context (to reuse its memo or its
/// component log).
pub fn build_with(pat: &mut NdPattern, a0: &TreeNode, eqs0: u32) -> Result<NdBuilt> {
    let r = pat.model();
    if !r.base().elements().any(|root| r.is_valid_node(root, a0)) {
        return Err(Error::Invalid(format!("node {a0:?} is not in the unraveling")));
    }
    let b = pat.build(a0.anchor, eqs0)?;
    Ok(NdBuilt {
        structure: b.structure.clone(),
        origin: b.origin,
        pmap: b.pmap.iter().map(|p| a0.extend(p)).collect(),
    })
}

/// Result of a full run with every distinguished symbol live.
#[derive(Debug, Clone)]
pub struct NdConstruction {
    pub built: NdBuilt,
    /// The result over the base signature.
    pub structure: FiniteStructure,
    pub report: ConditionReport,
    pub num_subtree_types: usize,
}

/// Regularizes `base`, builds from the root node with anchor `a0` and checks
/// d1-d5.
pub fn construct_nd(
    base: &FiniteStructure,
    nf: &crate::NormalFormFormula,
    a0: crate::structures::Elem,
) -> Result<NdConstruction> {
    let r = regularize(base, nf)?;
    let node = TreeNode::root(a0);
    let all = (1u32 << r.base().sig().k()) - 1;
    let built = build_a0prime(&r, &node, all)?;
    let report = verify_d_conditions(&r, &built, &node, all, nf.t, target_depth(&r))?;
    let structure = built.structure.project(base.sig())?;
    Ok(NdConstruction {
        built,
        structure,
        report,
        num_subtree_types: r.num_subtree_types(),
    })
}

#[cfg(test)]
mod tests;
