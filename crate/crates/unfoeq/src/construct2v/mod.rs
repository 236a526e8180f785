//! Finite models for two-variable normal forms: layered components over
//! generalized types, joined in two colors and pruned to what is reachable
//! from the start element.

mod component;
mod conditions;
pub mod faults;
mod join;
mod pattern;

pub use component::PatternComponent;
pub use conditions::{ConditionReport, ConditionResult};
pub use join::{induces_copy, join_components, Assembly, ComponentIndex, Join};
pub use pattern::{Built, Pattern};

use crate::logic::NormalFormFormula;
use crate::structures::{Elem, FiniteStructure};
use crate::Result;

/// Result of a full run with every distinguished symbol in `eqs0`.
#[derive(Debug, Clone)]
pub struct Construction {
    pub structure: FiniteStructure,
    pub pmap: Vec<Elem>,
    pub report: ConditionReport,
    /// Number of realized generalized types of the pattern.
    pub num_gtypes: usize,
}

/// Builds a model of `nf` from the finite model `pattern`, starting at `a0`,
/// and checks the structure-level conditions on the result.
pub fn construct(
    pattern: &FiniteStructure,
    nf: &NormalFormFormula,
    a0: Elem,
) -> Result<Construction> {
    let mut pat = Pattern::new(pattern, nf)?;
    let all = pat.all_mask();
    let built = pat.build_b0(a0, all)?;
    let report = pat.verify_b_conditions(&built.structure, &built.pmap, a0, all)?;
    Ok(Construction {
        structure: built.structure.clone(),
        pmap: built.pmap.clone(),
        report,
        num_gtypes: pat.num_gtypes(),
    })
}

/// `build_b0` as a free function over a fresh pattern context.
pub fn build_b0(
    pattern: &FiniteStructure,
    nf: &NormalFormFormula,
    a0: Elem,
    eqs0: u32,
) -> Result<Built> {
    let mut pat = Pattern::new(pattern, nf)?;
    Ok(pat.build_b0(a0, eqs0)?.as_ref().clone())
}

#[cfg(test)]
mod tests;
