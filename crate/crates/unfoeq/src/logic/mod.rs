//! Syntax, fragment checks, normalization and the reduction to transitive
//! semantics.

mod formula;
mod fragment;
mod normal_form;
mod parser;
mod reduction;
mod signature;

pub use formula::{Formula, Kind, Var, VarNames};
pub use fragment::{validate_fragment, FragmentReport};
pub use normal_form::{to_normal_form, Conjunct, NormalFormFormula};
pub use parser::{parse_formula, Parsed};
pub use reduction::{reduce_to_transitive, reduce_to_transitive_nf, symmetrize_atoms};
pub use signature::{Signature, SymId};
