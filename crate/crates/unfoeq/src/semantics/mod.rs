//! Evaluation, witness structures, homomorphism search and the
//! homomorphism criterion for modelhood.

mod eval;
mod hom;
mod hom_criterion;
mod witness;

pub use eval::{
    any_tuple, check_model, check_model_transitive, evaluate, has_witness, least_witness,
    model_failure, universal_violation, Assignment,
};
pub(crate) use eval::eval_rec;
pub use hom::{find_homomorphism, is_homomorphism, HomConstraint};
pub use hom_criterion::{check_model_by_homomorphisms, HomCriterionReport};
pub use witness::{find_witnesses, phi_witness_structure, WitnessStructure};
