//! Finite-model workbench for the unary negation fragment of first-order
//! logic extended with equivalence relations.
//!
//! The crate covers parsing and fragment checks, Scott-style normalization,
//! finite structures and their types, evaluation and homomorphism search,
//! a bounded model finder, and the two small-model constructions (the
//! two-variable case and the general case) together with checkers for
//! their correctness conditions.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod construct2v;
pub mod construct_nd;
pub mod error;
pub mod generate;
pub mod logic;
pub mod modelfinder;
pub mod semantics;
pub mod structures;

pub use error::{Error, Result};
pub use logic::{
    Conjunct, Formula, FragmentReport, Kind, NormalFormFormula, Signature, Var, VarNames,
};
pub use structures::{AtomicType1, AtomicType2, FiniteStructure, GeneralizedType};
