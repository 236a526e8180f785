//! Finite structures, closures, atomic types and generalized types.

mod io;
mod pairs;
mod structure;
mod types;

pub use io::load_structure;
pub use pairs::{key_of_type2, PairKey, TypeIndex, TypeInterner};
pub use structure::{Elem, FiniteStructure};
pub use types::{is_safe_reduction, AtomicType1, AtomicType2, GeneralizedType};
