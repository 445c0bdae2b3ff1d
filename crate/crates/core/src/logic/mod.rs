//! First-order substrate: signatures, finite structures, the formula DSL,
//! evaluation and solution enumeration.

mod eval;
mod formula;
mod ops;
mod parser;
mod signature;
mod structure;

pub use eval::{evaluate, solution_set, solutions, Compiled, DefinableSubset};
pub(crate) use eval::instance_with;
pub use formula::{FormulaSet, Formula, PartitionedFormula, SignVector, Term};
pub(crate) use formula::fresh_name;
pub use ops::{encode_delta, independence_dimension, parity_combine};
pub use parser::{parse_formula, parse_partitioned};
pub use signature::Signature;
pub use structure::{FiniteStructure, StructureFile, DEFAULT_MAX_UNIVERSE};
