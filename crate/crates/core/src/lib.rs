//! Computational tools for op-rank and op-dimension.
//!
//! The crate is organized around one satisfiability interface,
//! [`Context`], implemented both by finite relational structures
//! ([`FiniteContext`]) and by the symbolic dense linear order
//! ([`ominimal::DloContext`]). The rank calculators in [`ranks`] and the
//! pattern machinery in [`patterns`] are written against that trait, so
//! every computation runs unchanged over either kind of context.
//!
//! - [`logic`]: signatures, finite structures, the formula DSL, evaluation.
//! - [`multiorder`]: finite n-multi-orders, multi-cuts, amalgamation and
//!   generic generation, grid embeddings, multi-order property witnesses.
//! - [`ranks`]: Shelah 2-rank, `opR_n`, Γ-systems, op-dimension.
//! - [`patterns`]: IRD- and ICT-patterns, search, alternation.
//! - [`ominimal`]: quantifier elimination for (ℚ,<), order diagrams and
//!   o-minimal dimension.

pub mod context;
pub mod error;
pub mod logic;
pub mod multiorder;
pub mod ominimal;
pub mod patterns;
pub mod ranks;
pub mod rational;

pub use context::{Context, FiniteContext, Literal};
pub use error::{Error, Result};
pub use logic::{
    DefinableSubset, FiniteStructure, Formula, FormulaSet, PartitionedFormula, Signature, SignVector, Term,
};
pub use multiorder::{MultiCut, MultiOrder};
pub use ominimal::{DloContext, DloSet, OrderFormula};
pub use patterns::{Pattern, PatternKind};
pub use ranks::RankValue;
pub use rational::Rat;
