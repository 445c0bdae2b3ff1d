//! Dense linear orders without endpoints over the rationals.

mod cells;
mod dim;
mod dlo;
mod order;
mod qe;
mod semantics;
mod solver;
mod suite;

pub use cells::{all_cells, cell_count, eval_qf, free_classes, Cell, DloKey, DloSet, Pos};
pub use dim::{dimension, ird_witness_from_dim, Dim, DimMethod, DimensionReport, IrdWitness};
pub use dlo::{DloContext, DloPrepared};
pub use order::{coordinate_pool, coordinate_vars, order_diagrams, product, standard_grid, OrderDiagram, OrderFormula};
pub use qe::{dnf, from_dnf, nnf, normal_dnf, qe_dlo, satisfiable, simplify, Conjunct, OAtom};
pub use semantics::{find_witness, holds, holds_at, Env};
pub use solver::{Operand, OrderProblem};
pub use suite::generated_suite;
