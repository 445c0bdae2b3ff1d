//! IRD and ICT patterns: checking, the IRD→ICT transform, searches over
//! finite witness grids, and alternation of boolean sequences.

mod alternation;
mod check;
mod search;
mod transform;

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::logic::{parse_partitioned, PartitionedFormula};

pub use alternation::{alternation, ird_from_alternation, ConvexPartition};
pub use check::{check_ict, check_ird, check_pattern, selector_count, CheckResult, DEFAULT_SELECTOR_BOUND};
pub use search::{dp_rank_lower, search_ict, search_ird, search_pattern, DpRankLower, SearchOutcome, SearchStats};
pub use transform::ird_to_ict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    /// Threshold selectors: ψ_i(x, b_{j,i}) holds iff j ≥ f(i).
    Ird,
    /// Single-hit selectors: ψ_i(x, b_{j,i}) holds iff j = f(i).
    Ict,
}

/// A finite pattern of depth `formulas.len()` and length `length`.
///
/// `witnesses[i][j]` is the parameter tuple b_{j,i} of row i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern<V> {
    pub kind: PatternKind,
    pub formulas: Vec<PartitionedFormula>,
    pub witnesses: Vec<Vec<Vec<V>>>,
    pub length: usize,
}

impl<V> Pattern<V> {
    pub fn new(
        kind: PatternKind,
        formulas: Vec<PartitionedFormula>,
        witnesses: Vec<Vec<Vec<V>>>,
        length: usize,
    ) -> Result<Self> {
        if formulas.len() != witnesses.len() {
            return Err(Error::InvalidFormula(format!(
                "{} formulas but {} witness rows",
                formulas.len(),
                witnesses.len()
            )));
        }
        if let Some(f) = formulas.first() {
            if formulas.iter().any(|g| g.object_arity() != f.object_arity()) {
                return Err(Error::InvalidFormula("pattern rows disagree on the object sort".into()));
            }
        }
        for (i, (f, row)) in formulas.iter().zip(&witnesses).enumerate() {
            if row.len() != length {
                return Err(Error::InvalidFormula(format!(
                    "row {i} has {} witnesses, expected {length}",
                    row.len()
                )));
            }
            if row.iter().any(|b| b.len() != f.param_arity()) {
                return Err(Error::InvalidFormula(format!(
                    "row {i}: witnesses must have {} coordinates",
                    f.param_arity()
                )));
            }
        }
        Ok(Pattern {
            kind,
            formulas,
            witnesses,
            length,
        })
    }

    pub fn depth(&self) -> usize {
        self.formulas.len()
    }

    /// The same pattern without row `i`.
    pub fn drop_row(&self, i: usize) -> Self
    where
        V: Clone,
    {
        let mut p = self.clone();
        p.formulas.remove(i);
        p.witnesses.remove(i);
        p
    }
}

/// The JSON form of a pattern. Formulas are DSL strings read with the
/// listed object and parameter variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub kind: PatternKind,
    pub depth: usize,
    pub length: usize,
    pub object_vars: Vec<String>,
    pub param_vars: Vec<Vec<String>>,
    pub formulas: Vec<String>,
    pub witnesses: Vec<Vec<Vec<String>>>,
}

impl<V> Pattern<V> {
    pub fn to_file<C: Context<Value = V>>(&self, ctx: &C) -> PatternFile {
        PatternFile {
            kind: self.kind,
            depth: self.depth(),
            length: self.length,
            object_vars: self
                .formulas
                .first()
                .map(|f| f.object_vars().to_vec())
                .unwrap_or_default(),
            param_vars: self.formulas.iter().map(|f| f.param_vars().to_vec()).collect(),
            formulas: self.formulas.iter().map(|f| f.body().to_string()).collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|row| row.iter().map(|b| b.iter().map(|v| ctx.render(v)).collect()).collect())
                .collect(),
        }
    }

    pub fn from_file<C: Context<Value = V>>(ctx: &C, file: &PatternFile) -> Result<Self> {
        if file.formulas.len() != file.depth || file.param_vars.len() != file.depth {
            return Err(Error::InvalidFormula("pattern depth disagrees with its rows".into()));
        }
        let formulas = file
            .formulas
            .iter()
            .zip(&file.param_vars)
            .map(|(text, y)| parse_partitioned(text, ctx.signature(), &file.object_vars, Some(y)))
            .collect::<Result<Vec<_>>>()?;
        let witnesses = file
            .witnesses
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| b.iter().map(|v| ctx.parse_value(v)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(file.kind, formulas, witnesses, file.length)
    }

    pub fn to_json<C: Context<Value = V>>(&self, ctx: &C) -> String {
        serde_json::to_string_pretty(&self.to_file(ctx)).expect("pattern serializes")
    }

    pub fn from_json<C: Context<Value = V>>(ctx: &C, text: &str) -> Result<Self> {
        let file: PatternFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidFormula(format!("pattern JSON: {e}")))?;
        Pattern::from_file(ctx, &file)
    }
}
