use serde::Serialize;

use super::{Pattern, PatternKind};
use crate::context::{Context, Literal};
use crate::error::{Error, Result};

/// Selector enumeration stops with an error beyond this many selectors.
pub const DEFAULT_SELECTOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub valid: bool,
    /// The first selector (in lexicographic order) whose type is
    /// inconsistent.
    pub failing: Option<Vec<usize>>,
    pub selectors_checked: u64,
}

/// `length^depth`, or an overflow error beyond `bound`.
pub fn selector_count(depth: usize, length: usize, bound: u64) -> Result<u64> {
    let mut total: u128 = 1;
    for _ in 0..depth {
        total *= length as u128;
        if total > bound as u128 {
            return Err(Error::SearchOverflow {
                what: "pattern selectors",
                size: (length as u128).saturating_pow(depth as u32),
                bound: bound as u128,
            });
        }
    }
    Ok(total as u64)
}

pub(crate) fn positive(kind: PatternKind, j: usize, f: usize) -> bool {
    match kind {
        PatternKind::Ird => j >= f,
        PatternKind::Ict => j == f,
    }
}

/// Consistency of the type of every selector f : depth → length, with
/// S as the base.
pub fn check_pattern<C: Context>(
    ctx: &C,
    s: &C::Set,
    p: &Pattern<C::Value>,
    bound: u64,
) -> Result<CheckResult> {
    let prepared = p.formulas.iter().map(|f| ctx.prepare(f)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&C::Prepared> = prepared.iter().collect();
    let mut calls = 0;
    check_prepared(ctx, s, p.kind, &refs, &p.witnesses, p.length, bound, &mut calls)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn check_prepared<C: Context>(
    ctx: &C,
    s: &C::Set,
    kind: PatternKind,
    formulas: &[&C::Prepared],
    witnesses: &[Vec<Vec<C::Value>>],
    length: usize,
    bound: u64,
    calls: &mut u64,
) -> Result<CheckResult> {
    let depth = formulas.len();
    let total = selector_count(depth, length, bound)?;
    let mut f = vec![0usize; depth];
    let mut checked = 0;
    for _ in 0..total {
        let mut lits = Vec::with_capacity(depth * length);
        for i in 0..depth {
            for j in 0..length {
                lits.push(Literal::new(formulas[i], witnesses[i][j].clone(), positive(kind, j, f[i])));
            }
        }
        checked += 1;
        *calls += 1;
        if ctx.satisfy(s, &lits)?.is_none() {
            return Ok(CheckResult {
                valid: false,
                failing: Some(f),
                selectors_checked: checked,
            });
        }
        for k in (0..depth).rev() {
            f[k] += 1;
            if f[k] < length {
                break;
            }
            f[k] = 0;
        }
    }
    Ok(CheckResult {
        valid: true,
        failing: None,
        selectors_checked: checked,
    })
}

fn expect_kind<V>(p: &Pattern<V>, kind: PatternKind) -> Result<()> {
    if p.kind != kind {
        return Err(Error::InvalidFormula(format!("expected an {kind:?} pattern, got {:?}", p.kind)));
    }
    Ok(())
}

pub fn check_ird<C: Context>(ctx: &C, s: &C::Set, p: &Pattern<C::Value>, bound: u64) -> Result<CheckResult> {
    expect_kind(p, PatternKind::Ird)?;
    check_pattern(ctx, s, p, bound)
}

pub fn check_ict<C: Context>(ctx: &C, s: &C::Set, p: &Pattern<C::Value>, bound: u64) -> Result<CheckResult> {
    expect_kind(p, PatternKind::Ict)?;
    check_pattern(ctx, s, p, bound)
}
