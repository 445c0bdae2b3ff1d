use serde::Serialize;

use super::check::check_prepared;
use super::{Pattern, PatternKind};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::logic::PartitionedFormula;

/// Maximal constant runs of a boolean sequence. `blocks[k]` is the
/// half-open index range of run k and `values[k]` its value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexPartition {
    pub blocks: Vec<(usize, usize)>,
    pub values: Vec<bool>,
}

impl ConvexPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

pub fn alternation(values: &[bool]) -> Result<ConvexPartition> {
    let Some(&first) = values.first() else {
        return Err(Error::EmptySequence);
    };
    let mut out = ConvexPartition {
        blocks: Vec::new(),
        values: vec![first],
    };
    let mut start = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v != values[i - 1] {
            out.blocks.push((start, i));
            out.values.push(*v);
            start = i;
        }
    }
    out.blocks.push((start, values.len()));
    Ok(out)
}

/// From a realization `a` and a parameter sequence along which φ(a, b_q)
/// alternates over k ≥ 2 runs, an IRD pattern of depth k − 1 in S.
///
/// Row i sits at the boundary between runs i and i+1. Its formula is φ or
/// ¬φ, chosen first so that it holds of `a` on run i+1, and its witnesses
/// are the first elements of run i+1 (then, failing that, the last
/// elements of run i). The first combination that verifies is returned.
pub fn ird_from_alternation<C: Context>(
    ctx: &C,
    s: &C::Set,
    a: &[C::Value],
    phi: &PartitionedFormula,
    seq: &[Vec<C::Value>],
    length: usize,
    bound: u64,
) -> Result<Option<Pattern<C::Value>>> {
    let prepared = ctx.prepare(phi)?;
    let values = seq
        .iter()
        .map(|b| ctx.holds(&prepared, a, b))
        .collect::<Result<Vec<_>>>()?;
    let part = alternation(&values)?;
    if part.len() < 2 || length == 0 {
        return Ok(None);
    }
    let depth = part.len() - 1;
    let len = part
        .blocks
        .iter()
        .map(|(lo, hi)| hi - lo)
        .min()
        .unwrap_or(0)
        .min(length);
    let negated = ctx.prepare(&phi.negated())?;
    let options: Vec<Vec<(bool, Vec<Vec<C::Value>>)>> = (0..depth)
        .map(|i| {
            let start = part.blocks[i + 1].0;
            let end = part.blocks[i].1;
            let head: Vec<_> = seq[start..start + len].to_vec();
            let tail: Vec<_> = seq[end - len..end].to_vec();
            let keep = part.values[i + 1];
            vec![
                (keep, head.clone()),
                (keep, tail.clone()),
                (!keep, head),
                (!keep, tail),
            ]
        })
        .collect();
    let mut choice = vec![0usize; depth];
    let mut calls = 0;
    loop {
        let formulas: Vec<&C::Prepared> = choice
            .iter()
            .enumerate()
            .map(|(i, c)| if options[i][*c].0 { &prepared } else { &negated })
            .collect();
        let witnesses: Vec<Vec<Vec<C::Value>>> =
            choice.iter().enumerate().map(|(i, c)| options[i][*c].1.clone()).collect();
        let r = check_prepared(ctx, s, PatternKind::Ird, &formulas, &witnesses, len, bound, &mut calls)?;
        if r.valid {
            let rows = choice
                .iter()
                .enumerate()
                .map(|(i, c)| if options[i][*c].0 { phi.clone() } else { phi.negated() })
                .collect();
            return Pattern::new(PatternKind::Ird, rows, witnesses, len).map(Some);
        }
        let Some(k) = (0..depth).rev().find(|k| choice[*k] + 1 < 4) else {
            return Ok(None);
        };
        choice[k] += 1;
        for c in choice.iter_mut().skip(k + 1) {
            *c = 0;
        }
    }
}
