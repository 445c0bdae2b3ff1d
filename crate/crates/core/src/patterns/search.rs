use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::check::{check_prepared, DEFAULT_SELECTOR_BOUND};
use super::{Pattern, PatternKind};
use crate::context::Context;
use crate::error::Result;
use crate::logic::PartitionedFormula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<V> {
    Found(Pattern<V>),
    /// Every candidate over the grid was refuted.
    NoneExhaustive,
    /// The consistency-check budget ran out first.
    NoneBudget,
}

impl<V> SearchOutcome<V> {
    pub fn found(&self) -> Option<&Pattern<V>> {
        match self {
            SearchOutcome::Found(p) => Some(p),
            _ => None,
        }
    }

    /// "found", "none_exhaustive" or "none_budget".
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::NoneExhaustive => "none_exhaustive",
            SearchOutcome::NoneBudget => "none_budget",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Distinct candidate rows (up to the traces of their instances).
    pub rows: usize,
    /// Rows that are patterns of depth 1 on their own.
    pub valid_rows: usize,
    pub consistency_checks: u64,
}

struct OutOfBudget;

struct Search<'a, C: Context> {
    ctx: &'a C,
    s: &'a C::Set,
    kind: PatternKind,
    length: usize,
    budget: u64,
    calls: u64,
    prepared: Vec<C::Prepared>,
    /// (formula, witnesses) of every depth-1 row.
    rows: Vec<(usize, Vec<Vec<C::Value>>)>,
    compat: Vec<u8>,
}

impl<C: Context> Search<'_, C> {
    fn check(&mut self, rows: &[usize]) -> Result<std::result::Result<bool, OutOfBudget>> {
        if self.calls >= self.budget {
            return Ok(Err(OutOfBudget));
        }
        let formulas: Vec<&C::Prepared> = rows.iter().map(|r| &self.prepared[self.rows[*r].0]).collect();
        let witnesses: Vec<Vec<Vec<C::Value>>> = rows.iter().map(|r| self.rows[*r].1.clone()).collect();
        let r = check_prepared(
            self.ctx,
            self.s,
            self.kind,
            &formulas,
            &witnesses,
            self.length,
            DEFAULT_SELECTOR_BOUND,
            &mut self.calls,
        )?;
        Ok(Ok(r.valid))
    }

    fn compatible(&mut self, a: usize, b: usize) -> Result<std::result::Result<bool, OutOfBudget>> {
        let n = self.rows.len();
        let (a, b) = (a.min(b), a.max(b));
        match self.compat[a * n + b] {
            1 => return Ok(Ok(true)),
            2 => return Ok(Ok(false)),
            _ => {}
        }
        let ok = match self.check(&[a, b])? {
            Ok(ok) => ok,
            Err(e) => return Ok(Err(e)),
        };
        self.compat[a * n + b] = if ok { 1 } else { 2 };
        Ok(Ok(ok))
    }

    fn extend(&mut self, chosen: &mut Vec<usize>, depth: usize) -> Result<std::result::Result<bool, OutOfBudget>> {
        if chosen.len() == depth {
            return Ok(Ok(true));
        }
        let start = chosen.last().copied().unwrap_or(0);
        'next: for r in start..self.rows.len() {
            for c in chosen.clone() {
                match self.compatible(c, r)? {
                    Ok(true) => {}
                    Ok(false) => continue 'next,
                    Err(e) => return Ok(Err(e)),
                }
            }
            chosen.push(r);
            if chosen.len() >= 3 {
                match self.check(chosen)? {
                    Ok(true) => {}
                    Ok(false) => {
                        chosen.pop();
                        continue;
                    }
                    Err(e) => return Ok(Err(e)),
                }
            }
            match self.extend(chosen, depth)? {
                Ok(true) => return Ok(Ok(true)),
                Ok(false) => {}
                Err(e) => return Ok(Err(e)),
            }
            chosen.pop();
        }
        Ok(Ok(false))
    }
}

/// Every tuple of `arity` grid values, lexicographically.
fn tuples<V: Clone>(grid: &[V], arity: usize) -> Vec<Vec<V>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                grid.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Looks for a pattern of the given shape whose formulas come from `pool`
/// and whose witnesses are tuples over `grid`. `budget` bounds the number
/// of consistency checks.
#[allow(clippy::too_many_arguments)]
pub fn search_pattern<C: Context>(
    ctx: &C,
    s: &C::Set,
    kind: PatternKind,
    pool: &[PartitionedFormula],
    depth: usize,
    length: usize,
    grid: &[C::Value],
    budget: u64,
) -> Result<(SearchOutcome<C::Value>, SearchStats)> {
    let mut stats = SearchStats::default();
    if depth == 0 {
        stats.consistency_checks = 1;
        let outcome = match ctx.satisfy(s, &[])? {
            Some(_) => SearchOutcome::Found(Pattern::new(kind, Vec::new(), Vec::new(), length)?),
            None => SearchOutcome::NoneExhaustive,
        };
        return Ok((outcome, stats));
    }
    let prepared = pool.iter().map(|f| ctx.prepare(f)).collect::<Result<Vec<_>>>()?;
    let mut search = Search {
        ctx,
        s,
        kind,
        length,
        budget,
        calls: 0,
        prepared,
        rows: Vec::new(),
        compat: Vec::new(),
    };
    // Candidate rows, one per distinct sequence of instance traces.
    let mut ids: HashMap<C::Set, usize> = HashMap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut exhausted_budget = false;
    'formulas: for (k, f) in pool.iter().enumerate() {
        let params = tuples(grid, f.param_arity());
        let mut inst = Vec::with_capacity(params.len());
        for b in &params {
            let set = ctx.intersect(s, &ctx.instance(&search.prepared[k], b)?);
            let next = ids.len();
            inst.push(*ids.entry(set).or_insert(next));
        }
        let mut idx = vec![0usize; length];
        if params.is_empty() && length > 0 {
            continue;
        }
        loop {
            let key: Vec<usize> = idx.iter().map(|i| inst[*i]).collect();
            if seen.insert(key) {
                stats.rows += 1;
                let row = (k, idx.iter().map(|i| params[*i].clone()).collect());
                search.rows.push(row);
                let r = search.rows.len() - 1;
                match search.check(&[r])? {
                    Ok(true) => {}
                    Ok(false) => {
                        search.rows.pop();
                    }
                    Err(OutOfBudget) => {
                        search.rows.pop();
                        exhausted_budget = true;
                        break 'formulas;
                    }
                }
            }
            let Some(p) = (0..length).rev().find(|p| idx[*p] + 1 < params.len()) else {
                break;
            };
            idx[p] += 1;
            for q in idx.iter_mut().skip(p + 1) {
                *q = 0;
            }
        }
    }
    stats.valid_rows = search.rows.len();
    let n = search.rows.len();
    search.compat = vec![0; n * n];
    let mut chosen = Vec::new();
    let found = match search.extend(&mut chosen, depth)? {
        Ok(found) => found,
        Err(OutOfBudget) => {
            exhausted_budget = true;
            false
        }
    };
    stats.consistency_checks = search.calls;
    let outcome = if found {
        let formulas = chosen.iter().map(|r| pool[search.rows[*r].0].clone()).collect();
        let witnesses = chosen.iter().map(|r| search.rows[*r].1.clone()).collect();
        SearchOutcome::Found(Pattern::new(kind, formulas, witnesses, length)?)
    } else if exhausted_budget {
        SearchOutcome::NoneBudget
    } else {
        SearchOutcome::NoneExhaustive
    };
    Ok((outcome, stats))
}

pub fn search_ird<C: Context>(
    ctx: &C,
    s: &C::Set,
    pool: &[PartitionedFormula],
    depth: usize,
    length: usize,
    grid: &[C::Value],
    budget: u64,
) -> Result<(SearchOutcome<C::Value>, SearchStats)> {
    search_pattern(ctx, s, PatternKind::Ird, pool, depth, length, grid, budget)
}

pub fn search_ict<C: Context>(
    ctx: &C,
    s: &C::Set,
    pool: &[PartitionedFormula],
    depth: usize,
    length: usize,
    grid: &[C::Value],
    budget: u64,
) -> Result<(SearchOutcome<C::Value>, SearchStats)> {
    search_pattern(ctx, s, PatternKind::Ict, pool, depth, length, grid, budget)
}

/// The largest depth d ≤ cap at which an ICT pattern of the given length
/// was found, with the search outcome at depth d + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpRankLower<V> {
    pub value: usize,
    pub pattern: Option<Pattern<V>>,
    /// Outcome label of the first failing depth, or "cap" if every depth
    /// up to the cap succeeded.
    pub stopped: &'static str,
}

pub fn dp_rank_lower<C: Context>(
    ctx: &C,
    s: &C::Set,
    pool: &[PartitionedFormula],
    length: usize,
    grid: &[C::Value],
    cap: usize,
    budget: u64,
) -> Result<DpRankLower<C::Value>> {
    let mut out = DpRankLower {
        value: 0,
        pattern: None,
        stopped: "cap",
    };
    for d in 1..=cap {
        let (outcome, _) = search_ict(ctx, s, pool, d, length, grid, budget)?;
        match outcome {
            SearchOutcome::Found(p) => {
                out.value = d;
                out.pattern = Some(p);
            }
            other => {
                out.stopped = other.label();
                break;
            }
        }
    }
    Ok(out)
}
