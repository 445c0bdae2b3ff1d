//! O-minimal dimension by diagrams and by projections, and the IRD pattern
//! read off an open box in a projection.

use std::collections::HashSet;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use super::cells::free_classes;
use super::dlo::DloContext;
use super::order::{coordinate_vars, OrderFormula};
use super::semantics::{find_witness, for_each_type};
use crate::error::{Error, Result};
use crate::logic::{Formula, PartitionedFormula, Term};
use crate::patterns::{check_ird, CheckResult, Pattern, PatternKind, DEFAULT_SELECTOR_BOUND};
use crate::context::Context;
use crate::rational::{format_rat, int, ratio, Rat};

/// Dimension of a definable set; the empty set is kept apart from points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Empty,
    Value(usize),
}

impl Dim {
    pub fn value(&self) -> Option<usize> {
        match self {
            Dim::Empty => None,
            Dim::Value(n) => Some(*n),
        }
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Empty => write!(f, "empty"),
            Dim::Value(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::Empty => s.serialize_str("empty"),
            Dim::Value(n) => s.serialize_u64(*n as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DimMethod {
    /// Largest number of free coordinates in a diagram of the set.
    Diagram,
    /// Largest coordinate projection with nonempty interior.
    Projection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub dim: Dim,
    pub method: DimMethod,
    /// The coordinates of the witnessing projection.
    pub coords: Vec<usize>,
    /// An open box inside the projection (projection method only).
    #[serde(rename = "box", serialize_with = "intervals")]
    pub bounds: Vec<(Rat, Rat)>,
}

fn intervals<S: Serializer>(b: &[(Rat, Rat)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for (lo, hi) in b {
        seq.serialize_element(&[format_rat(lo), format_rat(hi)])?;
    }
    seq.end()
}

pub fn dimension(f: &OrderFormula, method: DimMethod) -> Result<DimensionReport> {
    match method {
        DimMethod::Diagram => by_diagrams(f),
        DimMethod::Projection => by_projections(f),
    }
}

fn by_diagrams(f: &OrderFormula) -> Result<DimensionReport> {
    let set = f.set()?;
    let best = set.cells().iter().map(free_classes).max_by_key(|c| c.len());
    Ok(DimensionReport {
        dim: best.as_ref().map_or(Dim::Empty, |c| Dim::Value(c.len())),
        method: DimMethod::Diagram,
        coords: best.unwrap_or_default(),
        bounds: Vec::new(),
    })
}

/// Every `n`-subset of `0..m`, lexicographically.
fn combinations(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..n).collect();
    if n > m {
        return out;
    }
    loop {
        out.push(c.clone());
        let Some(i) = (0..n).rev().find(|i| c[*i] < m - n + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..n {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// A box around `point` avoiding every other listed value: radius a third
/// of the smallest gap.
fn open_box(point: &[Rat], consts: &[Rat]) -> Vec<(Rat, Rat)> {
    let mut all: Vec<&Rat> = point.iter().chain(consts).collect();
    all.sort();
    all.dedup();
    let radius = all
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .map_or(int(1), |d| d * ratio(1, 3));
    point.iter().map(|v| (v - &radius, v + &radius)).collect()
}

/// A projection to J has nonempty interior iff it contains a point whose
/// coordinates avoid each other and the constants: the projection is a
/// union of cells over the constants and such a point's cell is open.
/// Interior passes to subsets of J, so sizes are searched upward and J is
/// tried only when every J minus one coordinate succeeded.
fn by_projections(f: &OrderFormula) -> Result<DimensionReport> {
    let vars = f.vars();
    let m = vars.len();
    if find_witness(f.formula(), vars, &[])?.is_none() {
        return Ok(DimensionReport {
            dim: Dim::Empty,
            method: DimMethod::Projection,
            coords: Vec::new(),
            bounds: Vec::new(),
        });
    }
    let consts = f.constants();
    let mut best = DimensionReport {
        dim: Dim::Value(0),
        method: DimMethod::Projection,
        coords: Vec::new(),
        bounds: Vec::new(),
    };
    let mut open: HashSet<Vec<usize>> = HashSet::from([Vec::new()]);
    for n in 1..=m {
        let mut next = HashSet::new();
        let mut first = None;
        for coords in combinations(m, n) {
            let below = (0..n).all(|d| {
                let mut sub = coords.clone();
                sub.remove(d);
                open.contains(&sub)
            });
            if !below {
                continue;
            }
            if let Some(point) = open_point(f, &coords, &consts)? {
                if first.is_none() {
                    first = Some((coords.clone(), point));
                }
                next.insert(coords);
            }
        }
        let Some((coords, point)) = first else { break };
        best = DimensionReport {
            dim: Dim::Value(n),
            method: DimMethod::Projection,
            bounds: open_box(&point, &consts),
            coords,
        };
        open = next;
    }
    Ok(best)
}

/// A point of the projection to `coords` with pairwise distinct
/// coordinates avoiding the constants.
fn open_point(f: &OrderFormula, coords: &[usize], consts: &[Rat]) -> Result<Option<Vec<Rat>>> {
    let mut found = None;
    for_each_type(consts, coords.len(), true, |point| {
        let fixed: Vec<(usize, Rat)> = coords.iter().copied().zip(point.iter().cloned()).collect();
        if find_witness(f.formula(), f.vars(), &fixed)?.is_some() {
            found = Some(point);
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

/// An IRD pattern of depth dim(X) inside X together with its check.
#[derive(Debug, Clone)]
pub struct IrdWitness {
    pub pattern: Pattern<Rat>,
    pub report: DimensionReport,
    pub check: CheckResult,
}

/// With J and the box B from the projection method: row i is
/// ψ_i(x; y) = x_{J_i} < y_{J_i} with y ranging over ℚ^m, and b_{j,i} is a
/// point of X whose J-projection is the grid point σ(0, …, j, …, 0) of B
/// (coordinate i at step j). Any x ∈ X over B with x_{J_i} between
/// consecutive steps realizes each threshold selector.
pub fn ird_witness_from_dim(f: &OrderFormula, length: usize) -> Result<Option<IrdWitness>> {
    let report = dimension(f, DimMethod::Projection)?;
    let n = match report.dim {
        Dim::Value(n) if n > 0 => n,
        _ => return Ok(None),
    };
    let m = f.arity();
    let vars = f.vars().to_vec();
    let params: Vec<String> = (0..m).map(|i| format!("y{i}")).collect();
    let x = f.renamed(&coordinate_vars(m))?;
    let steps = length as i64 + 2;
    let level = |i: usize, k: i64| {
        let (lo, hi) = &report.bounds[i];
        lo + (hi - lo) * ratio(k + 1, steps)
    };
    let mut formulas = Vec::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for (i, &c) in report.coords.iter().enumerate() {
        let body = Formula::lt(Term::var(&x.vars()[c]), Term::var(&params[c]));
        formulas.push(PartitionedFormula::new(body, x.vars().to_vec(), params.clone())?);
        let mut row = Vec::with_capacity(length);
        for j in 0..length as i64 {
            let fixed: Vec<(usize, Rat)> = report
                .coords
                .iter()
                .enumerate()
                .map(|(l, &cl)| (cl, level(l, if l == i { j } else { 0 })))
                .collect();
            let b = find_witness(f.formula(), &vars, &fixed)?
                .ok_or_else(|| Error::InvalidFormula("box point has no lift to the set".into()))?;
            row.push(b);
        }
        witnesses.push(row);
    }
    let pattern = Pattern::new(PatternKind::Ird, formulas, witnesses, length)?;
    let ctx = DloContext::new();
    let s = ctx.define(x.formula(), x.vars())?;
    let check = check_ird(&ctx, &s, &pattern, DEFAULT_SELECTOR_BOUND)?;
    Ok(Some(IrdWitness { pattern, report, check }))
}
