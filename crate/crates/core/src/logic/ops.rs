use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use super::eval::{instance_with, Compiled};
use super::formula::{fresh_name, Formula, FormulaSet, PartitionedFormula, Term};
use super::structure::{decode, FiniteStructure};
use crate::error::{Error, Result};

/// ψ(x; y_0 … y_{k-1}) holding iff evenly many of φ(x, y_i) hold.
///
/// The parameter block of the i-th copy is φ's parameter tuple with every
/// name suffixed by `_i`.
pub fn parity_combine(phi: &PartitionedFormula, k: usize) -> Result<PartitionedFormula> {
    if k == 0 {
        return Err(Error::InvalidFormula("parity of zero instances".into()));
    }
    let mut used: BTreeSet<String> = phi.body().all_vars();
    used.extend(phi.object_vars().iter().cloned());
    let mut copies = Vec::with_capacity(k);
    let mut params = Vec::new();
    for i in 0..k {
        let names: Vec<String> = phi
            .param_vars()
            .iter()
            .map(|y| {
                let n = fresh_name(&format!("{y}_{i}"), &used);
                used.insert(n.clone());
                n
            })
            .collect();
        let map: HashMap<String, String> = phi
            .param_vars()
            .iter()
            .cloned()
            .zip(names.iter().cloned())
            .collect();
        copies.push(phi.body().rename(&map));
        params.extend(names);
    }
    // (even, odd) for the suffix starting at i.
    let (mut even, mut odd) = (Formula::True, Formula::False);
    for c in copies.into_iter().rev() {
        let e = Formula::or(
            Formula::and(c.clone(), odd.clone()),
            Formula::and(Formula::not(c.clone()), even.clone()),
        );
        let o = Formula::or(
            Formula::and(c.clone(), even),
            Formula::and(Formula::not(c), odd),
        );
        even = e;
        odd = o;
    }
    PartitionedFormula::new(even, phi.object_vars().to_vec(), params)
}

/// The single formula φ_Δ(x; z, w) = ⋁_k (w = code_k ∧ θ_k(x, z)).
///
/// Codes are tuples of length ⌈log₂|Δ|⌉ over the first two elements of `m`;
/// z is as long as the longest parameter tuple in Δ.
pub fn encode_delta(delta: &FormulaSet, m: &FiniteStructure) -> Result<PartitionedFormula> {
    let first = &delta.formulas()[0];
    if delta.len() == 1 {
        return Ok(first.clone());
    }
    if m.size() < 2 {
        return Err(Error::InsufficientCodes {
            universe: m.size(),
            formulas: delta.len(),
        });
    }
    let x = first.object_vars().to_vec();
    let mut used: BTreeSet<String> = x.iter().cloned().collect();
    for f in delta.formulas() {
        used.extend(f.body().all_vars());
    }
    let width = delta.formulas().iter().map(|f| f.param_arity()).max().unwrap_or(0);
    let bits = usize::BITS - (delta.len() - 1).leading_zeros();
    let mut fresh = |base: String| {
        let n = fresh_name(&base, &used);
        used.insert(n.clone());
        n
    };
    let z: Vec<String> = (0..width).map(|i| fresh(format!("z{i}"))).collect();
    let w: Vec<String> = (0..bits).map(|i| fresh(format!("w{i}"))).collect();
    let code_elem = [m.universe()[0].clone(), m.universe()[1].clone()];
    let mut disjuncts = Vec::new();
    for (k, theta) in delta.formulas().iter().enumerate() {
        let renamed = theta.renamed(&x, &z[..theta.param_arity()])?;
        let selector = Formula::conjunction(w.iter().enumerate().map(|(j, wj)| {
            Formula::Eq(Term::var(wj), Term::Elem(code_elem[k >> j & 1].clone()))
        }));
        disjuncts.push(Formula::and(selector, renamed.body().clone()));
    }
    PartitionedFormula::new(
        Formula::disjunction(disjuncts),
        x,
        z.into_iter().chain(w).collect(),
    )
}

/// The largest |B| ≤ `max_b` with B ⊆ M^|y| shattered by φ, i.e. with all
/// 2^|B| φ-types over B realized.
pub fn independence_dimension(m: &FiniteStructure, phi: &PartitionedFormula, max_b: usize) -> Result<usize> {
    let c = Compiled::new(m, phi.body(), &phi.all_free())?;
    let n = m.size();
    let p = phi.param_arity();
    let count = n.checked_pow(p as u32).ok_or(Error::SearchOverflow {
        what: "parameter tuples",
        size: u128::MAX,
        bound: usize::MAX as u128,
    })?;
    let mut seen = HashSet::new();
    let mut columns: Vec<FixedBitSet> = Vec::new();
    for code in 0..count {
        let b = decode(n, p, code);
        let col = instance_with(m, &c, phi.object_arity(), &b)?.bits().clone();
        if seen.insert(col.clone()) {
            columns.push(col);
        }
    }
    let Some(all) = columns.first().map(|c| {
        let mut full = FixedBitSet::with_capacity(c.len());
        full.insert_range(..);
        full
    }) else {
        return Ok(0);
    };
    if all.is_clear() {
        return Ok(0);
    }
    let mut best = 0;
    shatter(&columns, 0, &[all], 0, max_b, &mut best);
    Ok(best)
}

fn shatter(
    columns: &[FixedBitSet],
    start: usize,
    cells: &[FixedBitSet],
    depth: usize,
    max_b: usize,
    best: &mut usize,
) {
    *best = (*best).max(depth);
    if depth == max_b || *best == max_b {
        return;
    }
    for (i, col) in columns.iter().enumerate().skip(start) {
        // Shattering is hereditary, so the remaining columns bound the depth.
        if depth + (columns.len() - i) <= *best {
            return;
        }
        let mut next = Vec::with_capacity(cells.len() * 2);
        let mut ok = true;
        for cell in cells {
            let mut inside = cell.clone();
            inside.intersect_with(col);
            let mut outside = cell.clone();
            outside.difference_with(col);
            if inside.is_clear() || outside.is_clear() {
                ok = false;
                break;
            }
            next.push(inside);
            next.push(outside);
        }
        if ok {
            shatter(columns, i + 1, &next, depth + 1, max_b, best);
        }
    }
}
