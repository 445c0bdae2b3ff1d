//! Checking that a map from a multi-order into a structure, with a
//! formula φ(x; y), makes every multi-cut definable.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{enumerate_multicuts, MultiCut, MultiOrder};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::logic::PartitionedFormula;

/// g sends element e of `source` to the tuple `g[e]`.
#[derive(Debug, Clone)]
pub struct PictureWitness<V> {
    pub source: MultiOrder,
    pub g: Vec<Vec<V>>,
    pub phi: PartitionedFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MopReport {
    pub multicuts: usize,
    pub definable: usize,
    /// Multi-cuts with some cut not cut out by any tried parameter.
    pub missing: Vec<MultiCut>,
    /// False when the budget stopped the parameter scan, so `missing` may
    /// contain definable multi-cuts.
    pub exhaustive: bool,
    pub parameters_tried: u64,
    /// `cut_witnesses[i][c]` cuts out the first c elements of order i.
    pub cut_witnesses: Vec<Vec<Option<Vec<String>>>>,
}

impl MopReport {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// A multi-cut is definable iff each of its n cuts is {a : φ(g(a), b_i)}
/// for some b_i, so the check collects the traces of all parameter tuples
/// over the candidate grid and looks every cut up. `budget` bounds the
/// number of tuples tried.
pub fn check_mop_witness<C: Context>(ctx: &C, w: &PictureWitness<C::Value>, budget: u64) -> Result<MopReport> {
    let b = &w.source;
    if w.g.len() != b.len() {
        return Err(Error::InvalidMultiOrder(format!(
            "map has {} points for {} elements",
            w.g.len(),
            b.len()
        )));
    }
    let arity = w.phi.object_arity();
    if let Some(p) = w.g.iter().find(|p| p.len() != arity) {
        return Err(Error::InvalidFormula(format!(
            "point of length {} for {} object variables",
            p.len(),
            arity
        )));
    }
    let distinct: HashSet<&Vec<C::Value>> = w.g.iter().collect();
    if distinct.len() != w.g.len() {
        return Err(Error::NotEmbedding("map is not injective".into()));
    }
    let prepared = ctx.prepare(&w.phi)?;
    let mut anchors: Vec<C::Value> = w.g.iter().flatten().cloned().collect();
    anchors.extend(ctx.formula_anchors(&prepared));
    anchors.sort();
    anchors.dedup();
    let p = w.phi.param_arity();
    let grid = ctx.candidates(&anchors, p.max(1));

    // Trace of a parameter tuple as a bitmask over source elements.
    let mut traces: HashMap<Vec<bool>, Vec<C::Value>> = HashMap::new();
    let mut tried = 0u64;
    let mut exhaustive = true;
    let mut idx = vec![0usize; p];
    if b.is_empty() {
        traces.insert(Vec::new(), Vec::new());
    } else if p == 0 || !grid.is_empty() {
        loop {
            if tried >= budget {
                exhaustive = false;
                break;
            }
            tried += 1;
            let params: Vec<C::Value> = idx.iter().map(|i| grid[*i].clone()).collect();
            let trace = w
                .g
                .iter()
                .map(|x| ctx.holds(&prepared, x, &params))
                .collect::<Result<Vec<bool>>>()?;
            traces.entry(trace).or_insert(params);
            let Some(k) = (0..p).rev().find(|k| idx[*k] + 1 < grid.len()) else {
                break;
            };
            idx[k] += 1;
            for q in idx.iter_mut().skip(k + 1) {
                *q = 0;
            }
        }
    }

    let cut_witnesses: Vec<Vec<Option<Vec<C::Value>>>> = (0..b.n())
        .map(|i| {
            (0..=b.len())
                .map(|c| {
                    let mut mask = vec![false; b.len()];
                    for e in &b.order(i)[..c] {
                        mask[*e] = true;
                    }
                    traces.get(&mask).cloned()
                })
                .collect()
        })
        .collect();
    let all = enumerate_multicuts(b);
    let missing: Vec<MultiCut> = all
        .iter()
        .filter(|z| z.cuts.iter().enumerate().any(|(i, c)| cut_witnesses[i][*c].is_none()))
        .cloned()
        .collect();
    Ok(MopReport {
        multicuts: all.len(),
        definable: all.len() - missing.len(),
        missing,
        exhaustive,
        parameters_tried: tried,
        cut_witnesses: cut_witnesses
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|w| w.map(|v| v.iter().map(|x| ctx.render(x)).collect()))
                    .collect()
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_partitioned, Signature};
    use crate::multiorder::MultiOrderFile;
    use crate::ominimal::DloContext;
    use crate::rational::int;

    fn below() -> PartitionedFormula {
        parse_partitioned("x<y", &Signature::order(), &["x".to_string()], Some(&["y".to_string()])).unwrap()
    }

    #[test]
    fn chain_into_the_line() {
        let ctx = DloContext::new();
        let w = PictureWitness {
            source: MultiOrder::chain(3, 1),
            g: (0..3).map(|k| vec![int(k)]).collect(),
            phi: below(),
        };
        let r = check_mop_witness(&ctx, &w, 1_000).unwrap();
        assert_eq!((r.multicuts, r.definable), (4, 4));
        assert!(r.exhaustive && r.complete());
    }

    #[test]
    fn crossing_into_one_chain_fails() {
        let ctx = DloContext::new();
        let source = MultiOrder::from_file(&MultiOrderFile {
            n: 2,
            universe: vec!["a".into(), "b".into()],
            orders: vec![vec!["a".into(), "b".into()], vec!["b".into(), "a".into()]],
        })
        .unwrap();
        let w = PictureWitness {
            source,
            g: vec![vec![int(0)], vec![int(1)]],
            phi: below(),
        };
        let r = check_mop_witness(&ctx, &w, 1_000).unwrap();
        assert!(!r.complete());
        assert_eq!(r.missing, vec![MultiCut { cuts: vec![0, 1] }, MultiCut { cuts: vec![1, 1] }, MultiCut {
            cuts: vec![2, 1]
        }]);
        let tight = check_mop_witness(&ctx, &w, 2).unwrap();
        assert!(!tight.exhaustive);
    }

    #[test]
    fn empty_source_is_complete() {
        let ctx = DloContext::new();
        let w = PictureWitness {
            source: MultiOrder::empty(2),
            g: Vec::new(),
            phi: below(),
        };
        let r = check_mop_witness(&ctx, &w, 0).unwrap();
        assert_eq!((r.multicuts, r.definable), (1, 1));
    }
}
