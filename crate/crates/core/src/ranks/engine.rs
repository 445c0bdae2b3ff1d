use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::RankValue;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::logic::PartitionedFormula;

#[derive(Debug, Clone, Copy)]
enum Memo {
    Exact(u32),
    AtLeast(u32),
}

/// One chosen instance φ_k(x, b).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceRef {
    pub formula: String,
    pub params: Vec<String>,
}

/// A node of the splitting tree certifying a lower bound: the n instances
/// used at this node and one subtree per sign cell, in sign-vector order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessNode {
    pub rank: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<InstanceRef>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<WitnessNode>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rank: RankValue,
    pub n: usize,
    pub cap: u32,
    pub witness_tree: Option<WitnessNode>,
}

/// Most nodes emitted in a witness tree.
const WITNESS_NODES: usize = 256;

pub(crate) struct Engine<'a, C: Context> {
    pub ctx: &'a C,
    pub formulas: Vec<C::Prepared>,
    fixed: Vec<C::Value>,
    fresh: usize,
    n: usize,
    memo: HashMap<C::Key, Memo>,
    instances: HashMap<(usize, Vec<C::Value>), C::Set>,
}

/// A proper nonempty trace of an instance on the current set.
struct Split<C: Context> {
    formula: usize,
    params: Vec<C::Value>,
    inside: C::Set,
}

impl<'a, C: Context> Engine<'a, C> {
    pub fn new(ctx: &'a C, delta: &[PartitionedFormula], n: usize) -> Result<Self> {
        if delta.is_empty() {
            return Err(Error::InvalidFormula("empty formula set".into()));
        }
        let formulas = delta.iter().map(|f| ctx.prepare(f)).collect::<Result<Vec<_>>>()?;
        let mut fixed: Vec<C::Value> = formulas.iter().flat_map(|f| ctx.formula_anchors(f)).collect();
        fixed.sort();
        fixed.dedup();
        let max_p = delta.iter().map(|f| f.param_arity()).max().unwrap_or(0);
        Ok(Engine {
            ctx,
            formulas,
            fixed,
            fresh: n * max_p,
            n,
            memo: HashMap::new(),
            instances: HashMap::new(),
        })
    }

    pub fn root(&self, s: &C::Set) -> Result<C::Set> {
        if self.ctx.is_empty(s) {
            return Err(Error::InconsistentType);
        }
        let arity = self.ctx.arity(s);
        if let Some(f) = self.formulas.iter().find(|f| f.as_ref().object_arity() != arity) {
            return Err(Error::InvalidFormula(format!(
                "`{}` has {} object variables but the base set has arity {arity}",
                f.as_ref().body(),
                f.as_ref().object_arity()
            )));
        }
        self.ctx.anchor(s, &self.formulas)
    }

    /// Every parameter tuple for formula `k` over the candidate values.
    pub fn param_tuples(&self, k: usize, cands: &[C::Value]) -> Vec<Vec<C::Value>> {
        let p = self.formulas[k].as_ref().param_arity();
        let mut out = vec![Vec::new()];
        for _ in 0..p {
            out = out
                .into_iter()
                .flat_map(|t| {
                    cands.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push(c.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn candidates(&self, s: &C::Set) -> Vec<C::Value> {
        let mut anchors = self.ctx.anchors(s);
        anchors.extend(self.fixed.iter().cloned());
        anchors.sort();
        anchors.dedup();
        self.ctx.candidates(&anchors, self.fresh)
    }

    pub fn instance(&mut self, k: usize, params: &[C::Value]) -> Result<C::Set> {
        let key = (k, params.to_vec());
        if let Some(s) = self.instances.get(&key) {
            return Ok(s.clone());
        }
        let s = self.ctx.instance(&self.formulas[k], params)?;
        self.instances.insert(key, s.clone());
        Ok(s)
    }

    /// Instances splitting `s` properly, one per distinct trace, in
    /// formula-then-parameter order.
    fn splits(&mut self, s: &C::Set) -> Result<Vec<Split<C>>> {
        let cands = self.candidates(s);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for k in 0..self.formulas.len() {
            for params in self.param_tuples(k, &cands) {
                let inst = self.instance(k, &params)?;
                let inside = self.ctx.intersect(s, &inst);
                if self.ctx.is_empty(&inside) {
                    continue;
                }
                let outside = self.ctx.difference(s, &inst);
                if self.ctx.is_empty(&outside) {
                    continue;
                }
                if seen.insert(inside.clone()) {
                    out.push(Split {
                        formula: k,
                        params,
                        inside,
                    });
                }
            }
        }
        Ok(out)
    }

    /// The 2^n sign cells of the chosen splits, or `None` if one is empty.
    fn cells(&self, s: &C::Set, chosen: &[&Split<C>]) -> Option<Vec<C::Set>> {
        let mut cells = vec![s.clone()];
        for sp in chosen {
            let mut next = Vec::with_capacity(cells.len() * 2);
            for c in &cells {
                let inside = self.ctx.intersect(c, &sp.inside);
                if self.ctx.is_empty(&inside) {
                    return None;
                }
                let outside = self.ctx.difference(c, &sp.inside);
                if self.ctx.is_empty(&outside) {
                    return None;
                }
                next.push(outside);
                next.push(inside);
            }
            cells = next;
        }
        // Reorder so that index bit i is the sign of instance i.
        let n = chosen.len();
        let mut ordered = vec![None; cells.len()];
        for (idx, c) in cells.into_iter().enumerate() {
            let mut sigma = 0;
            for i in 0..n {
                if idx >> (n - 1 - i) & 1 == 1 {
                    sigma |= 1 << i;
                }
            }
            ordered[sigma] = Some(c);
        }
        Some(ordered.into_iter().map(|c| c.expect("every cell placed")).collect())
    }

    /// min(opR_n(s), limit) for nonempty `s`.
    pub fn rank_upto(&mut self, s: &C::Set, limit: u32) -> Result<u32> {
        if limit == 0 {
            return Ok(0);
        }
        let key = self.ctx.key(s);
        match self.memo.get(&key) {
            Some(Memo::Exact(v)) => return Ok((*v).min(limit)),
            Some(Memo::AtLeast(v)) if *v >= limit => return Ok(limit),
            _ => {}
        }
        let splits = self.splits(s)?;
        let mut best = 0;
        let n = self.n;
        let mut combo: Vec<usize> = (0..n).collect();
        if splits.len() >= n {
            'combos: loop {
                let chosen: Vec<&Split<C>> = combo.iter().map(|i| &splits[*i]).collect();
                if let Some(cells) = self.cells(s, &chosen) {
                    let mut m = limit - 1;
                    for c in &cells {
                        if m < best {
                            break;
                        }
                        m = m.min(self.rank_upto(c, m)?);
                    }
                    if m >= best {
                        best = m + 1;
                        if best == limit {
                            break 'combos;
                        }
                    }
                }
                if !next_combination(&mut combo, splits.len()) {
                    break;
                }
            }
        }
        let entry = if best == limit {
            Memo::AtLeast(limit)
        } else {
            Memo::Exact(best)
        };
        self.memo.insert(key, entry);
        Ok(best)
    }

    fn witness(&mut self, s: &C::Set, r: u32, budget: &mut usize) -> Result<WitnessNode> {
        let mut node = WitnessNode {
            rank: r,
            instances: Vec::new(),
            children: Vec::new(),
            truncated: false,
        };
        if r == 0 {
            return Ok(node);
        }
        if *budget < 1 << self.n {
            node.truncated = true;
            return Ok(node);
        }
        *budget -= 1 << self.n;
        let splits = self.splits(s)?;
        let mut combo: Vec<usize> = (0..self.n).collect();
        if splits.len() < self.n {
            return Err(Error::Unsupported("witness search lost its split".into()));
        }
        loop {
            let chosen: Vec<&Split<C>> = combo.iter().map(|i| &splits[*i]).collect();
            if let Some(cells) = self.cells(s, &chosen) {
                let mut ok = true;
                for c in &cells {
                    if self.rank_upto(c, r - 1)? < r - 1 {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    node.instances = chosen
                        .iter()
                        .map(|sp| InstanceRef {
                            formula: self.formulas[sp.formula].as_ref().body().to_string(),
                            params: sp.params.iter().map(|v| self.ctx.render(v)).collect(),
                        })
                        .collect();
                    for c in &cells {
                        let child = self.witness(c, r - 1, budget)?;
                        node.children.push(child);
                    }
                    return Ok(node);
                }
            }
            if !next_combination(&mut combo, splits.len()) {
                return Err(Error::Unsupported("witness search lost its split".into()));
            }
        }
    }
}

/// Advances `c` to the next strictly increasing k-subset of 0..len.
pub(crate) fn next_combination(c: &mut [usize], len: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < len - (k - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// opR_n(S, Δ) truncated at `cap`.
pub fn op_rank<C: Context>(
    ctx: &C,
    s: &C::Set,
    delta: &[PartitionedFormula],
    n: usize,
    cap: u32,
) -> Result<RankValue> {
    check_query(n, cap)?;
    let mut engine = Engine::new(ctx, delta, n)?;
    let root = engine.root(s)?;
    let r = engine.rank_upto(&root, cap)?;
    Ok(RankValue::from_truncated(r, cap))
}

/// [`op_rank`] together with a splitting tree witnessing the lower bound.
pub fn op_rank_report<C: Context>(
    ctx: &C,
    s: &C::Set,
    delta: &[PartitionedFormula],
    n: usize,
    cap: u32,
) -> Result<RankReport> {
    check_query(n, cap)?;
    let mut engine = Engine::new(ctx, delta, n)?;
    let root = engine.root(s)?;
    let r = engine.rank_upto(&root, cap)?;
    let mut budget = WITNESS_NODES;
    let tree = engine.witness(&root, r, &mut budget)?;
    Ok(RankReport {
        rank: RankValue::from_truncated(r, cap),
        n,
        cap,
        witness_tree: Some(tree),
    })
}

pub(crate) fn check_query(n: usize, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidFormula("n must be at least 1".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidFormula("cap must be at least 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FiniteContext;
    use crate::logic::{parse_partitioned, FiniteStructure, Signature};

    fn pf(text: &str, sig: &Signature) -> PartitionedFormula {
        parse_partitioned(text, sig, &["x".to_string()], None).unwrap()
    }

    #[test]
    fn chain_of_four() {
        let ctx = FiniteContext::new(FiniteStructure::chain(4));
        let s = ctx.full_set(1);
        let phi = pf("x<y", &Signature::order());
        assert_eq!(op_rank(&ctx, &s, &[phi.clone()], 1, 8).unwrap(), RankValue::Exact(2));
        let single = ctx.subset(1, &[vec![2]]).unwrap();
        assert_eq!(op_rank(&ctx, &single, &[phi.clone()], 1, 8).unwrap(), RankValue::Exact(0));
        let empty = ctx.subset(1, &[]).unwrap();
        assert_eq!(op_rank(&ctx, &empty, &[phi], 1, 8), Err(Error::InconsistentType));
    }

    #[test]
    fn long_chain_hits_small_cap() {
        let ctx = FiniteContext::new(FiniteStructure::chain(100));
        let s = ctx.full_set(1);
        let phi = pf("x<y", &Signature::order());
        assert_eq!(op_rank(&ctx, &s, &[phi], 1, 1).unwrap(), RankValue::AtLeast(1));
    }

    #[test]
    fn grid_two_orders() {
        let ctx = FiniteContext::new(FiniteStructure::coordinate_grid(2, 2).unwrap());
        let sig = Signature::multi_order(2);
        let delta = [pf("x <0 y", &sig), pf("x <1 y", &sig)];
        let s = ctx.full_set(1);
        let report = op_rank_report(&ctx, &s, &delta, 2, 4).unwrap();
        assert_eq!(report.rank, RankValue::Exact(1));
        let tree = report.witness_tree.unwrap();
        assert_eq!(tree.instances.len(), 2);
        assert_eq!(tree.children.len(), 4);
    }

    #[test]
    fn combinations_enumerate() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all.len(), 6);
    }
}
