use std::collections::HashSet;

use serde::Serialize;

use crate::context::{Context, Literal};
use crate::error::{Error, Result};
use crate::logic::PartitionedFormula;

/// Largest number of leaves (2^n)^β a Γ-system search will accept.
pub const DEFAULT_GAMMA_BOUND: u128 = 1 << 16;

/// A solved Γ_{n,β} system: each inner node carries the parameters
/// b_{σ↾ℓ,0..n-1}; each leaf carries the realization a_σ. Children are in
/// sign-vector order (bit i of the index is σ_ℓ(i)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaNode {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<GammaNode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

struct Search<'a, C: Context> {
    ctx: &'a C,
    s: &'a C::Set,
    phi: C::Prepared,
    n: usize,
    fixed: Vec<C::Value>,
    points: Option<Vec<Vec<C::Value>>>,
}

impl<'a, C: Context> Search<'a, C> {
    fn literals<'p>(&'p self, path: &[(Vec<C::Value>, bool)]) -> Vec<Literal<'p, C::Prepared, C::Value>> {
        path.iter()
            .map(|(b, sign)| Literal::new(&self.phi, b.clone(), *sign))
            .collect()
    }

    /// Parameter tuples to try at a node, one per distinct trace on S when
    /// S is finite.
    fn choices(&self, used: &[C::Value]) -> Result<Vec<Vec<C::Value>>> {
        let p = self.phi.as_ref().param_arity();
        let mut anchors = self.ctx.anchors(self.s);
        anchors.extend(self.fixed.iter().cloned());
        anchors.extend(used.iter().cloned());
        anchors.sort();
        anchors.dedup();
        let cands = self.ctx.candidates(&anchors, self.n * p);
        let mut tuples: Vec<Vec<C::Value>> = vec![Vec::new()];
        for _ in 0..p {
            tuples = tuples
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
        let Some(points) = &self.points else {
            return Ok(tuples);
        };
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for b in tuples {
            let trace = points
                .iter()
                .map(|a| self.ctx.holds(&self.phi, a, &b))
                .collect::<Result<Vec<bool>>>()?;
            if seen.insert(trace) {
                out.push(b);
            }
        }
        Ok(out)
    }

    fn solve(
        &self,
        path: &mut Vec<(Vec<C::Value>, bool)>,
        used: &mut Vec<C::Value>,
        depth: usize,
    ) -> Result<Option<GammaNode>> {
        if depth == 0 {
            let lits = self.literals(path);
            return Ok(self.ctx.satisfy(self.s, &lits)?.map(|a| GammaNode {
                params: Vec::new(),
                children: Vec::new(),
                point: Some(a.iter().map(|v| self.ctx.render(v)).collect()),
            }));
        }
        let tuples = self.choices(used)?;
        if tuples.is_empty() {
            return Ok(None);
        }
        // Multisets of n tuples, as nondecreasing index sequences.
        let mut pick = vec![0usize; self.n];
        loop {
            if let Some(node) = self.try_pick(&tuples, &pick, path, used, depth)? {
                return Ok(Some(node));
            }
            let Some(i) = (0..self.n).rev().find(|i| pick[*i] + 1 < tuples.len()) else {
                return Ok(None);
            };
            pick[i] += 1;
            for j in i + 1..self.n {
                pick[j] = pick[i];
            }
        }
    }

    fn try_pick(
        &self,
        tuples: &[Vec<C::Value>],
        pick: &[usize],
        path: &mut Vec<(Vec<C::Value>, bool)>,
        used: &mut Vec<C::Value>,
        depth: usize,
    ) -> Result<Option<GammaNode>> {
        let chosen: Vec<&Vec<C::Value>> = pick.iter().map(|i| &tuples[*i]).collect();
        let mark = used.len();
        for b in &chosen {
            used.extend(b.iter().cloned());
        }
        let mut children = Vec::with_capacity(1 << self.n);
        let mut ok = true;
        for sigma in 0..1usize << self.n {
            for (i, b) in chosen.iter().enumerate() {
                path.push(((*b).clone(), sigma >> i & 1 == 1));
            }
            let feasible = self.ctx.satisfy(self.s, &self.literals(path))?.is_some();
            let child = if feasible {
                self.solve(path, used, depth - 1)?
            } else {
                None
            };
            path.truncate(path.len() - self.n);
            match child {
                Some(c) => children.push(c),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        used.truncate(mark);
        Ok(ok.then(|| GammaNode {
            params: chosen
                .iter()
                .map(|b| b.iter().map(|v| self.ctx.render(v)).collect())
                .collect(),
            children,
            point: None,
        }))
    }
}

/// Satisfiability of Γ_{n,β}(S, φ) inside the context, by backtracking over
/// the parameter tree. Returns a solution when one exists.
pub fn gamma_consistent<C: Context>(
    ctx: &C,
    s: &C::Set,
    phi: &PartitionedFormula,
    n: usize,
    beta: usize,
    bound: u128,
) -> Result<Option<GammaNode>> {
    if n == 0 {
        return Err(Error::InvalidFormula("n must be at least 1".into()));
    }
    let leaves = (1u128 << n.min(100))
        .checked_pow(beta as u32)
        .unwrap_or(u128::MAX);
    if leaves > bound {
        return Err(Error::SearchOverflow {
            what: "Γ-system leaves",
            size: leaves,
            bound,
        });
    }
    if phi.object_arity() != ctx.arity(s) {
        return Err(Error::InvalidFormula("formula sort differs from the base set".into()));
    }
    let prepared = ctx.prepare(phi)?;
    let fixed = ctx.formula_anchors(&prepared);
    let search = Search {
        ctx,
        s,
        phi: prepared,
        n,
        fixed,
        points: ctx.points(s),
    };
    search.solve(&mut Vec::new(), &mut Vec::new(), beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FiniteContext;
    use crate::logic::{parse_partitioned, FiniteStructure, Signature};

    fn lt() -> PartitionedFormula {
        parse_partitioned("x<y", &Signature::order(), &["x".to_string()], None).unwrap()
    }

    #[test]
    fn depth_zero_is_nonemptiness() {
        let ctx = FiniteContext::new(FiniteStructure::chain(3));
        assert!(gamma_consistent(&ctx, &ctx.full_set(1), &lt(), 1, 0, DEFAULT_GAMMA_BOUND)
            .unwrap()
            .is_some());
        let empty = ctx.subset(1, &[]).unwrap();
        assert!(gamma_consistent(&ctx, &empty, &lt(), 1, 0, DEFAULT_GAMMA_BOUND)
            .unwrap()
            .is_none());
    }

    #[test]
    fn four_chain() {
        let ctx = FiniteContext::new(FiniteStructure::chain(4));
        let s = ctx.full_set(1);
        let two = gamma_consistent(&ctx, &s, &lt(), 1, 2, DEFAULT_GAMMA_BOUND).unwrap().unwrap();
        assert_eq!(two.children.len(), 2);
        assert!(gamma_consistent(&ctx, &s, &lt(), 1, 3, DEFAULT_GAMMA_BOUND).unwrap().is_none());
    }

    #[test]
    fn overflow_is_reported() {
        let ctx = FiniteContext::new(FiniteStructure::chain(2));
        let e = gamma_consistent(&ctx, &ctx.full_set(1), &lt(), 2, 9, DEFAULT_GAMMA_BOUND).unwrap_err();
        assert!(e.is_budget());
    }
}
