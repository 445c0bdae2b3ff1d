use std::collections::HashMap;

use super::engine::{check_query, Engine};
use super::RankValue;
use crate::context::Context;
use crate::error::Result;
use crate::logic::PartitionedFormula;

/// Decides R(S, Δ, 2) ≥ α by the splitting recursion: rank ≥ α+1 iff one
/// instance cuts S into two parts of rank ≥ α.
struct Decider<'a, 'c, C: Context> {
    engine: &'a mut Engine<'c, C>,
    memo: HashMap<(C::Key, u32), bool>,
}

impl<'a, 'c, C: Context> Decider<'a, 'c, C> {
    fn at_least(&mut self, s: &C::Set, alpha: u32) -> Result<bool> {
        if alpha == 0 {
            return Ok(!self.engine.ctx.is_empty(s));
        }
        let key = (self.engine.ctx.key(s), alpha);
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let ctx = self.engine.ctx;
        let cands = self.engine.candidates(s);
        let mut found = false;
        'search: for k in 0..self.engine.formulas.len() {
            for params in self.engine.param_tuples(k, &cands) {
                let inst = self.engine.instance(k, &params)?;
                let inside = ctx.intersect(s, &inst);
                if ctx.is_empty(&inside) {
                    continue;
                }
                let outside = ctx.difference(s, &inst);
                if ctx.is_empty(&outside) {
                    continue;
                }
                if self.at_least(&inside, alpha - 1)? && self.at_least(&outside, alpha - 1)? {
                    found = true;
                    break 'search;
                }
            }
        }
        self.memo.insert(key, found);
        Ok(found)
    }
}

/// The Shelah 2-rank R(S, Δ, 2) truncated at `cap`.
pub fn shelah_rank2<C: Context>(
    ctx: &C,
    s: &C::Set,
    delta: &[PartitionedFormula],
    cap: u32,
) -> Result<RankValue> {
    check_query(1, cap)?;
    let mut engine = Engine::new(ctx, delta, 1)?;
    let root = engine.root(s)?;
    let mut d = Decider {
        engine: &mut engine,
        memo: HashMap::new(),
    };
    let mut alpha = 0;
    while alpha < cap && d.at_least(&root, alpha + 1)? {
        alpha += 1;
    }
    Ok(RankValue::from_truncated(alpha, cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FiniteContext;
    use crate::error::Error;
    use crate::logic::{parse_partitioned, FiniteStructure, Signature};

    fn lt() -> PartitionedFormula {
        parse_partitioned("x<y", &Signature::order(), &["x".to_string()], None).unwrap()
    }

    #[test]
    fn examples() {
        let ctx = FiniteContext::new(FiniteStructure::chain(4));
        assert_eq!(shelah_rank2(&ctx, &ctx.full_set(1), &[lt()], 8).unwrap(), RankValue::Exact(2));
        let point = ctx.subset(1, &[vec![1]]).unwrap();
        assert_eq!(shelah_rank2(&ctx, &point, &[lt()], 8).unwrap(), RankValue::Exact(0));
        let empty = ctx.subset(1, &[]).unwrap();
        assert_eq!(shelah_rank2(&ctx, &empty, &[lt()], 8), Err(Error::InconsistentType));
        let long = FiniteContext::new(FiniteStructure::chain(100));
        assert_eq!(shelah_rank2(&long, &long.full_set(1), &[lt()], 1).unwrap(), RankValue::AtLeast(1));
    }
}
