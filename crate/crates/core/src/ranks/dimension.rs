use serde::Serialize;

use super::engine::op_rank;
use super::RankValue;
use crate::context::Context;
use crate::error::Result;
use crate::logic::PartitionedFormula;

/// Highest arity tried by the op-dimension loops.
const MAX_N: usize = 8;

/// opR_n(S, Δ) for n = 1, 2, … up to the first value below the cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionTrace {
    pub value: usize,
    pub ranks: Vec<RankValue>,
}

/// opD(S, Δ): the largest n with opR_n(S, Δ) at the cap, or 0.
pub fn localized_op_dimension<C: Context>(
    ctx: &C,
    s: &C::Set,
    delta: &[PartitionedFormula],
    cap: u32,
) -> Result<DimensionTrace> {
    let mut ranks = Vec::new();
    let mut value = 0;
    for n in 1..=MAX_N {
        let r = op_rank(ctx, s, delta, n, cap)?;
        ranks.push(r);
        if !r.is_at_least_cap() {
            break;
        }
        value = n;
    }
    Ok(DimensionTrace { value, ranks })
}

/// opD(S) restricted to the Δs of `pool`.
pub fn op_dimension<C: Context>(
    ctx: &C,
    s: &C::Set,
    pool: &[Vec<PartitionedFormula>],
    cap: u32,
) -> Result<(usize, Vec<DimensionTrace>)> {
    let traces = pool
        .iter()
        .map(|delta| localized_op_dimension(ctx, s, delta, cap))
        .collect::<Result<Vec<_>>>()?;
    let best = traces.iter().map(|t| t.value).max().unwrap_or(0);
    Ok((best, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FiniteContext;
    use crate::logic::{parse_partitioned, FiniteStructure, Signature};

    #[test]
    fn pure_equality_is_stable() {
        let ctx = FiniteContext::new(FiniteStructure::pure_equality(5));
        let eq = parse_partitioned("x=y", &Signature::default(), &["x".to_string()], None).unwrap();
        let (d, _) = op_dimension(&ctx, &ctx.full_set(1), &[vec![eq]], 6).unwrap();
        assert_eq!(d, 0);
    }

    #[test]
    fn small_chain_large_cap() {
        let ctx = FiniteContext::new(FiniteStructure::chain(5));
        let lt = parse_partitioned("x<y", &Signature::order(), &["x".to_string()], None).unwrap();
        let t = localized_op_dimension(&ctx, &ctx.full_set(1), &[lt], 6).unwrap();
        assert_eq!(t.value, 0);
        assert_eq!(t.ranks, vec![RankValue::Exact(2)]);
    }
}
