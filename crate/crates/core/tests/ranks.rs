use opdim_core::logic::{parse_partitioned, FiniteStructure, Signature};
use opdim_core::ranks::op_rank;
use opdim_core::{Context, FiniteContext, PartitionedFormula, RankValue};

fn pool() -> Vec<PartitionedFormula> {
    let sig = Signature::binary("R");
    let (x, y) = (vec!["x".to_string()], vec!["y".to_string()]);
    ["R(x,y)", "R(y,x)", "x=y"]
        .iter()
        .map(|t| parse_partitioned(t, &sig, &x, Some(&y)).unwrap())
        .collect()
}

fn unary(ctx: &FiniteContext, mask: u32) -> <FiniteContext as Context>::Set {
    let k = ctx.structure().size();
    let tuples: Vec<Vec<usize>> = (0..k).filter(|a| mask >> a & 1 == 1).map(|a| vec![a]).collect();
    ctx.subset(1, &tuples).unwrap()
}

#[test]
fn union_is_never_below_the_max() {
    let pool = pool();
    for k in 1..=3usize {
        for bits in 0..1u64 << (k * k) {
            let ctx = FiniteContext::new(FiniteStructure::binary_from_bits(k, bits));
            for a in 1..1u32 << k {
                for b in a..1u32 << k {
                    for f in &pool {
                        for n in 1..=2 {
                            let delta = std::slice::from_ref(f);
                            let ra = op_rank(&ctx, &unary(&ctx, a), delta, n, 6).unwrap();
                            let rb = op_rank(&ctx, &unary(&ctx, b), delta, n, 6).unwrap();
                            let ru = op_rank(&ctx, &unary(&ctx, a | b), delta, n, 6).unwrap();
                            assert!(ru >= ra.max(rb), "k={k} bits={bits:#x} {a:#b} ∪ {b:#b}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn two_points_outrank_each_point() {
    let ctx = FiniteContext::new(FiniteStructure::pure_equality(2));
    let eq = parse_partitioned("x=y", ctx.signature(), &["x".to_string()], None).unwrap();
    let delta = std::slice::from_ref(&eq);
    assert_eq!(op_rank(&ctx, &unary(&ctx, 0b01), delta, 1, 6).unwrap(), RankValue::Exact(0));
    assert_eq!(op_rank(&ctx, &unary(&ctx, 0b10), delta, 1, 6).unwrap(), RankValue::Exact(0));
    assert_eq!(op_rank(&ctx, &unary(&ctx, 0b11), delta, 1, 6).unwrap(), RankValue::Exact(1));
}
