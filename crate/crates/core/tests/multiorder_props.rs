use proptest::prelude::*;

use opdim_core::multiorder::{
    amalgamate, check_embedding, enumerate_multicuts, generate_generic, grid_embed, one_point_extend, validate,
};
use opdim_core::MultiOrder;

fn generic() -> impl Strategy<Value = MultiOrder> {
    (1usize..=3, 0usize..=6, any::<u64>()).prop_map(|(n, size, seed)| generate_generic(n, size, seed, 64).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multicut_count(b in generic()) {
        let cuts = enumerate_multicuts(&b);
        prop_assert_eq!(cuts.len(), (b.len() + 1).pow(b.n() as u32));
        prop_assert!(cuts.windows(2).all(|w| w[0].cuts < w[1].cuts));
    }

    #[test]
    fn grid_embedding_is_exact(b in generic()) {
        let g = grid_embed(&b);
        prop_assert!(g.verified);
        for (x, ex) in b.universe().iter().enumerate() {
            for (y, ey) in b.universe().iter().enumerate() {
                for i in 0..b.n() {
                    prop_assert_eq!(b.less(i, x, y), g.points[ex][i] < g.points[ey][i]);
                }
            }
        }
    }

    #[test]
    fn generated_files_validate(b in generic()) {
        prop_assert!(validate(&b.to_file()).is_ok());
        let back = MultiOrder::from_json(&b.to_json(), 64).unwrap();
        prop_assert_eq!(back.to_file(), b.to_file());
    }

    #[test]
    fn extension_restricts_back(b in generic(), raw in prop::collection::vec(any::<usize>(), 3)) {
        let positions: Vec<usize> = raw[..b.n()].iter().map(|p| p % (b.len() + 1)).collect();
        let e = one_point_extend(&b, &positions).unwrap();
        prop_assert_eq!(e.len(), b.len() + 1);
        let old: Vec<usize> = (0..b.len()).collect();
        prop_assert_eq!(e.restrict(&old).to_file().orders, b.to_file().orders);
        for (i, p) in positions.iter().enumerate() {
            prop_assert_eq!(e.rank(i, b.len()), *p);
        }
    }

    #[test]
    fn amalgam_contains_both_sides(
        n in 1usize..=2,
        sizes in (0usize..=3, 0usize..=3, 0usize..=3),
        seeds in any::<(u64, u64, u64)>(),
    ) {
        // B and C both extend A by appending points; A sits at the first |A| indices.
        let a = generate_generic(n, sizes.0, seeds.0, 64).unwrap();
        let grow = |extra: usize, seed: u64| {
            let mut m = a.clone();
            for j in 0..extra {
                let pos: Vec<usize> = (0..n).map(|i| ((seed >> (8 * (i + 2 * j))) as usize) % (m.len() + 1)).collect();
                m = one_point_extend(&m, &pos).unwrap();
            }
            m
        };
        let b = grow(sizes.1, seeds.1);
        let c = grow(sizes.2, seeds.2);
        let e: Vec<usize> = (0..a.len()).collect();
        let am = amalgamate(&a, &b, &c, &e, &e).unwrap();
        prop_assert!(check_embedding(&b, &am.d, &am.f).is_ok());
        prop_assert!(check_embedding(&c, &am.d, &am.g).is_ok());
        for x in 0..a.len() {
            prop_assert_eq!(am.f[x], am.g[x]);
        }
        prop_assert_eq!(am.d.len(), a.len() + sizes.1 + sizes.2);
    }
}
