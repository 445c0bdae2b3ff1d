//! Amalgamation, one-point extensions and random generic multi-orders.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_embedding, MultiOrder};
use crate::error::{Error, Result};

/// D with embeddings f: B → D and g: C → D agreeing on A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub d: MultiOrder,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

fn fresh(taken: &HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// D is B followed by the elements of C outside e2(A). In each order the
/// elements of B and C between two consecutive shared points are placed B
/// first, then C.
pub fn amalgamate(a: &MultiOrder, b: &MultiOrder, c: &MultiOrder, e1: &[usize], e2: &[usize]) -> Result<Amalgam> {
    check_embedding(a, b, e1)?;
    check_embedding(a, c, e2)?;
    let mut universe = b.universe().to_vec();
    let mut taken: HashSet<String> = universe.iter().cloned().collect();
    let mut g = vec![usize::MAX; c.len()];
    for (x, y) in e1.iter().zip(e2) {
        g[*y] = *x;
    }
    for (k, slot) in g.iter_mut().enumerate() {
        if *slot == usize::MAX {
            let name = fresh(&taken, &c.universe()[k]);
            taken.insert(name.clone());
            *slot = universe.len();
            universe.push(name);
        }
    }
    let shared: HashSet<usize> = e1.iter().copied().collect();
    let orders = (0..b.n())
        .map(|i| {
            let bs = b.order(i);
            let cs: Vec<usize> = c.order(i).iter().map(|e| g[*e]).collect();
            let (mut p, mut q) = (0, 0);
            let mut out = Vec::with_capacity(universe.len());
            loop {
                while p < bs.len() && !shared.contains(&bs[p]) {
                    out.push(bs[p]);
                    p += 1;
                }
                while q < cs.len() && !shared.contains(&cs[q]) {
                    out.push(cs[q]);
                    q += 1;
                }
                if p == bs.len() {
                    break;
                }
                // Both embeddings order A the same way, so the next shared
                // point is the same on both sides.
                debug_assert_eq!(bs[p], cs[q]);
                out.push(bs[p]);
                p += 1;
                q += 1;
            }
            out
        })
        .collect();
    let d = MultiOrder::new(universe, orders)?;
    Ok(Amalgam {
        d,
        f: (0..b.len()).collect(),
        g,
    })
}

/// B plus a new point placed at `positions[i]` (0 ..= |B|) in order i.
pub fn one_point_extend(b: &MultiOrder, positions: &[usize]) -> Result<MultiOrder> {
    if positions.len() != b.n() {
        return Err(Error::InvalidMultiOrder(format!(
            "{} positions given for {} orders",
            positions.len(),
            b.n()
        )));
    }
    if let Some((order, &position)) = positions.iter().enumerate().find(|(_, p)| **p > b.len()) {
        return Err(Error::PositionOutOfRange {
            order,
            position,
            max: b.len(),
        });
    }
    let mut universe = b.universe().to_vec();
    let taken: HashSet<String> = universe.iter().cloned().collect();
    let new = universe.len();
    universe.push(fresh(&taken, &new.to_string()));
    let orders = positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut o = b.order(i).to_vec();
            o.insert(*p, new);
            o
        })
        .collect();
    MultiOrder::new(universe, orders)
}

/// `size` points, each inserted at uniformly random positions.
pub fn generate_generic(n: usize, size: usize, seed: u64, max_points: usize) -> Result<MultiOrder> {
    if n == 0 {
        return Err(Error::InvalidMultiOrder("n must be at least 1".into()));
    }
    if size > max_points {
        return Err(Error::CapExceeded {
            size: size as u128,
            cap: max_points as u128,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders = vec![Vec::with_capacity(size); n];
    for k in 0..size {
        for o in orders.iter_mut() {
            let p = rng.gen_range(0..=k);
            o.insert(p, k);
        }
    }
    MultiOrder::new((0..size).map(|k| k.to_string()).collect(), orders)
}

fn subsets_up_to(len: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if !f(cur) {
            return false;
        }
        if cur.len() == k {
            return true;
        }
        for e in start..len {
            cur.push(e);
            let ok = go(e + 1, len, k, cur, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    go(0, len, k, &mut Vec::new(), f)
}

/// The first subset S with |S| ≤ k and one-point type over S (positions
/// relative to S in each order) that no element outside S realizes.
pub fn extension_failure(b: &MultiOrder, k: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = b.n();
    let mut failure = None;
    subsets_up_to(b.len(), k, &mut |s: &[usize]| {
        let inside: HashSet<usize> = s.iter().copied().collect();
        let mut realized = HashSet::new();
        for e in (0..b.len()).filter(|e| !inside.contains(e)) {
            let t: Vec<usize> = (0..n).map(|i| s.iter().filter(|x| b.less(i, **x, e)).count()).collect();
            realized.insert(t);
        }
        let mut t = vec![0usize; n];
        loop {
            if !realized.contains(&t) {
                failure = Some((s.to_vec(), t));
                return false;
            }
            let Some(i) = (0..n).rev().find(|i| t[*i] < s.len()) else {
                return true;
            };
            t[i] += 1;
            for x in t.iter_mut().skip(i + 1) {
                *x = 0;
            }
        }
    });
    failure
}

/// Every one-point type over every subset of size ≤ k is realized in B.
pub fn extension_property_level(b: &MultiOrder, k: usize) -> bool {
    extension_failure(b, k).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiorder::MultiOrderFile;

    fn crossing() -> MultiOrder {
        MultiOrder::from_file(&MultiOrderFile {
            n: 2,
            universe: vec!["a".into(), "b".into()],
            orders: vec![vec!["a".into(), "b".into()], vec!["b".into(), "a".into()]],
        })
        .unwrap()
    }

    #[test]
    fn amalgamation_over_a_point() {
        let a = MultiOrder::chain(1, 2);
        let b = crossing();
        let c = MultiOrder::chain(2, 2);
        let am = amalgamate(&a, &b, &c, &[0], &[0]).unwrap();
        assert_eq!(am.d.len(), 3);
        check_embedding(&b, &am.d, &am.f).unwrap();
        check_embedding(&c, &am.d, &am.g).unwrap();
        assert_eq!(am.d.universe()[2], "1");
        let bad = amalgamate(&MultiOrder::chain(2, 2), &b, &c, &[0, 1], &[0, 1]);
        assert!(matches!(bad, Err(Error::NotEmbedding(_))));
    }

    #[test]
    fn empty_base_is_a_disjoint_union() {
        let b = crossing();
        let am = amalgamate(&MultiOrder::empty(2), &b, &b, &[], &[]).unwrap();
        assert_eq!(am.d.len(), 4);
        assert_eq!(am.d.universe()[2], "a'");
    }

    #[test]
    fn extensions() {
        let b = MultiOrder::chain(2, 1);
        let e = one_point_extend(&b, &[1]).unwrap();
        assert_eq!(e.order(0), &[0, 2, 1]);
        assert_eq!(
            one_point_extend(&b, &[3]),
            Err(Error::PositionOutOfRange {
                order: 0,
                position: 3,
                max: 2
            })
        );
    }

    #[test]
    fn extension_levels() {
        let chain = MultiOrder::chain(3, 1);
        assert!(extension_property_level(&chain, 0));
        assert!(!extension_property_level(&chain, 1));
        assert_eq!(extension_failure(&chain, 1), Some((vec![0], vec![0])));
        assert!(!extension_property_level(&MultiOrder::empty(1), 0));
        let g = generate_generic(2, 200, 3, 4096).unwrap();
        // The minimum of order 0 has nothing below it, so level 1 fails in
        // every finite multi-order.
        assert!(extension_property_level(&g, 0));
        assert!(!extension_property_level(&g, 1));
        assert_eq!(g, generate_generic(2, 200, 3, 4096).unwrap());
    }
}
