//! Finite n-multi-orders: a universe with n independent strict linear
//! orders, stored as permutations.

mod amalgam;
mod mop;

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use amalgam::{
    amalgamate, extension_failure, extension_property_level, generate_generic, one_point_extend, Amalgam,
};
pub use mop::{check_mop_witness, MopReport, PictureWitness};

/// Largest universe built by the generators.
pub const DEFAULT_MAX_POINTS: usize = 4096;

/// The JSON form: order i lists the universe in <_i-increasing sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiOrderFile {
    pub n: usize,
    pub universe: Vec<String>,
    pub orders: Vec<Vec<String>>,
}

/// Why a file is not a multi-order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// The offending order, if the problem is with one order.
    pub order: Option<usize>,
    pub message: String,
}

/// Ok iff n ≥ 1, the universe has no repeats and each order is a
/// permutation of it. Reports the first bad order.
pub fn validate(file: &MultiOrderFile) -> std::result::Result<(), Violation> {
    let whole = |message: String| Violation { order: None, message };
    if file.n == 0 {
        return Err(whole("n must be at least 1".into()));
    }
    if file.orders.len() != file.n {
        return Err(whole(format!("{} orders listed for n = {}", file.orders.len(), file.n)));
    }
    let mut seen = HashSet::new();
    if let Some(e) = file.universe.iter().find(|e| !seen.insert(e.as_str())) {
        return Err(whole(format!("element `{e}` is repeated in the universe")));
    }
    for (i, order) in file.orders.iter().enumerate() {
        let bad = |message: String| Violation { order: Some(i), message };
        if order.len() != file.universe.len() {
            return Err(bad(format!("lists {} elements, the universe has {}", order.len(), file.universe.len())));
        }
        let mut hit = HashSet::new();
        for e in order {
            if !seen.contains(e.as_str()) {
                return Err(bad(format!("`{e}` is not in the universe")));
            }
            if !hit.insert(e.as_str()) {
                return Err(bad(format!("`{e}` appears twice")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiOrder {
    universe: Vec<String>,
    /// orders[i][p] is the element at position p of <_i.
    orders: Vec<Vec<usize>>,
    /// ranks[i][e] is the position of e in <_i.
    ranks: Vec<Vec<usize>>,
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut r = vec![0; order.len()];
    for (p, e) in order.iter().enumerate() {
        r[*e] = p;
    }
    r
}

impl MultiOrder {
    /// From element names and orders given as index permutations.
    pub fn new(universe: Vec<String>, orders: Vec<Vec<usize>>) -> Result<Self> {
        let file = MultiOrderFile {
            n: orders.len(),
            orders: orders
                .iter()
                .map(|o| o.iter().map(|e| universe.get(*e).cloned().unwrap_or_else(|| format!("#{e}"))).collect())
                .collect(),
            universe,
        };
        MultiOrder::from_file(&file)
    }

    /// The empty n-multi-order.
    pub fn empty(n: usize) -> Self {
        MultiOrder {
            universe: Vec::new(),
            orders: vec![Vec::new(); n],
            ranks: vec![Vec::new(); n],
        }
    }

    /// Elements "0" … "k-1" in the same order n times.
    pub fn chain(k: usize, n: usize) -> Self {
        let order: Vec<usize> = (0..k).collect();
        MultiOrder {
            universe: (0..k).map(|i| i.to_string()).collect(),
            orders: vec![order.clone(); n],
            ranks: vec![order; n],
        }
    }

    pub fn from_file(file: &MultiOrderFile) -> Result<Self> {
        validate(file).map_err(|v| {
            Error::InvalidMultiOrder(match v.order {
                Some(i) => format!("order {i}: {}", v.message),
                None => v.message,
            })
        })?;
        let index: HashMap<&str, usize> = file.universe.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
        let orders: Vec<Vec<usize>> = file
            .orders
            .iter()
            .map(|o| o.iter().map(|e| index[e.as_str()]).collect())
            .collect();
        let ranks = orders.iter().map(|o| inverse(o)).collect();
        Ok(MultiOrder {
            universe: file.universe.clone(),
            orders,
            ranks,
        })
    }

    pub fn from_json(text: &str, max_points: usize) -> Result<Self> {
        let file: MultiOrderFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidMultiOrder(format!("JSON: {e}")))?;
        if file.universe.len() > max_points {
            return Err(Error::CapExceeded {
                size: file.universe.len() as u128,
                cap: max_points as u128,
            });
        }
        MultiOrder::from_file(&file)
    }

    pub fn to_file(&self) -> MultiOrderFile {
        MultiOrderFile {
            n: self.n(),
            universe: self.universe.clone(),
            orders: self
                .orders
                .iter()
                .map(|o| o.iter().map(|e| self.universe[*e].clone()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("multi-order serializes")
    }

    pub fn n(&self) -> usize {
        self.orders.len()
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element(&self, name: &str) -> Result<usize> {
        self.universe
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// <_i as a list of elements.
    pub fn order(&self, i: usize) -> &[usize] {
        &self.orders[i]
    }

    /// Position of `e` in <_i.
    pub fn rank(&self, i: usize, e: usize) -> usize {
        self.ranks[i][e]
    }

    pub fn less(&self, i: usize, a: usize, b: usize) -> bool {
        self.ranks[i][a] < self.ranks[i][b]
    }

    /// The induced multi-order on `keep` (in that element order).
    pub fn restrict(&self, keep: &[usize]) -> MultiOrder {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let orders: Vec<Vec<usize>> = self
            .orders
            .iter()
            .map(|o| o.iter().filter_map(|e| pos.get(e).copied()).collect())
            .collect();
        MultiOrder {
            universe: keep.iter().map(|e| self.universe[*e].clone()).collect(),
            ranks: orders.iter().map(|o| inverse(o)).collect(),
            orders,
        }
    }
}

/// An n-tuple of cuts; cut i is the number of elements below it in <_i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiCut {
    pub cuts: Vec<usize>,
}

impl MultiCut {
    /// The elements below cut i.
    pub fn lower(&self, b: &MultiOrder, i: usize) -> Vec<usize> {
        b.order(i)[..self.cuts[i]].to_vec()
    }
}

/// All (|B|+1)^n multi-cuts, lexicographically by positions.
pub fn enumerate_multicuts(b: &MultiOrder) -> Vec<MultiCut> {
    let n = b.n();
    let k = b.len();
    let mut out = Vec::new();
    let mut c = vec![0usize; n];
    loop {
        out.push(MultiCut { cuts: c.clone() });
        let Some(i) = (0..n).rev().find(|i| c[*i] < k) else {
            return out;
        };
        c[i] += 1;
        for x in c.iter_mut().skip(i + 1) {
            *x = 0;
        }
    }
}

/// Whether `map` (source element → target element) is injective and
/// preserves and reflects every order.
pub fn check_embedding(a: &MultiOrder, b: &MultiOrder, map: &[usize]) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::NotEmbedding(format!("{} orders against {}", a.n(), b.n())));
    }
    if map.len() != a.len() || map.iter().any(|e| *e >= b.len()) {
        return Err(Error::NotEmbedding("map does not cover the source".into()));
    }
    let distinct: HashSet<usize> = map.iter().copied().collect();
    if distinct.len() != map.len() {
        return Err(Error::NotEmbedding("map is not injective".into()));
    }
    for x in 0..a.len() {
        for y in 0..a.len() {
            for i in 0..a.n() {
                if x != y && a.less(i, x, y) != b.less(i, map[x], map[y]) {
                    return Err(Error::NotEmbedding(format!(
                        "order {i} differs on `{}`, `{}`",
                        a.universe()[x],
                        a.universe()[y]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// b ↦ (rank_0(b), …, rank_{n-1}(b)) in (N^n, coordinatewise).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridEmbedding {
    pub n: usize,
    /// N, the side of the grid.
    pub side: usize,
    pub points: BTreeMap<String, Vec<usize>>,
    pub verified: bool,
}

pub fn grid_embed(b: &MultiOrder) -> GridEmbedding {
    let coords: Vec<Vec<usize>> = (0..b.len()).map(|e| (0..b.n()).map(|i| b.rank(i, e)).collect()).collect();
    let verified = preserves_and_reflects(b, &coords);
    GridEmbedding {
        n: b.n(),
        side: b.len(),
        points: b.universe().iter().cloned().zip(coords).collect(),
        verified,
    }
}

/// For every pair and order: a <_i b iff point(a)_i < point(b)_i, and the
/// points are distinct.
pub fn preserves_and_reflects(b: &MultiOrder, points: &[Vec<usize>]) -> bool {
    let distinct: HashSet<&Vec<usize>> = points.iter().collect();
    if distinct.len() != points.len() {
        return false;
    }
    (0..b.len()).all(|x| {
        (0..b.len()).all(|y| x == y || (0..b.n()).all(|i| b.less(i, x, y) == (points[x][i] < points[y][i])))
    })
}

/// The grid (2^N)^n made into a multi-order; `homomorphism` records the
/// check that every strict coordinate comparison survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub order: MultiOrder,
    pub points: Vec<Vec<usize>>,
    pub homomorphism: bool,
}

/// Order i sorts the grid by coordinate i, breaking ties by a seeded
/// shuffle drawn independently for each order.
pub fn linearize_grid(side_log: u32, n: usize, seed: u64, max_points: usize) -> Result<Linearization> {
    if n == 0 {
        return Err(Error::InvalidMultiOrder("n must be at least 1".into()));
    }
    let side = 1usize.checked_shl(side_log).unwrap_or(usize::MAX);
    let size = (side as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > max_points as u128 {
        return Err(Error::CapExceeded {
            size,
            cap: max_points as u128,
        });
    }
    let size = size as usize;
    let points: Vec<Vec<usize>> = (0..size)
        .map(|mut k| {
            let mut p = vec![0; n];
            for c in p.iter_mut().rev() {
                *c = k % side;
                k /= side;
            }
            p
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut tie: Vec<usize> = (0..size).collect();
            tie.shuffle(&mut rng);
            let mut o: Vec<usize> = (0..size).collect();
            o.sort_by_key(|e| (points[*e][i], tie[*e]));
            o
        })
        .collect();
    let names = points
        .iter()
        .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_"))
        .collect();
    let order = MultiOrder::new(names, orders)?;
    let homomorphism = (0..size).all(|x| {
        (0..size).all(|y| (0..n).all(|i| points[x][i] >= points[y][i] || order.less(i, x, y)))
    });
    Ok(Linearization {
        order,
        points,
        homomorphism,
    })
}

/// The first distinct pair (by index) tied in some coordinate, with that
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Incomparable {
    pub first: usize,
    pub second: usize,
    pub order: usize,
}

/// Whether every two distinct points differ in every coordinate, so that
/// the coordinatewise orders are total on the set.
pub fn pairwise_comparable<T: Ord + std::fmt::Debug>(points: &[Vec<T>]) -> Result<Option<Incomparable>> {
    for (a, p) in points.iter().enumerate() {
        if points[..a].contains(p) {
            return Err(Error::DuplicatePoint(format!("{p:?}")));
        }
    }
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if let Some(i) = (0..points[a].len()).find(|i| points[a][*i] == points[b][*i]) {
                return Ok(Some(Incomparable {
                    first: a,
                    second: b,
                    order: i,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(n: usize, universe: &[&str], orders: &[&[&str]]) -> MultiOrderFile {
        MultiOrderFile {
            n,
            universe: universe.iter().map(|s| s.to_string()).collect(),
            orders: orders.iter().map(|o| o.iter().map(|s| s.to_string()).collect()).collect(),
        }
    }

    #[test]
    fn validation() {
        assert!(validate(&file(2, &["a", "b"], &[&["a", "b"], &["b", "a"]])).is_ok());
        let v = validate(&file(2, &["a", "b"], &[&["a", "b"], &["a", "a"]])).unwrap_err();
        assert_eq!(v.order, Some(1));
        assert!(validate(&file(2, &[], &[&[], &[]])).is_ok());
    }

    #[test]
    fn multicut_counts() {
        assert_eq!(enumerate_multicuts(&MultiOrder::chain(2, 2)).len(), 9);
        assert_eq!(enumerate_multicuts(&MultiOrder::chain(3, 1)).len(), 4);
        let none = enumerate_multicuts(&MultiOrder::empty(2));
        assert_eq!(none, vec![MultiCut { cuts: vec![0, 0] }]);
    }

    #[test]
    fn grid_embedding_of_a_crossing() {
        let b = MultiOrder::from_file(&file(2, &["a", "b"], &[&["a", "b"], &["b", "a"]])).unwrap();
        let g = grid_embed(&b);
        assert_eq!(g.points["a"], vec![0, 1]);
        assert_eq!(g.points["b"], vec![1, 0]);
        assert!(g.verified);
        let c = grid_embed(&MultiOrder::chain(3, 1));
        assert_eq!(c.points["2"], vec![2]);
    }

    #[test]
    fn linearized_grids() {
        let l = linearize_grid(1, 1, 0, 64).unwrap();
        assert_eq!(l.order.order(0), &[0, 1]);
        let l = linearize_grid(1, 2, 0, 64).unwrap();
        assert_eq!(l.order.len(), 4);
        assert!(l.homomorphism);
        let l = linearize_grid(2, 2, 5, 64).unwrap();
        assert!(l.homomorphism);
        assert!(linearize_grid(4, 2, 0, 64).unwrap_err().is_budget());
    }

    #[test]
    fn rationals_are_not_generic() {
        let pts = vec![vec![0, 1], vec![0, 2]];
        let c = pairwise_comparable(&pts).unwrap().unwrap();
        assert_eq!((c.first, c.second, c.order), (0, 1, 0));
        assert!(pairwise_comparable(&[vec![0, 1], vec![1, 2]]).unwrap().is_none());
        assert!(pairwise_comparable(&[vec![3, 3]]).unwrap().is_none());
        assert!(pairwise_comparable(&[vec![1], vec![1]]).is_err());
    }
}
