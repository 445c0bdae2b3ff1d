//! Finite unions of order cells: the exact representation of definable
//! subsets of ℚ^m over a finite set of rational constants.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};
use std::fmt;

use super::solver::{Operand, OrderProblem};
use crate::error::Result;
use crate::logic::{Formula, Term};
use crate::rational::{format_rat, int, ratio, Rat};

/// Where one coordinate sits relative to the constants c_0 < … < c_{k-1}.
///
/// Odd `slot` 2i+1 means "equal to c_i"; even `slot` 2g means "strictly
/// inside gap g" (below c_0 for g = 0, above c_{k-1} for g = k). Inside a
/// gap, `level` orders the coordinates; equal levels mean equal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub slot: u32,
    pub level: u32,
}

impl Pos {
    pub fn in_gap(&self) -> bool {
        self.slot % 2 == 0
    }
}

/// A complete order type of an m-tuple over the constants.
pub type Cell = Vec<Pos>;

/// A subset of ℚ^arity given as a union of cells over sorted constants.
///
/// Pinned constants are fixed by the ambient formulas; unpinned ones are
/// parameters that only matter through their order position (see
/// [`DloSet::key`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DloSet {
    arity: usize,
    consts: Vec<Rat>,
    pinned: Vec<bool>,
    cells: BTreeSet<Cell>,
}

/// Memo key: equal keys mean the sets are images of each other under an
/// order automorphism of ℚ fixing every pinned constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DloKey {
    arity: usize,
    consts: Vec<Option<Rat>>,
    cells: BTreeSet<Cell>,
}

/// One coordinate index per distinct value of the cell lying strictly
/// inside a gap: the coordinates not tied to a constant or to an earlier
/// coordinate.
pub fn free_classes(cell: &Cell) -> Vec<usize> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (i, p) in cell.iter().enumerate() {
        if p.in_gap() && !seen.contains(p) {
            seen.push(*p);
            out.push(i);
        }
    }
    out
}

/// Every cell of arity `m` over `k` constants.
pub fn all_cells(m: usize, k: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    let mut levels = vec![0u32; k + 1];
    extend_cells(m, k, &mut Vec::new(), &mut levels, &mut out);
    out
}

fn extend_cells(m: usize, k: usize, cell: &mut Cell, levels: &mut Vec<u32>, out: &mut Vec<Cell>) {
    if cell.len() == m {
        out.push(cell.clone());
        return;
    }
    for slot in 0..(2 * k + 1) as u32 {
        if slot % 2 == 1 {
            cell.push(Pos { slot, level: 0 });
            extend_cells(m, k, cell, levels, out);
            cell.pop();
            continue;
        }
        let g = (slot / 2) as usize;
        let count = levels[g];
        for j in 0..count {
            cell.push(Pos { slot, level: j });
            extend_cells(m, k, cell, levels, out);
            cell.pop();
        }
        for p in 0..=count {
            let saved = cell.clone();
            for q in cell.iter_mut() {
                if q.slot == slot && q.level >= p {
                    q.level += 1;
                }
            }
            levels[g] += 1;
            cell.push(Pos { slot, level: p });
            extend_cells(m, k, cell, levels, out);
            levels[g] -= 1;
            *cell = saved;
        }
    }
}

fn gap_levels(cell: &Cell, slot: u32) -> u32 {
    cell.iter()
        .filter(|p| p.slot == slot)
        .map(|p| p.level + 1)
        .max()
        .unwrap_or(0)
}

/// `all_cells(m, k).len()`, memoized.
pub fn cell_count(m: usize, k: usize) -> usize {
    static COUNTS: OnceLock<Mutex<HashMap<(usize, usize), usize>>> = OnceLock::new();
    let counts = COUNTS.get_or_init(Default::default);
    if let Some(c) = counts.lock().expect("cell count cache").get(&(m, k)) {
        return *c;
    }
    let c = all_cells(m, k).len();
    counts.lock().expect("cell count cache").insert((m, k), c);
    c
}

impl DloSet {
    pub fn empty(arity: usize) -> Self {
        DloSet {
            arity,
            consts: Vec::new(),
            pinned: Vec::new(),
            cells: BTreeSet::new(),
        }
    }

    /// No cells yet, over the given constants (unpinned).
    pub(crate) fn frame(arity: usize, mut consts: Vec<Rat>) -> Self {
        consts.sort();
        consts.dedup();
        DloSet {
            arity,
            pinned: vec![false; consts.len()],
            consts,
            cells: BTreeSet::new(),
        }
    }

    pub fn full(arity: usize) -> Self {
        DloSet {
            arity,
            consts: Vec::new(),
            pinned: Vec::new(),
            cells: all_cells(arity, 0).into_iter().collect(),
        }
    }

    /// The set of `vars`-tuples satisfying the quantifier-free `f`, over the
    /// constants of `f` together with `extra`.
    pub fn from_qf(f: &Formula, vars: &[String], extra: &[Rat], pinned: &[Rat]) -> Result<Self> {
        let mut consts = f.numerals();
        consts.extend(extra.iter().cloned());
        consts.sort();
        consts.dedup();
        let pin = consts.iter().map(|c| pinned.contains(c)).collect();
        let mut set = DloSet {
            arity: vars.len(),
            consts,
            pinned: pin,
            cells: BTreeSet::new(),
        };
        for cell in all_cells(vars.len(), set.consts.len()) {
            let point = set.representative(&cell);
            if eval_qf(f, vars, &point)? {
                set.cells.insert(cell);
            }
        }
        Ok(set)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn constants(&self) -> &[Rat] {
        &self.consts
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_full(&self) -> bool {
        !self.cells.is_empty() && self.cells.len() == cell_count(self.arity, self.consts.len())
    }

    pub fn key(&self) -> DloKey {
        DloKey {
            arity: self.arity,
            consts: self
                .consts
                .iter()
                .zip(&self.pinned)
                .map(|(c, p)| p.then(|| c.clone()))
                .collect(),
            cells: self.cells.clone(),
        }
    }

    /// A point of the cell.
    pub fn representative(&self, cell: &Cell) -> Vec<Rat> {
        let k = self.consts.len();
        cell.iter()
            .map(|p| {
                if !p.in_gap() {
                    return self.consts[(p.slot / 2) as usize].clone();
                }
                let g = (p.slot / 2) as usize;
                let l = gap_levels(cell, p.slot) as i64;
                let lv = p.level as i64;
                if k == 0 {
                    int(lv)
                } else if g == 0 {
                    &self.consts[0] - int(l - lv)
                } else if g == k {
                    &self.consts[k - 1] + int(lv + 1)
                } else {
                    let (a, b) = (&self.consts[g - 1], &self.consts[g]);
                    a + (b - a) * ratio(lv + 1, l + 1)
                }
            })
            .collect()
    }

    /// The cell containing `point`.
    pub fn cell_of(&self, point: &[Rat]) -> Cell {
        let mut cell: Cell = point
            .iter()
            .map(|v| match self.consts.binary_search(v) {
                Ok(i) => Pos {
                    slot: 2 * i as u32 + 1,
                    level: 0,
                },
                Err(g) => Pos {
                    slot: 2 * g as u32,
                    level: 0,
                },
            })
            .collect();
        for i in 0..cell.len() {
            if cell[i].in_gap() {
                let mut below: Vec<&Rat> = (0..point.len())
                    .filter(|j| cell[*j].slot == cell[i].slot && point[*j] < point[i])
                    .map(|j| &point[j])
                    .collect();
                below.sort();
                below.dedup();
                cell[i].level = below.len() as u32;
            }
        }
        cell
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        point.len() == self.arity && self.cells.contains(&self.cell_of(point))
    }

    pub fn some_point(&self) -> Option<Vec<Rat>> {
        self.cells.iter().next().map(|c| self.representative(c))
    }

    /// Order constraints describing a cell, coordinates as variables.
    pub fn constraints(&self, cell: &Cell, p: &mut OrderProblem) {
        let k = self.consts.len();
        for (i, pos) in cell.iter().enumerate() {
            let g = (pos.slot / 2) as usize;
            if !pos.in_gap() {
                p.eq(Operand::Var(i), Operand::Const(self.consts[g].clone()));
                continue;
            }
            if g > 0 {
                p.lt(Operand::Const(self.consts[g - 1].clone()), Operand::Var(i));
            }
            if g < k {
                p.lt(Operand::Var(i), Operand::Const(self.consts[g].clone()));
            }
            for (j, other) in cell.iter().enumerate().skip(i + 1) {
                if other.slot == pos.slot {
                    match pos.level.cmp(&other.level) {
                        std::cmp::Ordering::Less => p.lt(Operand::Var(i), Operand::Var(j)),
                        std::cmp::Ordering::Greater => p.lt(Operand::Var(j), Operand::Var(i)),
                        std::cmp::Ordering::Equal => p.eq(Operand::Var(i), Operand::Var(j)),
                    }
                }
            }
        }
    }

    /// The same set over the constants plus `extra` (pinned as given).
    pub fn refine(&self, extra: &[Rat], pin: bool) -> DloSet {
        let mut out = self.clone();
        for r in extra {
            out.insert_const(r, pin);
        }
        out
    }

    fn insert_const(&mut self, r: &Rat, pin: bool) {
        let g = match self.consts.binary_search(r) {
            Ok(i) => {
                self.pinned[i] |= pin;
                return;
            }
            Err(g) => g,
        };
        let gap = 2 * g as u32;
        let mut cells = BTreeSet::new();
        for cell in &self.cells {
            let l = gap_levels(cell, gap);
            for p in 0..=2 * l {
                let moved = cell
                    .iter()
                    .map(|q| {
                        if q.slot < gap {
                            *q
                        } else if q.slot > gap {
                            Pos {
                                slot: q.slot + 2,
                                level: q.level,
                            }
                        } else if p % 2 == 0 {
                            let j = p / 2;
                            if q.level < j {
                                *q
                            } else {
                                Pos {
                                    slot: gap + 2,
                                    level: q.level - j,
                                }
                            }
                        } else {
                            let j = p / 2;
                            match q.level.cmp(&j) {
                                std::cmp::Ordering::Less => *q,
                                std::cmp::Ordering::Equal => Pos {
                                    slot: gap + 1,
                                    level: 0,
                                },
                                std::cmp::Ordering::Greater => Pos {
                                    slot: gap + 2,
                                    level: q.level - j - 1,
                                },
                            }
                        }
                    })
                    .collect();
                cells.insert(moved);
            }
        }
        self.cells = cells;
        self.consts.insert(g, r.clone());
        self.pinned.insert(g, pin);
    }

    /// The set over the constants without c_i (valid only if the set does
    /// not depend on c_i; see [`DloSet::canonical`]).
    fn remove_const(&self, i: usize) -> DloSet {
        let (left, at, right) = (2 * i as u32, 2 * i as u32 + 1, 2 * i as u32 + 2);
        let cells = self
            .cells
            .iter()
            .map(|cell| {
                let l1 = gap_levels(cell, left);
                let e = cell.iter().any(|q| q.slot == at) as u32;
                cell.iter()
                    .map(|q| {
                        if q.slot < left {
                            *q
                        } else if q.slot == left {
                            *q
                        } else if q.slot == at {
                            Pos { slot: left, level: l1 }
                        } else if q.slot == right {
                            Pos {
                                slot: left,
                                level: l1 + e + q.level,
                            }
                        } else {
                            Pos {
                                slot: q.slot - 2,
                                level: q.level,
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let mut consts = self.consts.clone();
        consts.remove(i);
        let mut pinned = self.pinned.clone();
        pinned.remove(i);
        DloSet {
            arity: self.arity,
            consts,
            pinned,
            cells,
        }
    }

    /// Drops every unpinned constant the set does not depend on.
    pub fn canonical(mut self) -> DloSet {
        if self.cells.is_empty() {
            return DloSet::empty(self.arity);
        }
        let mut i = self.consts.len();
        while i > 0 {
            i -= 1;
            if self.pinned[i] {
                continue;
            }
            let coarse = self.remove_const(i);
            if coarse.refine(&[self.consts[i].clone()], false).cells == self.cells {
                self = coarse;
            }
        }
        self
    }

    fn aligned(&self, other: &DloSet) -> (DloSet, DloSet) {
        let mut a = self.clone();
        let mut b = other.clone();
        for (c, p) in other.consts.iter().zip(&other.pinned) {
            a.insert_const(c, *p);
        }
        for (c, p) in self.consts.iter().zip(&self.pinned) {
            b.insert_const(c, *p);
        }
        (a, b)
    }

    pub fn intersect(&self, other: &DloSet) -> DloSet {
        let (mut a, b) = self.aligned(other);
        a.cells = a.cells.intersection(&b.cells).cloned().collect();
        a.canonical()
    }

    pub fn union(&self, other: &DloSet) -> DloSet {
        let (mut a, b) = self.aligned(other);
        a.cells = a.cells.union(&b.cells).cloned().collect();
        a.canonical()
    }

    pub fn difference(&self, other: &DloSet) -> DloSet {
        let (mut a, b) = self.aligned(other);
        a.cells = a.cells.difference(&b.cells).cloned().collect();
        a.canonical()
    }

    pub fn is_subset(&self, other: &DloSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Marks the given constants as pinned, inserting them if needed.
    pub fn pin(&self, consts: &[Rat]) -> DloSet {
        self.refine(consts, true)
    }

    /// Renders a cell as a conjunction of order atoms over `vars`.
    pub fn cell_formula(&self, cell: &Cell, vars: &[String]) -> Formula {
        let k = self.consts.len();
        let num = |i: usize| Term::Num(self.consts[i].clone());
        let mut atoms = Vec::new();
        for (i, pos) in cell.iter().enumerate() {
            let x = Term::var(&vars[i]);
            let g = (pos.slot / 2) as usize;
            if !pos.in_gap() {
                atoms.push(Formula::Eq(x, num(g)));
                continue;
            }
            if g > 0 {
                atoms.push(Formula::lt(num(g - 1), x.clone()));
            }
            if g < k {
                atoms.push(Formula::lt(x.clone(), num(g)));
            }
        }
        // Within a gap: a chain through the first coordinate of each level.
        let mut slots: Vec<u32> = cell.iter().filter(|p| p.in_gap()).map(|p| p.slot).collect();
        slots.sort_unstable();
        slots.dedup();
        for slot in slots {
            let mut prev: Option<usize> = None;
            for level in 0..gap_levels(cell, slot) {
                let at: Vec<usize> = (0..cell.len())
                    .filter(|i| cell[*i] == Pos { slot, level })
                    .collect();
                if let Some(p) = prev {
                    atoms.push(Formula::lt(Term::var(&vars[p]), Term::var(&vars[at[0]])));
                }
                for j in &at[1..] {
                    atoms.push(Formula::Eq(Term::var(&vars[at[0]]), Term::var(&vars[*j])));
                }
                prev = Some(at[0]);
            }
        }
        Formula::conjunction(atoms)
    }

    /// The set as a quantifier-free formula (a disjunction of cells).
    pub fn to_formula(&self, vars: &[String]) -> Formula {
        Formula::disjunction(self.cells.iter().map(|c| self.cell_formula(c, vars)))
    }
}

impl fmt::Debug for DloSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (0..self.arity).map(|i| format!("x{i}")).collect();
        let consts: Vec<String> = self
            .consts
            .iter()
            .zip(&self.pinned)
            .map(|(c, p)| format!("{}{}", format_rat(c), if *p { "!" } else { "" }))
            .collect();
        write!(f, "DloSet[{}]{{{}}}", consts.join(","), self.to_formula(&vars))
    }
}

/// Evaluates a quantifier-free order formula at a point.
pub fn eval_qf(f: &Formula, vars: &[String], point: &[Rat]) -> Result<bool> {
    let value = |t: &Term| -> Result<Rat> {
        match t {
            Term::Var(v) => vars
                .iter()
                .position(|x| x == v)
                .map(|i| point[i].clone())
                .ok_or_else(|| crate::error::Error::UnboundVariable(v.clone())),
            Term::Num(r) => Ok(r.clone()),
            other => Err(crate::error::Error::Unsupported(format!("term `{other}` in the dense order"))),
        }
    };
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom { rel, args } => {
            if rel != "<" || args.len() != 2 {
                return Err(crate::error::Error::UnknownRelation(rel.clone()));
            }
            value(&args[0])? < value(&args[1])?
        }
        Formula::Eq(a, b) => value(a)? == value(b)?,
        Formula::Not(g) => !eval_qf(g, vars, point)?,
        Formula::And(a, b) => eval_qf(a, vars, point)? && eval_qf(b, vars, point)?,
        Formula::Or(a, b) => eval_qf(a, vars, point)? || eval_qf(b, vars, point)?,
        Formula::Implies(a, b) => !eval_qf(a, vars, point)? || eval_qf(b, vars, point)?,
        Formula::Iff(a, b) => eval_qf(a, vars, point)? == eval_qf(b, vars, point)?,
        Formula::Forall(..) | Formula::Exists(..) => {
            return Err(crate::error::Error::InvalidFormula("expected a quantifier-free formula".into()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn vars(m: usize) -> Vec<String> {
        (0..m).map(|i| format!("x{i}")).collect()
    }

    fn set(text: &str, m: usize) -> DloSet {
        let f = parse_formula(text, &Signature::order()).unwrap();
        DloSet::from_qf(&f, &vars(m), &[], &[]).unwrap()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(all_cells(2, 0).len(), 3);
        assert_eq!(all_cells(3, 0).len(), 13);
        assert_eq!(all_cells(1, 1).len(), 3);
        assert_eq!(all_cells(1, 2).len(), 5);
        // Two coordinates against one constant: 3 * 3 + 2 ties in gaps
        // + (gap-0 pair orders) ...
        let cells = all_cells(2, 1);
        let distinct: BTreeSet<_> = cells.iter().collect();
        assert_eq!(distinct.len(), cells.len());
        assert_eq!(cells.len(), 13);
    }

    #[test]
    fn representatives_lie_in_their_cells() {
        let s = DloSet::full(3).refine(&[int(0), int(1)], false);
        for c in s.cells() {
            assert_eq!(&s.cell_of(&s.representative(c)), c);
        }
    }

    #[test]
    fn refinement_preserves_the_set() {
        let s = set("x0<x1 & 0<x1", 2);
        let r = s.refine(&[int(-1), ratio(1, 2), int(3)], false);
        for c in all_cells(2, r.constants().len()) {
            let p = r.representative(&c);
            assert_eq!(r.cells().contains(&c), s.contains(&p));
        }
        assert_eq!(r.canonical(), s);
    }

    #[test]
    fn boolean_operations() {
        let a = set("x0<1", 1);
        let b = set("0<x0", 1);
        let both = a.intersect(&b);
        assert!(both.contains(&[ratio(1, 2)]));
        assert!(!both.contains(&[int(1)]));
        assert_eq!(a.union(&b), DloSet::full(1));
        let d = a.difference(&b);
        assert!(d.contains(&[int(0)]) && !d.contains(&[ratio(1, 2)]));
        assert!(both.is_subset(&a));
    }

    #[test]
    fn canonical_drops_irrelevant_constants() {
        let s = set("x0<5 | 5<x0 | x0=5", 1);
        assert_eq!(s.canonical(), DloSet::full(1));
        let pinned = DloSet::full(1).pin(&[int(5)]);
        assert_eq!(pinned.clone().canonical().constants().len(), 1);
    }
}
