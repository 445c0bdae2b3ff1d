//! Order formulas in m named variables: parsing, diagrams, products and
//! the standard witness grids.

use std::collections::HashMap;
use std::fmt;

use super::cells::{free_classes, Cell, DloSet};
use super::dlo::check_order_formula;
use super::qe::qe_dlo;
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Formula, PartitionedFormula, Signature, Term};
use crate::rational::{int, midpoint, Rat};

/// A formula over {<, =} with rational literals, read as defining a subset
/// of ℚ^m with coordinates `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderFormula {
    formula: Formula,
    vars: Vec<String>,
}

fn indexed(v: &str) -> Option<usize> {
    v.strip_prefix('x')?.parse().ok()
}

/// `x0 … x{m-1}`.
pub fn coordinate_vars(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("x{i}")).collect()
}

impl OrderFormula {
    pub fn new(formula: Formula, vars: Vec<String>) -> Result<Self> {
        check_order_formula(&formula)?;
        if let Some(v) = formula.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::UnboundVariable(v));
        }
        Ok(OrderFormula { formula, vars })
    }

    /// With `m` given the coordinates are x0 … x{m-1}. Otherwise they are
    /// x0 … up to the largest index used when every free variable is of
    /// that form, and the free variables in order of appearance if not.
    pub fn parse(text: &str, m: Option<usize>) -> Result<Self> {
        let formula = parse_formula(text, &Signature::order())?;
        let vars = match m {
            Some(m) => coordinate_vars(m),
            None => {
                let free = formula.free_vars();
                let idx: Option<Vec<usize>> = free.iter().map(|v| indexed(v)).collect();
                match idx {
                    Some(idx) => coordinate_vars(idx.into_iter().max().map_or(0, |k| k + 1)),
                    None => free,
                }
            }
        };
        OrderFormula::new(formula, vars)
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn constants(&self) -> Vec<Rat> {
        let mut c = self.formula.numerals();
        c.sort();
        c.dedup();
        c
    }

    /// The quantifier-free equivalent.
    pub fn qe(&self) -> Result<OrderFormula> {
        Ok(OrderFormula {
            formula: qe_dlo(&self.formula)?,
            vars: self.vars.clone(),
        })
    }

    /// The defined set, over the constants of the formula and `extra`.
    pub fn set_over(&self, extra: &[Rat]) -> Result<DloSet> {
        let qf = qe_dlo(&self.formula)?;
        let mut extra = extra.to_vec();
        extra.extend(self.constants());
        DloSet::from_qf(&qf, &self.vars, &extra, &[])
    }

    pub fn set(&self) -> Result<DloSet> {
        self.set_over(&[])
    }

    /// The same set with coordinates renamed to `names`.
    pub fn renamed(&self, names: &[String]) -> Result<OrderFormula> {
        if names.len() != self.vars.len() {
            return Err(Error::InvalidFormula("renaming changes the arity".into()));
        }
        let map: HashMap<String, Term> = self
            .vars
            .iter()
            .cloned()
            .zip(names.iter().map(|n| Term::var(n)))
            .collect();
        OrderFormula::new(self.formula.substitute(&map), names.to_vec())
    }
}

impl fmt::Display for OrderFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

/// A complete order type of the coordinates over the constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderDiagram {
    constants: Vec<Rat>,
    cell: Cell,
}

impl OrderDiagram {
    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    pub fn constants(&self) -> &[Rat] {
        &self.constants
    }

    fn frame(&self) -> DloSet {
        DloSet::frame(self.cell.len(), self.constants.clone())
    }

    pub fn formula(&self, vars: &[String]) -> Formula {
        self.frame().cell_formula(&self.cell, vars)
    }

    pub fn representative(&self) -> Vec<Rat> {
        self.frame().representative(&self.cell)
    }

    /// Coordinates free to move: one per value not tied to a constant or
    /// to another coordinate.
    pub fn free_coords(&self) -> Vec<usize> {
        free_classes(&self.cell)
    }

    pub fn dimension(&self) -> usize {
        self.free_coords().len()
    }
}

/// The diagrams over the constants of `f` and `extra` that imply `f`.
/// Their union is the set defined by `f`.
pub fn order_diagrams(f: &OrderFormula, extra: &[Rat]) -> Result<Vec<OrderDiagram>> {
    let set = f.set_over(extra)?;
    Ok(set
        .cells()
        .iter()
        .map(|c| OrderDiagram {
            constants: set.constants().to_vec(),
            cell: c.clone(),
        })
        .collect())
}

/// X × Y on the coordinates x0 … x{m0+m1-1}.
pub fn product(f: &OrderFormula, g: &OrderFormula) -> Result<OrderFormula> {
    let m0 = f.arity();
    let all = coordinate_vars(m0 + g.arity());
    let a = f.renamed(&all[..m0])?;
    let b = g.renamed(&all[m0..])?;
    OrderFormula::new(Formula::and(a.formula, b.formula), all)
}

/// Constants, midpoints between consecutive constants and one point beyond
/// each end; {−1, 0, 1} when there are no constants.
pub fn standard_grid(anchors: &[Rat]) -> Vec<Rat> {
    let mut a = anchors.to_vec();
    a.sort();
    a.dedup();
    if a.is_empty() {
        return vec![int(-1), int(0), int(1)];
    }
    let mut out = vec![&a[0] - int(1)];
    for (i, c) in a.iter().enumerate() {
        out.push(c.clone());
        if let Some(d) = a.get(i + 1) {
            out.push(midpoint(c, d));
        }
    }
    out.push(&a[a.len() - 1] + int(1));
    out
}

/// The single-parameter coordinate comparisons x_k < y and y < x_k (and
/// x_k = y when `with_eq`) for k < m.
pub fn coordinate_pool(m: usize, with_eq: bool) -> Vec<PartitionedFormula> {
    let x = coordinate_vars(m);
    let y = vec!["y".to_string()];
    let mut out = Vec::new();
    for k in 0..m {
        let (xk, yv) = (Term::var(&x[k]), Term::var("y"));
        let mut bodies = vec![Formula::lt(xk.clone(), yv.clone()), Formula::lt(yv.clone(), xk.clone())];
        if with_eq {
            bodies.push(Formula::eq(xk, yv));
        }
        for b in bodies {
            out.push(PartitionedFormula::new(b, x.clone(), y.clone()).expect("well-formed comparison"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_counts() {
        let t = OrderFormula::parse("true", Some(2)).unwrap();
        assert_eq!(order_diagrams(&t, &[]).unwrap().len(), 3);
        let e = OrderFormula::parse("x0=x1", Some(2)).unwrap();
        assert_eq!(order_diagrams(&e, &[]).unwrap().len(), 1);
        let one = OrderFormula::parse("true", Some(1)).unwrap();
        let d = order_diagrams(&one, &[int(0)]).unwrap();
        let shown: Vec<String> = d.iter().map(|c| c.formula(one.vars()).to_string()).collect();
        assert_eq!(shown, ["x0<0", "x0=0", "0<x0"]);
    }

    #[test]
    fn variables_are_inferred() {
        let f = OrderFormula::parse("exists y. x<y & y<z", None).unwrap();
        assert_eq!(f.vars(), ["x", "z"]);
        let g = OrderFormula::parse("x2<1", None).unwrap();
        assert_eq!(g.arity(), 3);
        assert!(OrderFormula::parse("x0<x1", Some(1)).is_err());
        assert!(OrderFormula::parse("R(x0,x1)", Some(2)).is_err());
    }

    #[test]
    fn products_rename_apart() {
        let f = OrderFormula::parse("x0<1", Some(1)).unwrap();
        let g = OrderFormula::parse("x0<x1", Some(2)).unwrap();
        let p = product(&f, &g).unwrap();
        assert_eq!(p.arity(), 3);
        assert_eq!(p.to_string(), "x0<1 & x1<x2");
    }

    #[test]
    fn grids() {
        let g = standard_grid(&[int(0), int(1)]);
        let shown: Vec<String> = g.iter().map(crate::rational::format_rat).collect();
        assert_eq!(shown, ["-1", "0", "1/2", "1", "2"]);
        assert_eq!(standard_grid(&[]).len(), 3);
        assert_eq!(coordinate_pool(2, true).len(), 6);
    }
}
