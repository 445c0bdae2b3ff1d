//! Quantifier elimination for (ℚ,<) with rational constants.

use std::collections::{BTreeSet, HashMap};

use super::solver::{Operand, OrderProblem};
use crate::error::{Error, Result};
use crate::logic::{Formula, Term};

/// Most disjuncts a normal form may reach before elimination gives up.
const MAX_DISJUNCTS: usize = 200_000;

/// A positive order atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OAtom {
    Lt(Term, Term),
    Eq(Term, Term),
}

impl OAtom {
    fn eq(a: Term, b: Term) -> OAtom {
        if a <= b {
            OAtom::Eq(a, b)
        } else {
            OAtom::Eq(b, a)
        }
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Term) -> OAtom {
        match self {
            OAtom::Lt(a, b) => OAtom::Lt(f(a), f(b)),
            OAtom::Eq(a, b) => OAtom::eq(f(a), f(b)),
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            OAtom::Lt(a, b) => Formula::lt(a.clone(), b.clone()),
            OAtom::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
        }
    }

    /// Truth value when both sides are numerals or syntactically equal.
    fn ground(&self) -> Option<bool> {
        match self {
            OAtom::Lt(a, b) if a == b => Some(false),
            OAtom::Eq(a, b) if a == b => Some(true),
            OAtom::Lt(Term::Num(x), Term::Num(y)) => Some(x < y),
            OAtom::Eq(Term::Num(x), Term::Num(y)) => Some(x == y),
            _ => None,
        }
    }
}

pub type Conjunct = Vec<OAtom>;

fn check_term(t: &Term) -> Result<()> {
    match t {
        Term::Var(_) | Term::Num(_) => Ok(()),
        other => Err(Error::Unsupported(format!(
            "term `{other}` in the dense order (only variables and rationals)"
        ))),
    }
}

/// Negation normal form of a quantifier-free formula, written with positive
/// atoms only: ¬(a<b) is b<a ∨ a=b and ¬(a=b) is a<b ∨ b<a.
pub fn nnf(f: &Formula, positive: bool) -> Result<Formula> {
    Ok(match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Atom { rel, args } => {
            if rel != "<" || args.len() != 2 {
                return Err(Error::UnknownRelation(rel.clone()));
            }
            check_term(&args[0])?;
            check_term(&args[1])?;
            let (a, b) = (args[0].clone(), args[1].clone());
            if positive {
                Formula::lt(a, b)
            } else {
                Formula::or(Formula::lt(b, a.clone()), Formula::Eq(a, args[1].clone()))
            }
        }
        Formula::Eq(a, b) => {
            check_term(a)?;
            check_term(b)?;
            if positive {
                Formula::Eq(a.clone(), b.clone())
            } else {
                Formula::or(Formula::lt(a.clone(), b.clone()), Formula::lt(b.clone(), a.clone()))
            }
        }
        Formula::Not(g) => nnf(g, !positive)?,
        Formula::And(a, b) => {
            if positive {
                Formula::and(nnf(a, true)?, nnf(b, true)?)
            } else {
                Formula::or(nnf(a, false)?, nnf(b, false)?)
            }
        }
        Formula::Or(a, b) => {
            if positive {
                Formula::or(nnf(a, true)?, nnf(b, true)?)
            } else {
                Formula::and(nnf(a, false)?, nnf(b, false)?)
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                Formula::or(nnf(a, false)?, nnf(b, true)?)
            } else {
                Formula::and(nnf(a, true)?, nnf(b, false)?)
            }
        }
        Formula::Iff(a, b) => {
            let both = Formula::and(nnf(a, true)?, nnf(b, true)?);
            let neither = Formula::and(nnf(a, false)?, nnf(b, false)?);
            let mixed1 = Formula::and(nnf(a, true)?, nnf(b, false)?);
            let mixed2 = Formula::and(nnf(a, false)?, nnf(b, true)?);
            if positive {
                Formula::or(both, neither)
            } else {
                Formula::or(mixed1, mixed2)
            }
        }
        Formula::Forall(..) | Formula::Exists(..) => {
            return Err(Error::InvalidFormula("normal forms need a quantifier-free input".into()))
        }
    })
}

/// Disjunctive normal form of a formula already in [`nnf`].
pub fn dnf_of_nnf(f: &Formula) -> Result<Vec<Conjunct>> {
    Ok(match f {
        Formula::True => vec![Vec::new()],
        Formula::False => Vec::new(),
        Formula::Atom { args, .. } => vec![vec![OAtom::Lt(args[0].clone(), args[1].clone())]],
        Formula::Eq(a, b) => vec![vec![OAtom::eq(a.clone(), b.clone())]],
        Formula::Or(a, b) => {
            let mut out = dnf_of_nnf(a)?;
            out.extend(dnf_of_nnf(b)?);
            guard(out.len())?;
            out
        }
        Formula::And(a, b) => {
            // Pruning both sides first keeps products of long chains small.
            let left = simplify(dnf_of_nnf(a)?);
            let right = simplify(dnf_of_nnf(b)?);
            guard(left.len().saturating_mul(right.len()))?;
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            simplify(out)
        }
        _ => return Err(Error::InvalidFormula("expected negation normal form".into())),
    })
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_DISJUNCTS {
        return Err(Error::SearchOverflow {
            what: "disjunctive normal form",
            size: n as u128,
            bound: MAX_DISJUNCTS as u128,
        });
    }
    Ok(())
}

/// DNF of an arbitrary quantifier-free formula (or its negation).
pub fn dnf(f: &Formula, positive: bool) -> Result<Vec<Conjunct>> {
    dnf_of_nnf(&nnf(f, positive)?)
}

/// ∃v. ⋀ atoms, as a conjunction without v.
fn eliminate_conjunct(v: &str, conj: &[OAtom]) -> Option<Conjunct> {
    let is_v = |t: &Term| matches!(t, Term::Var(n) if n == v);
    // An equation v = t lets v be replaced by t.
    let eq = conj.iter().find_map(|a| match a {
        OAtom::Eq(a, b) if is_v(a) && !is_v(b) => Some(b.clone()),
        OAtom::Eq(a, b) if is_v(b) && !is_v(a) => Some(a.clone()),
        _ => None,
    });
    if let Some(t) = eq {
        let sub = |x: &Term| if is_v(x) { t.clone() } else { x.clone() };
        return Some(conj.iter().map(|a| a.map_terms(sub)).collect());
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut rest = Vec::new();
    for a in conj {
        match a {
            OAtom::Lt(x, y) if is_v(x) && is_v(y) => return None,
            OAtom::Eq(x, y) if is_v(x) && is_v(y) => {}
            OAtom::Lt(x, y) if is_v(y) => lower.push(x.clone()),
            OAtom::Lt(x, y) if is_v(x) => upper.push(y.clone()),
            other => rest.push(other.clone()),
        }
    }
    // Density and the absence of endpoints: only l < u needs to survive.
    for l in &lower {
        for u in &upper {
            rest.push(OAtom::Lt(l.clone(), u.clone()));
        }
    }
    Some(rest)
}

fn eliminate(v: &str, body: &Formula) -> Result<Formula> {
    let mut out = Vec::new();
    for c in dnf(body, true)? {
        if let Some(r) = eliminate_conjunct(v, &c) {
            out.push(r);
        }
    }
    Ok(from_dnf(&simplify(out)))
}

fn qe_rec(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Exists(v, g) => eliminate(v, &qe_rec(g)?)?,
        Formula::Forall(v, g) => Formula::not(eliminate(v, &Formula::not(qe_rec(g)?))?),
        Formula::Not(g) => Formula::not(qe_rec(g)?),
        Formula::And(a, b) => Formula::and(qe_rec(a)?, qe_rec(b)?),
        Formula::Or(a, b) => Formula::or(qe_rec(a)?, qe_rec(b)?),
        Formula::Implies(a, b) => Formula::implies(qe_rec(a)?, qe_rec(b)?),
        Formula::Iff(a, b) => Formula::iff(qe_rec(a)?, qe_rec(b)?),
        other => other.clone(),
    })
}

/// An equivalent quantifier-free formula, in simplified disjunctive
/// normal form.
pub fn qe_dlo(f: &Formula) -> Result<Formula> {
    Ok(from_dnf(&normal_dnf(f)?))
}

/// The simplified DNF of [`qe_dlo`].
pub fn normal_dnf(f: &Formula) -> Result<Vec<Conjunct>> {
    let qf = qe_rec(f)?;
    Ok(simplify(dnf(&qf, true)?))
}

/// Evaluates ground atoms, sorts and deduplicates atoms, drops
/// unsatisfiable and subsumed disjuncts.
pub fn simplify(conjuncts: Vec<Conjunct>) -> Vec<Conjunct> {
    let mut kept: BTreeSet<Conjunct> = BTreeSet::new();
    'outer: for c in conjuncts {
        let mut atoms = BTreeSet::new();
        for a in c {
            match a.ground() {
                Some(true) => {}
                Some(false) => continue 'outer,
                None => {
                    atoms.insert(a);
                }
            }
        }
        let atoms: Conjunct = atoms.into_iter().collect();
        if !satisfiable(&atoms) {
            continue;
        }
        if atoms.is_empty() {
            return vec![Vec::new()];
        }
        kept.insert(atoms);
    }
    let all: Vec<Conjunct> = kept.into_iter().collect();
    let mut out = Vec::new();
    for (i, c) in all.iter().enumerate() {
        let subsumed = all
            .iter()
            .enumerate()
            .any(|(j, d)| j != i && d.len() < c.len() && d.iter().all(|a| c.contains(a)));
        if !subsumed {
            out.push(c.clone());
        }
    }
    out
}

/// Whether a conjunction of order atoms has a rational solution.
pub fn satisfiable(conj: &[OAtom]) -> bool {
    fn operand<'a>(t: &'a Term, index: &mut HashMap<&'a str, usize>) -> Operand {
        match t {
            Term::Var(v) => {
                let n = index.len();
                Operand::Var(*index.entry(v.as_str()).or_insert(n))
            }
            Term::Num(r) => Operand::Const(r.clone()),
            _ => Operand::Const(crate::rational::int(0)),
        }
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for a in conj {
        match a {
            OAtom::Lt(x, y) => pairs.push((operand(x, &mut index), operand(y, &mut index), true)),
            OAtom::Eq(x, y) => pairs.push((operand(x, &mut index), operand(y, &mut index), false)),
        }
    }
    let mut p = OrderProblem::new(index.len());
    for (a, b, strict) in pairs {
        if strict {
            p.lt(a, b);
        } else {
            p.eq(a, b);
        }
    }
    p.is_satisfiable()
}


pub fn from_dnf(conjuncts: &[Conjunct]) -> Formula {
    Formula::disjunction(
        conjuncts
            .iter()
            .map(|c| Formula::conjunction(c.iter().map(OAtom::to_formula))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn f(text: &str) -> Formula {
        parse_formula(text, &Signature::order()).unwrap()
    }

    #[test]
    fn eliminates_between() {
        assert_eq!(qe_dlo(&f("exists y. x<y & y<z")).unwrap().to_string(), "x<z");
    }

    #[test]
    fn closed_sentences() {
        assert_eq!(qe_dlo(&f("forall x. exists y. x<y")).unwrap(), Formula::True);
        assert_eq!(qe_dlo(&f("exists x. forall y. x<y | x=y")).unwrap(), Formula::False);
        assert_eq!(qe_dlo(&f("exists x. 0<x & x<0")).unwrap(), Formula::False);
        assert_eq!(qe_dlo(&f("exists x. 0<x & x<1/1000")).unwrap(), Formula::True);
    }

    #[test]
    fn quantifier_free_is_normalized_only() {
        assert_eq!(qe_dlo(&f("x<y")).unwrap().to_string(), "x<y");
        assert_eq!(qe_dlo(&f("y<x & x<y")).unwrap(), Formula::False);
        assert_eq!(qe_dlo(&f("x<y | x<y & y<z")).unwrap().to_string(), "x<y");
        assert_eq!(qe_dlo(&f("~(x=y)")).unwrap().to_string(), "x<y | y<x");
    }

    #[test]
    fn equations_substitute() {
        assert_eq!(qe_dlo(&f("exists y. y=x & y<1")).unwrap().to_string(), "x<1");
        assert_eq!(qe_dlo(&f("exists y. y<x & y<0")).unwrap(), Formula::True);
    }
}
