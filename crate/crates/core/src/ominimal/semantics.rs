//! Direct satisfaction in (ℚ,<), independent of quantifier elimination.
//!
//! A quantifier ranges over one point in every gap between, and one point
//! equal to each of, the values bound so far and the formula's rationals.
//! By homogeneity of (ℚ,<) these representatives realize every 1-type.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{Formula, Term};
use crate::rational::{gap_grid, int, ratio, Rat};

pub type Env = BTreeMap<String, Rat>;

fn value(t: &Term, env: &Env) -> Result<Rat> {
    match t {
        Term::Var(v) => env.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Num(r) => Ok(r.clone()),
        other => Err(Error::Unsupported(format!("term `{other}` in the dense order"))),
    }
}

/// Truth of `f` in (ℚ,<) under `env`.
pub fn holds(f: &Formula, env: &Env) -> Result<bool> {
    let constants = f.numerals();
    let mut env = env.clone();
    eval(f, &mut env, &constants)
}

fn eval(f: &Formula, env: &mut Env, constants: &[Rat]) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom { rel, args } => {
            if rel != "<" || args.len() != 2 {
                return Err(Error::UnknownRelation(rel.clone()));
            }
            value(&args[0], env)? < value(&args[1], env)?
        }
        Formula::Eq(a, b) => value(a, env)? == value(b, env)?,
        Formula::Not(g) => !eval(g, env, constants)?,
        Formula::And(a, b) => eval(a, env, constants)? && eval(b, env, constants)?,
        Formula::Or(a, b) => eval(a, env, constants)? || eval(b, env, constants)?,
        Formula::Implies(a, b) => !eval(a, env, constants)? || eval(b, env, constants)?,
        Formula::Iff(a, b) => eval(a, env, constants)? == eval(b, env, constants)?,
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut anchors: Vec<Rat> = constants.to_vec();
            anchors.extend(env.iter().filter(|(k, _)| *k != v).map(|(_, r)| r.clone()));
            let saved = env.get(v).cloned();
            let mut result = universal;
            for candidate in gap_grid(&anchors, 1) {
                env.insert(v.clone(), candidate);
                let r = eval(g, env, constants)?;
                if r != universal {
                    result = r;
                    break;
                }
            }
            match saved {
                Some(old) => env.insert(v.clone(), old),
                None => env.remove(v),
            };
            result
        }
    })
}

/// Truth of `f` at the point assigning `point[i]` to `vars[i]`.
pub fn holds_at(f: &Formula, vars: &[String], point: &[Rat]) -> Result<bool> {
    let env: Env = vars.iter().cloned().zip(point.iter().cloned()).collect();
    holds(f, &env)
}

/// A point of the set defined by `f` whose coordinates listed in `fixed`
/// take the given values, searching the remaining coordinates over
/// representatives of their types.
pub fn find_witness(
    f: &Formula,
    vars: &[String],
    fixed: &[(usize, Rat)],
) -> Result<Option<Vec<Rat>>> {
    let mut point: Vec<Option<Rat>> = vec![None; vars.len()];
    for (i, r) in fixed {
        point[*i] = Some(r.clone());
    }
    let mut anchors: Vec<Rat> = f.numerals();
    anchors.extend(fixed.iter().map(|(_, r)| r.clone()));
    let free: Vec<usize> = (0..vars.len()).filter(|i| point[*i].is_none()).collect();
    let mut found = None;
    for_each_type(&anchors, free.len(), false, |values| {
        let mut next = values.into_iter();
        let candidate: Vec<Rat> = point
            .iter()
            .map(|p| p.clone().unwrap_or_else(|| next.next().expect("one value per free coordinate")))
            .collect();
        if holds_at(f, vars, &candidate)? {
            found = Some(candidate);
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

/// Calls `visit` on one tuple of `k` rationals per order type over
/// `anchors`, until it returns true. With `strict`, only types whose
/// values are pairwise distinct and avoid the anchors.
pub(crate) fn for_each_type(
    anchors: &[Rat],
    k: usize,
    strict: bool,
    mut visit: impl FnMut(Vec<Rat>) -> Result<bool>,
) -> Result<bool> {
    let mut anchors = anchors.to_vec();
    anchors.sort();
    anchors.dedup();
    let mut place = vec![Place::Anchor(0); k];
    let mut gaps: Vec<Vec<Vec<usize>>> = vec![Vec::new(); anchors.len() + 1];
    place_next(0, &anchors, strict, &mut place, &mut gaps, &mut visit)
}

#[derive(Clone, Copy)]
enum Place {
    Anchor(usize),
    Gap,
}

/// Coordinate `q` goes on an anchor, onto an existing level of a gap, or
/// onto a new level at any position in a gap. Every order type arises from
/// exactly one sequence of such choices.
fn place_next(
    q: usize,
    anchors: &[Rat],
    strict: bool,
    place: &mut Vec<Place>,
    gaps: &mut Vec<Vec<Vec<usize>>>,
    visit: &mut impl FnMut(Vec<Rat>) -> Result<bool>,
) -> Result<bool> {
    if q == place.len() {
        return visit(realize(place, gaps, anchors));
    }
    if !strict {
        for a in 0..anchors.len() {
            place[q] = Place::Anchor(a);
            if place_next(q + 1, anchors, strict, place, gaps, visit)? {
                return Ok(true);
            }
        }
    }
    place[q] = Place::Gap;
    for g in 0..gaps.len() {
        if !strict {
            for l in 0..gaps[g].len() {
                gaps[g][l].push(q);
                let stop = place_next(q + 1, anchors, strict, place, gaps, visit)?;
                gaps[g][l].pop();
                if stop {
                    return Ok(true);
                }
            }
        }
        for l in 0..=gaps[g].len() {
            gaps[g].insert(l, vec![q]);
            let stop = place_next(q + 1, anchors, strict, place, gaps, visit)?;
            gaps[g].remove(l);
            if stop {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn realize(place: &[Place], gaps: &[Vec<Vec<usize>>], anchors: &[Rat]) -> Vec<Rat> {
    let mut out = vec![int(0); place.len()];
    for (q, p) in place.iter().enumerate() {
        if let Place::Anchor(a) = p {
            out[q] = anchors[*a].clone();
        }
    }
    for (g, levels) in gaps.iter().enumerate() {
        let t = levels.len() as i64;
        for (l, coords) in levels.iter().enumerate() {
            let l = l as i64;
            let v = match (g.checked_sub(1).map(|p| &anchors[p]), anchors.get(g)) {
                (None, None) => int(l),
                (None, Some(hi)) => hi - int(t - l),
                (Some(lo), None) => lo + int(l + 1),
                (Some(lo), Some(hi)) => lo + (hi - lo) * ratio(l + 1, t + 1),
            };
            for q in coords {
                out[*q] = v.clone();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};
    use crate::rational::{int, ratio};

    fn f(text: &str) -> Formula {
        parse_formula(text, &Signature::order()).unwrap()
    }

    #[test]
    fn density_and_no_endpoints() {
        let env = Env::from([("x".to_string(), int(0)), ("z".to_string(), ratio(1, 1000))]);
        assert!(holds(&f("exists y. x<y & y<z"), &env).unwrap());
        assert!(holds(&f("forall x. exists y. x<y"), &Env::new()).unwrap());
        assert!(!holds(&f("exists x. forall y. x<y | x=y"), &Env::new()).unwrap());
    }

    #[test]
    fn witnesses_respect_fixed_coordinates() {
        let vars = vec!["x0".to_string(), "x1".to_string()];
        let g = f("x0<x1 & x1<1");
        let w = find_witness(&g, &vars, &[(0, int(0))]).unwrap().unwrap();
        assert_eq!(w[0], int(0));
        assert!(int(0) < w[1] && w[1] < int(1));
        assert!(find_witness(&g, &vars, &[(0, int(2))]).unwrap().is_none());
    }
}
