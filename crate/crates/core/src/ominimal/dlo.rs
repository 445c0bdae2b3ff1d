//! (ℚ, <) as a [`Context`]: sets are unions of cells, parameters are
//! rationals drawn from gap grids.

use std::collections::HashMap;

use super::cells::{eval_qf, DloKey, DloSet};
use super::qe::{dnf, normal_dnf, qe_dlo, simplify, Conjunct, OAtom};
use super::solver::{Operand, OrderProblem};
use crate::context::{check_params, Context, Literal};
use crate::error::{Error, Result};
use crate::logic::{Formula, PartitionedFormula, Signature, Term};
use crate::rational::{format_rat, gap_grid, parse_rat, Rat};

/// The symbolic dense order without endpoints.
#[derive(Debug, Clone)]
pub struct DloContext {
    sig: Signature,
}

impl Default for DloContext {
    fn default() -> Self {
        DloContext::new()
    }
}

/// A formula after quantifier elimination, with both sign DNFs cached.
#[derive(Debug, Clone)]
pub struct DloPrepared {
    source: PartitionedFormula,
    qf: Formula,
    numerals: Vec<Rat>,
    pos: Vec<Conjunct>,
    neg: Vec<Conjunct>,
}

impl AsRef<PartitionedFormula> for DloPrepared {
    fn as_ref(&self) -> &PartitionedFormula {
        &self.source
    }
}

impl DloPrepared {
    /// The quantifier-free body.
    pub fn qf(&self) -> &Formula {
        &self.qf
    }
}

/// Rejects anything outside the language {<, =} with rational literals.
pub(crate) fn check_order_formula(f: &Formula) -> Result<()> {
    let mut bad = None;
    f.visit_terms(&mut |t| {
        if matches!(t, Term::Const(_) | Term::Elem(_)) && bad.is_none() {
            bad = Some(format!("term `{t}` in the dense order"));
        }
    });
    if let Some(msg) = bad {
        return Err(Error::Unsupported(msg));
    }
    check_relations(f)
}

fn check_relations(f: &Formula) -> Result<()> {
    match f {
        Formula::Atom { rel, args } => {
            if rel != "<" || args.len() != 2 {
                return Err(Error::UnknownRelation(rel.clone()));
            }
            Ok(())
        }
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => check_relations(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_relations(a)?;
            check_relations(b)
        }
        _ => Ok(()),
    }
}

impl DloContext {
    pub fn new() -> Self {
        DloContext {
            sig: Signature::order(),
        }
    }

    /// An order atom with object variables numbered and parameters fixed.
    fn operand(t: &Term, vars: &HashMap<&str, Operand>) -> Operand {
        match t {
            Term::Var(v) => vars.get(v.as_str()).cloned().expect("variable of a prepared formula"),
            Term::Num(r) => Operand::Const(r.clone()),
            _ => unreachable!("checked when prepared"),
        }
    }
}

fn ground(a: &Operand, b: &Operand, strict: bool) -> Option<bool> {
    match (a, b) {
        (Operand::Const(x), Operand::Const(y)) => Some(if strict { x < y } else { x == y }),
        _ => None,
    }
}

/// The disjuncts of one literal as constraint lists, ground atoms decided.
fn literal_options(l: &Literal<'_, DloPrepared, Rat>) -> Vec<OrderProblem> {
    let f = l.formula;
    let mut vars: HashMap<&str, Operand> = HashMap::new();
    for (i, v) in f.source.object_vars().iter().enumerate() {
        vars.insert(v.as_str(), Operand::Var(i));
    }
    for (v, r) in f.source.param_vars().iter().zip(&l.params) {
        vars.insert(v.as_str(), Operand::Const(r.clone()));
    }
    let source = if l.positive { &f.pos } else { &f.neg };
    let mut out = Vec::new();
    'disjunct: for conj in source {
        let mut cs = OrderProblem::new(f.source.object_arity());
        for atom in conj {
            let (a, b, strict) = match atom {
                OAtom::Lt(a, b) => (a, b, true),
                OAtom::Eq(a, b) => (a, b, false),
            };
            let (a, b) = (DloContext::operand(a, &vars), DloContext::operand(b, &vars));
            match ground(&a, &b, strict) {
                Some(true) => {}
                Some(false) => continue 'disjunct,
                None if strict => cs.lt(a, b),
                None => cs.eq(a, b),
            }
        }
        out.push(cs);
    }
    out
}

fn search(p: &mut OrderProblem, options: &[Vec<OrderProblem>]) -> Option<Vec<Rat>> {
    let Some((first, rest)) = options.split_first() else {
        return p.solve();
    };
    for cs in first {
        let mark = p.len();
        p.extend(cs);
        if p.is_satisfiable() {
            if let Some(x) = search(p, rest) {
                return Some(x);
            }
        }
        p.truncate(mark);
    }
    None
}

impl Context for DloContext {
    type Value = Rat;
    type Set = DloSet;
    type Key = DloKey;
    type Prepared = DloPrepared;

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn prepare(&self, f: &PartitionedFormula) -> Result<DloPrepared> {
        check_order_formula(f.body())?;
        let qf = qe_dlo(f.body())?;
        let pos = normal_dnf(&qf)?;
        let neg = simplify(dnf(&qf, false)?);
        let mut numerals = f.body().numerals();
        numerals.sort();
        numerals.dedup();
        Ok(DloPrepared {
            source: f.clone(),
            qf,
            numerals,
            pos,
            neg,
        })
    }

    fn define(&self, body: &Formula, vars: &[String]) -> Result<DloSet> {
        check_order_formula(body)?;
        let qf = qe_dlo(body)?;
        Ok(DloSet::from_qf(&qf, vars, &[], &[])?.canonical())
    }

    fn full(&self, arity: usize) -> Result<DloSet> {
        Ok(DloSet::full(arity))
    }

    fn arity(&self, s: &DloSet) -> usize {
        s.arity()
    }

    fn is_empty(&self, s: &DloSet) -> bool {
        s.is_empty()
    }

    fn key(&self, s: &DloSet) -> DloKey {
        s.key()
    }

    fn anchor(&self, s: &DloSet, formulas: &[DloPrepared]) -> Result<DloSet> {
        let consts: Vec<Rat> = formulas.iter().flat_map(|f| f.numerals.iter().cloned()).collect();
        Ok(s.pin(&consts))
    }

    fn anchors(&self, s: &DloSet) -> Vec<Rat> {
        s.constants().to_vec()
    }

    fn formula_anchors(&self, f: &DloPrepared) -> Vec<Rat> {
        f.numerals.clone()
    }

    fn candidates(&self, anchors: &[Rat], fresh: usize) -> Vec<Rat> {
        gap_grid(anchors, fresh.max(1))
    }

    fn instance(&self, f: &DloPrepared, params: &[Rat]) -> Result<DloSet> {
        check_params(&f.source, params.len())?;
        let map: HashMap<String, Term> = f
            .source
            .param_vars()
            .iter()
            .cloned()
            .zip(params.iter().map(|r| Term::Num(r.clone())))
            .collect();
        let body = f.qf.substitute(&map);
        Ok(DloSet::from_qf(&body, f.source.object_vars(), params, &f.numerals)?.canonical())
    }

    fn intersect(&self, a: &DloSet, b: &DloSet) -> DloSet {
        a.intersect(b)
    }

    fn difference(&self, a: &DloSet, b: &DloSet) -> DloSet {
        a.difference(b)
    }

    fn satisfy(&self, s: &DloSet, lits: &[Literal<'_, DloPrepared, Rat>]) -> Result<Option<Vec<Rat>>> {
        let mut options = Vec::with_capacity(lits.len() + 1);
        for l in lits {
            check_params(&l.formula.source, l.params.len())?;
            if l.formula.source.object_arity() != s.arity() {
                return Err(Error::InvalidFormula("literal sort differs from the base set".into()));
            }
            let o = literal_options(l);
            if o.is_empty() {
                return Ok(None);
            }
            options.push(o);
        }
        if s.is_empty() {
            return Ok(None);
        }
        if !s.is_full() {
            let cells = s
                .cells()
                .iter()
                .map(|c| {
                    let mut p = OrderProblem::new(s.arity());
                    s.constraints(c, &mut p);
                    p
                })
                .collect();
            options.push(cells);
        }
        options.sort_by_key(|o| o.len());
        let mut p = OrderProblem::new(s.arity());
        Ok(search(&mut p, &options))
    }

    fn holds(&self, f: &DloPrepared, x: &[Rat], params: &[Rat]) -> Result<bool> {
        check_params(&f.source, params.len())?;
        let point: Vec<Rat> = x.iter().chain(params).cloned().collect();
        eval_qf(&f.qf, &f.source.all_free(), &point)
    }

    fn points(&self, _s: &DloSet) -> Option<Vec<Vec<Rat>>> {
        None
    }

    fn render(&self, v: &Rat) -> String {
        format_rat(v)
    }

    fn parse_value(&self, text: &str) -> Result<Rat> {
        parse_rat(text)
    }
}
