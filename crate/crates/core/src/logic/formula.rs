use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat};

/// Terms are variables, constant symbols, literal elements of a finite
/// structure (`@a`) or rational literals (`3/2`, only meaningful in the
/// dense-order context).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Elem(String),
    Num(Rat),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::Elem(e) => write!(f, "@{e}"),
            Term::Num(r) => f.write_str(&format_rat(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { rel: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom {
            rel: rel.to_string(),
            args,
        }
    }

    /// `a < b` over the relation named `<`.
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::atom("<", vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    // The smart constructors below fold `true`/`false` operands away.

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, x) | (x, Formula::True) => x,
            (a, b) => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, x) | (x, Formula::False) => x,
            (a, b) => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().fold(Formula::True, Formula::and)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().fold(Formula::False, Formula::or)
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut seen, &mut out);
        out
    }

    fn collect_free(
        &self,
        bound: &mut Vec<String>,
        seen: &mut HashSet<String>,
        out: &mut Vec<String>,
    ) {
        let mut visit_term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) && seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| visit_term(t, bound)),
            Formula::Eq(a, b) => {
                visit_term(a, bound);
                visit_term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, seen, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, seen, out);
                b.collect_free(bound, seen, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, seen, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        });
        self.visit_binders(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| f(t)),
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                f(v);
                g.visit_binders(f);
            }
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            _ => {}
        }
    }

    /// Rational literals in increasing order, without repetition.
    pub fn numerals(&self) -> Vec<Rat> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Num(r) = t {
                out.insert(r.clone());
            }
        });
        out.into_iter().collect()
    }

    pub fn has_quantifiers(&self) -> bool {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Not(g) => g.has_quantifiers(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.has_quantifiers() || b.has_quantifiers()
            }
            _ => false,
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let sub = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            other => other.clone(),
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom { rel, args } => Formula::Atom {
                rel: rel.clone(),
                args: args.iter().map(sub).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(sub(a), sub(b)),
            Formula::Not(g) => Formula::Not(Box::new(g.substitute(map))),
            Formula::And(a, b) => Formula::And(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Formula::Or(a, b) => Formula::Or(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let mut inner = map.clone();
                inner.remove(v);
                let free = g.free_vars();
                let captures = inner.iter().any(|(k, t)| {
                    free.contains(k) && matches!(t, Term::Var(w) if w == v)
                });
                let (name, body) = if captures {
                    let mut used = g.all_vars();
                    for t in inner.values() {
                        if let Term::Var(w) = t {
                            used.insert(w.clone());
                        }
                    }
                    let fresh = fresh_name(v, &used);
                    let renamed = g.substitute(&HashMap::from([(v.clone(), Term::Var(fresh.clone()))]));
                    (fresh, renamed.substitute(&inner))
                } else {
                    (v.clone(), g.substitute(&inner))
                };
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(name, Box::new(body))
                } else {
                    Formula::Exists(name, Box::new(body))
                }
            }
        }
    }

    /// Renames free variables (a substitution by variables).
    pub fn rename(&self, map: &HashMap<String, String>) -> Formula {
        let terms = map
            .iter()
            .map(|(k, v)| (k.clone(), Term::Var(v.clone())))
            .collect();
        self.substitute(&terms)
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, need: u8) -> fmt::Result {
        if self.level() < need {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom { rel, args } => {
                if rel.starts_with('<') && args.len() == 2 {
                    if rel == "<" {
                        write!(f, "{}<{}", args[0], args[1])
                    } else {
                        write!(f, "{} {} {}", args[0], rel, args[1])
                    }
                } else {
                    write!(f, "{rel}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")
                }
            }
            Formula::Eq(a, b) => write!(f, "{a}={b}"),
            Formula::Not(g) => {
                f.write_str("~")?;
                g.write_at(f, 5)
            }
            Formula::And(a, b) => {
                a.write_at(f, 4)?;
                f.write_str(" & ")?;
                b.write_at(f, 5)
            }
            Formula::Or(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" | ")?;
                b.write_at(f, 4)
            }
            Formula::Implies(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" -> ")?;
                b.write_at(f, 2)
            }
            Formula::Iff(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" <-> ")?;
                b.write_at(f, 2)
            }
            Formula::Forall(v, g) => {
                write!(f, "forall {v}. ")?;
                g.write_at(f, 0)
            }
            Formula::Exists(v, g) => {
                write!(f, "exists {v}. ")?;
                g.write_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// `base`, or `base_1`, `base_2`, …: the first one not in `used`.
pub(crate) fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !used.contains(c))
        .expect("unbounded supply of names")
}

/// A formula φ(x;y) with its object variables `x` and parameter variables `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionedFormula {
    body: Formula,
    x: Vec<String>,
    y: Vec<String>,
}

impl PartitionedFormula {
    pub fn new(body: Formula, x: Vec<String>, y: Vec<String>) -> Result<Self> {
        let xs: HashSet<&String> = x.iter().collect();
        if xs.len() != x.len() {
            return Err(Error::InvalidFormula("repeated object variable".into()));
        }
        let ys: HashSet<&String> = y.iter().collect();
        if ys.len() != y.len() {
            return Err(Error::InvalidFormula("repeated parameter variable".into()));
        }
        if let Some(v) = x.iter().find(|v| ys.contains(v)) {
            return Err(Error::InvalidFormula(format!(
                "`{v}` is both an object and a parameter variable"
            )));
        }
        if let Some(v) = body
            .free_vars()
            .into_iter()
            .find(|v| !xs.contains(v) && !ys.contains(v))
        {
            return Err(Error::UnboundVariable(v));
        }
        Ok(PartitionedFormula { body, x, y })
    }

    /// Parameters are the free variables of `body` outside `x`, in order of
    /// first occurrence.
    pub fn with_object_vars(body: Formula, x: Vec<String>) -> Result<Self> {
        let y = body
            .free_vars()
            .into_iter()
            .filter(|v| !x.contains(v))
            .collect();
        PartitionedFormula::new(body, x, y)
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn object_vars(&self) -> &[String] {
        &self.x
    }

    pub fn param_vars(&self) -> &[String] {
        &self.y
    }

    pub fn object_arity(&self) -> usize {
        self.x.len()
    }

    pub fn param_arity(&self) -> usize {
        self.y.len()
    }

    /// Free variables in the order `x ++ y`.
    pub fn all_free(&self) -> Vec<String> {
        self.x.iter().chain(self.y.iter()).cloned().collect()
    }

    /// Renames the object variables to `names`, the parameters to `params`.
    pub fn renamed(&self, names: &[String], params: &[String]) -> Result<Self> {
        if names.len() != self.x.len() || params.len() != self.y.len() {
            return Err(Error::InvalidFormula("renaming changes the arity".into()));
        }
        let map: HashMap<String, String> = self
            .x
            .iter()
            .cloned()
            .zip(names.iter().cloned())
            .chain(self.y.iter().cloned().zip(params.iter().cloned()))
            .collect();
        PartitionedFormula::new(self.body.rename(&map), names.to_vec(), params.to_vec())
    }

    pub fn negated(&self) -> Self {
        PartitionedFormula {
            body: Formula::not(self.body.clone()),
            x: self.x.clone(),
            y: self.y.clone(),
        }
    }
}

impl fmt::Display for PartitionedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} ; {}]", self.body, self.x.join(","), self.y.join(","))
    }
}

/// A finite set Δ of partitioned formulas sharing one object-variable sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormulaSet(Vec<PartitionedFormula>);

impl FormulaSet {
    pub fn new(formulas: Vec<PartitionedFormula>) -> Result<Self> {
        if formulas.is_empty() {
            return Err(Error::InvalidFormula("empty formula set".into()));
        }
        let arity = formulas[0].object_arity();
        if formulas.iter().any(|f| f.object_arity() != arity) {
            return Err(Error::InvalidFormula(
                "formulas in a set must share the object sort".into(),
            ));
        }
        Ok(FormulaSet(formulas))
    }

    pub fn single(f: PartitionedFormula) -> Self {
        FormulaSet(vec![f])
    }

    pub fn formulas(&self) -> &[PartitionedFormula] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn object_arity(&self) -> usize {
        self.0[0].object_arity()
    }
}

/// σ ∈ 2^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    bits: u32,
    len: u8,
}

impl SignVector {
    pub fn new(bits: u32, len: usize) -> Self {
        assert!(len <= 31, "sign vectors are limited to 31 entries");
        SignVector {
            bits: bits & ((1u32 << len) - 1),
            len: len as u8,
        }
    }

    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        (0..(1u32 << len)).map(move |b| SignVector::new(b, len))
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i) as u8).collect()
    }
}
