use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use super::formula::{Formula, PartitionedFormula, Term};
use super::structure::{decode, encode, FiniteStructure};
use crate::error::{Error, Result};
use crate::rational::format_rat;

#[derive(Debug, Clone, Copy)]
enum Arg {
    Slot(usize),
    Elem(usize),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Rel(usize, Vec<Arg>),
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

/// A formula resolved against a structure: relation names become table
/// indices, variables become environment slots. The first `arity` slots
/// hold the variables passed to [`Compiled::new`].
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    arity: usize,
    slots: usize,
}

impl Compiled {
    pub fn new(m: &FiniteStructure, f: &Formula, vars: &[String]) -> Result<Self> {
        let mut scope: Vec<(String, usize)> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut slots = vars.len();
        let root = compile(m, f, &mut scope, &mut slots)?;
        Ok(Compiled {
            root,
            arity: vars.len(),
            slots,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Truth value under `values` (one element per compiled variable).
    pub fn eval(&self, m: &FiniteStructure, values: &[usize]) -> bool {
        let mut env = vec![0; self.slots];
        env[..self.arity].copy_from_slice(&values[..self.arity]);
        run(m, &self.root, &mut env)
    }

    pub(crate) fn eval_in(&self, m: &FiniteStructure, env: &mut Vec<usize>) -> bool {
        env.resize(self.slots.max(env.len()), 0);
        run(m, &self.root, env)
    }
}

fn resolve(m: &FiniteStructure, t: &Term, scope: &[(String, usize)]) -> Result<Arg> {
    match t {
        Term::Var(v) => scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|(_, s)| Arg::Slot(*s))
            .ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Const(c) => m.constant(c).map(Arg::Elem),
        Term::Elem(e) => m.element(e).map(Arg::Elem),
        // A numeral names the element with that name, if any.
        Term::Num(r) => m.element(&format_rat(r)).map(Arg::Elem),
    }
}

fn compile(
    m: &FiniteStructure,
    f: &Formula,
    scope: &mut Vec<(String, usize)>,
    slots: &mut usize,
) -> Result<Node> {
    let mut bin = |a: &Formula, b: &Formula, scope: &mut Vec<(String, usize)>| -> Result<(Box<Node>, Box<Node>)> {
        Ok((
            Box::new(compile(m, a, scope, slots)?),
            Box::new(compile(m, b, scope, slots)?),
        ))
    };
    Ok(match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Atom { rel, args } => {
            let (idx, arity) = m
                .signature()
                .relation(rel)
                .ok_or_else(|| Error::UnknownRelation(rel.clone()))?;
            if arity != args.len() {
                return Err(Error::ArityMismatch {
                    name: rel.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let args = args
                .iter()
                .map(|t| resolve(m, t, scope))
                .collect::<Result<Vec<_>>>()?;
            Node::Rel(idx, args)
        }
        Formula::Eq(a, b) => Node::Eq(resolve(m, a, scope)?, resolve(m, b, scope)?),
        Formula::Not(g) => Node::Not(Box::new(compile(m, g, scope, slots)?)),
        Formula::And(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            Node::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            Node::Or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            Node::Implies(a, b)
        }
        Formula::Iff(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            Node::Iff(a, b)
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let slot = *slots;
            *slots += 1;
            scope.push((v.clone(), slot));
            let body = compile(m, g, scope, slots);
            scope.pop();
            let body = Box::new(body?);
            if matches!(f, Formula::Forall(..)) {
                Node::Forall(slot, body)
            } else {
                Node::Exists(slot, body)
            }
        }
    })
}

fn value(a: Arg, env: &[usize]) -> usize {
    match a {
        Arg::Slot(s) => env[s],
        Arg::Elem(e) => e,
    }
}

fn run(m: &FiniteStructure, node: &Node, env: &mut Vec<usize>) -> bool {
    match node {
        Node::True => true,
        Node::False => false,
        Node::Rel(r, args) => {
            let n = m.size();
            let code = args.iter().fold(0, |acc, a| acc * n + value(*a, env));
            m.table(*r).contains(code)
        }
        Node::Eq(a, b) => value(*a, env) == value(*b, env),
        Node::Not(g) => !run(m, g, env),
        Node::And(a, b) => run(m, a, env) && run(m, b, env),
        Node::Or(a, b) => run(m, a, env) || run(m, b, env),
        Node::Implies(a, b) => !run(m, a, env) || run(m, b, env),
        Node::Iff(a, b) => run(m, a, env) == run(m, b, env),
        Node::Forall(s, g) => (0..m.size()).all(|e| {
            env[*s] = e;
            run(m, g, env)
        }),
        Node::Exists(s, g) => (0..m.size()).any(|e| {
            env[*s] = e;
            run(m, g, env)
        }),
    }
}

/// Tarskian satisfaction of `f` in `m` under `env`.
pub fn evaluate(m: &FiniteStructure, f: &Formula, env: &HashMap<String, usize>) -> Result<bool> {
    let vars = f.free_vars();
    let values = vars
        .iter()
        .map(|v| env.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.clone())))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().any(|e| *e >= m.size()) {
        return Err(Error::UnknownElement("environment value out of range".into()));
    }
    Ok(Compiled::new(m, f, &vars)?.eval(m, &values))
}

/// All assignments to `vars` satisfying `f`, in lexicographic order.
pub fn solutions(m: &FiniteStructure, f: &Formula, vars: &[String]) -> Result<Vec<Vec<usize>>> {
    Ok(solution_set(m, f, vars)?.tuples().collect())
}

/// The realization set of `f` with free variables `vars`.
pub fn solution_set(m: &FiniteStructure, f: &Formula, vars: &[String]) -> Result<DefinableSubset> {
    let c = Compiled::new(m, f, vars)?;
    let n = m.size();
    let mut out = DefinableSubset::empty(n, vars.len())?;
    let mut env = Vec::new();
    for code in 0..out.capacity() {
        let t = decode(n, vars.len(), code);
        env.clear();
        env.extend_from_slice(&t);
        if c.eval_in(m, &mut env) {
            out.bits.insert(code);
        }
    }
    Ok(out)
}

impl PartitionedFormula {
    /// φ(M, b) as a subset of M^|x|.
    pub fn instance(&self, m: &FiniteStructure, params: &[usize]) -> Result<DefinableSubset> {
        if params.len() != self.param_arity() {
            return Err(Error::InvalidFormula(format!(
                "expected {} parameters, got {}",
                self.param_arity(),
                params.len()
            )));
        }
        let c = Compiled::new(m, self.body(), &self.all_free())?;
        instance_with(m, &c, self.object_arity(), params)
    }
}

pub(crate) fn instance_with(
    m: &FiniteStructure,
    c: &Compiled,
    arity: usize,
    params: &[usize],
) -> Result<DefinableSubset> {
    let n = m.size();
    let mut out = DefinableSubset::empty(n, arity)?;
    let mut env = Vec::new();
    for code in 0..out.capacity() {
        env.clear();
        env.extend(decode(n, arity, code));
        env.extend_from_slice(params);
        if c.eval_in(m, &mut env) {
            out.bits.insert(code);
        }
    }
    Ok(out)
}

/// A subset of M^arity, stored as a bitset over tuple codes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefinableSubset {
    universe: usize,
    arity: usize,
    bits: FixedBitSet,
}

impl DefinableSubset {
    pub fn empty(universe: usize, arity: usize) -> Result<Self> {
        let size = universe.checked_pow(arity as u32).filter(|s| *s <= 1 << 26).ok_or(
            Error::CapExceeded {
                size: (universe as u128).saturating_pow(arity as u32),
                cap: 1 << 26,
            },
        )?;
        Ok(DefinableSubset {
            universe,
            arity,
            bits: FixedBitSet::with_capacity(size),
        })
    }

    pub fn full(universe: usize, arity: usize) -> Result<Self> {
        let mut s = Self::empty(universe, arity)?;
        s.bits.insert_range(..);
        Ok(s)
    }

    pub fn from_tuples(universe: usize, arity: usize, tuples: &[Vec<usize>]) -> Result<Self> {
        let mut s = Self::empty(universe, arity)?;
        for t in tuples {
            if t.len() != arity || t.iter().any(|e| *e >= universe) {
                return Err(Error::InvalidStructure(format!("tuple {t:?} is not in M^{arity}")));
            }
            s.bits.insert(encode(universe, t));
        }
        Ok(s)
    }

    pub fn from_codes(universe: usize, arity: usize, codes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(universe, arity)?;
        for c in codes {
            s.bits.insert(c);
        }
        Ok(s)
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// |M|^arity.
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.arity && self.bits.contains(encode(self.universe, tuple))
    }

    pub fn insert(&mut self, tuple: &[usize]) {
        self.bits.insert(encode(self.universe, tuple));
    }

    pub fn codes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.bits.ones().map(|c| decode(self.universe, self.arity, c))
    }

    pub fn first(&self) -> Option<Vec<usize>> {
        self.tuples().next()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        DefinableSubset { bits, ..*self }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        DefinableSubset { bits, ..*self }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        DefinableSubset { bits, ..*self }
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        DefinableSubset { bits, ..*self }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }
}

impl fmt::Debug for DefinableSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::logic::Signature;

    fn chain3() -> FiniteStructure {
        FiniteStructure::chain(3)
    }

    fn env(pairs: &[(&str, usize)]) -> HashMap<String, usize> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &Signature::order()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let m = chain3();
        assert!(evaluate(&m, &f("x<y"), &env(&[("x", 0), ("y", 1)])).unwrap());
        assert!(!evaluate(&m, &f("exists y. x<y"), &env(&[("x", 2)])).unwrap());
        assert!(!evaluate(&m, &f("forall x. exists y. x<y"), &env(&[])).unwrap());
        assert_eq!(
            evaluate(&m, &f("x<y"), &env(&[("x", 0)])),
            Err(Error::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn solution_examples() {
        let m = chain3();
        let xy = vec!["x".to_string(), "y".to_string()];
        assert_eq!(
            solutions(&m, &f("x<y"), &xy).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        let x = vec!["x".to_string()];
        assert_eq!(solutions(&m, &f("x=x"), &x).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert!(solutions(&m, &f("x<x"), &x).unwrap().is_empty());
    }

    #[test]
    fn numerals_name_elements() {
        let m = chain3();
        let x = vec!["x".to_string()];
        assert_eq!(solutions(&m, &f("x<2 & 0<x"), &x).unwrap(), vec![vec![1]]);
        assert!(matches!(solutions(&m, &f("x<7"), &x), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn shadowing() {
        let m = chain3();
        // The inner x is bound; the outer one stays free.
        let g = f("x<y & exists x. y<x");
        assert!(evaluate(&m, &g, &env(&[("x", 0), ("y", 1)])).unwrap());
        assert!(!evaluate(&m, &g, &env(&[("x", 0), ("y", 2)])).unwrap());
    }

    #[test]
    fn set_algebra() {
        let a = DefinableSubset::from_tuples(3, 1, &[vec![0], vec![1]]).unwrap();
        let b = DefinableSubset::from_tuples(3, 1, &[vec![1], vec![2]]).unwrap();
        assert_eq!(a.intersection(&b).len(), 1);
        assert_eq!(a.union(&b).len(), 3);
        assert_eq!(a.complement().tuples().collect::<Vec<_>>(), vec![vec![2]]);
        assert!(a.difference(&b).is_subset(&a));
    }
}
