//! The satisfiability interface shared by finite structures and the
//! symbolic dense order.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::logic::{solution_set, Compiled, DefinableSubset, FiniteStructure, Formula, PartitionedFormula, Signature};

/// One instance φ(x, b) or its negation.
#[derive(Debug, Clone)]
pub struct Literal<'a, P, V> {
    pub formula: &'a P,
    pub params: Vec<V>,
    pub positive: bool,
}

impl<'a, P, V> Literal<'a, P, V> {
    pub fn new(formula: &'a P, params: Vec<V>, positive: bool) -> Self {
        Literal {
            formula,
            params,
            positive,
        }
    }
}

/// A model (or a symbolic stand-in for one) in which definable sets can be
/// built, intersected and tested for consistency.
///
/// `Set` values are subsets of `M^k` for some arity `k`; parameters and
/// points are tuples of `Value`s.
pub trait Context: Sync {
    type Value: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    type Set: Clone + Eq + Hash + Debug + Send + Sync;
    /// Memo key: two sets with equal keys have equal ranks.
    type Key: Clone + Eq + Hash + Debug + Send + Sync;
    /// A formula resolved against the context.
    type Prepared: AsRef<PartitionedFormula> + Debug + Send + Sync;

    fn signature(&self) -> &Signature;
    fn prepare(&self, f: &PartitionedFormula) -> Result<Self::Prepared>;

    /// The set of `vars`-tuples satisfying `body`.
    fn define(&self, body: &Formula, vars: &[String]) -> Result<Self::Set>;
    fn full(&self, arity: usize) -> Result<Self::Set>;

    fn arity(&self, s: &Self::Set) -> usize;
    fn is_empty(&self, s: &Self::Set) -> bool;
    fn key(&self, s: &Self::Set) -> Self::Key;

    /// Re-expresses `s` so that keys taken below it are exact for
    /// computations with `formulas`.
    fn anchor(&self, s: &Self::Set, formulas: &[Self::Prepared]) -> Result<Self::Set>;
    /// Values that parameter choices below `s` must be placed relative to.
    fn anchors(&self, s: &Self::Set) -> Vec<Self::Value>;
    fn formula_anchors(&self, f: &Self::Prepared) -> Vec<Self::Value>;
    /// Enough values to realize every type of `fresh` new elements over
    /// `anchors`.
    fn candidates(&self, anchors: &[Self::Value], fresh: usize) -> Vec<Self::Value>;

    fn instance(&self, f: &Self::Prepared, params: &[Self::Value]) -> Result<Self::Set>;
    fn intersect(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn difference(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;

    /// A point of `s` satisfying every literal, if one exists.
    fn satisfy(
        &self,
        s: &Self::Set,
        lits: &[Literal<'_, Self::Prepared, Self::Value>],
    ) -> Result<Option<Vec<Self::Value>>>;
    fn holds(&self, f: &Self::Prepared, x: &[Self::Value], params: &[Self::Value]) -> Result<bool>;
    /// Every point of `s`, when `s` is finite.
    fn points(&self, s: &Self::Set) -> Option<Vec<Vec<Self::Value>>>;

    fn render(&self, v: &Self::Value) -> String;
    fn parse_value(&self, text: &str) -> Result<Self::Value>;
}

/// A finite structure as a context: values are element indices.
#[derive(Debug, Clone)]
pub struct FiniteContext {
    m: FiniteStructure,
}

#[derive(Debug, Clone)]
pub struct FinitePrepared {
    source: PartitionedFormula,
    compiled: Compiled,
}

impl AsRef<PartitionedFormula> for FinitePrepared {
    fn as_ref(&self) -> &PartitionedFormula {
        &self.source
    }
}

impl FiniteContext {
    pub fn new(m: FiniteStructure) -> Self {
        FiniteContext { m }
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.m
    }

    /// All of `M^arity`.
    pub fn full_set(&self, arity: usize) -> DefinableSubset {
        DefinableSubset::full(self.m.size(), arity).expect("tuple space within the size cap")
    }

    /// The subset of `M^arity` listed by `tuples`.
    pub fn subset(&self, arity: usize, tuples: &[Vec<usize>]) -> Result<DefinableSubset> {
        DefinableSubset::from_tuples(self.m.size(), arity, tuples)
    }
}

impl Context for FiniteContext {
    type Value = usize;
    type Set = DefinableSubset;
    type Key = DefinableSubset;
    type Prepared = FinitePrepared;

    fn signature(&self) -> &Signature {
        self.m.signature()
    }

    fn prepare(&self, f: &PartitionedFormula) -> Result<FinitePrepared> {
        Ok(FinitePrepared {
            source: f.clone(),
            compiled: Compiled::new(&self.m, f.body(), &f.all_free())?,
        })
    }

    fn define(&self, body: &Formula, vars: &[String]) -> Result<DefinableSubset> {
        solution_set(&self.m, body, vars)
    }

    fn full(&self, arity: usize) -> Result<DefinableSubset> {
        DefinableSubset::full(self.m.size(), arity)
    }

    fn arity(&self, s: &DefinableSubset) -> usize {
        s.arity()
    }

    fn is_empty(&self, s: &DefinableSubset) -> bool {
        s.is_empty()
    }

    fn key(&self, s: &DefinableSubset) -> DefinableSubset {
        s.clone()
    }

    fn anchor(&self, s: &DefinableSubset, _formulas: &[FinitePrepared]) -> Result<DefinableSubset> {
        Ok(s.clone())
    }

    fn anchors(&self, _s: &DefinableSubset) -> Vec<usize> {
        Vec::new()
    }

    fn formula_anchors(&self, _f: &FinitePrepared) -> Vec<usize> {
        Vec::new()
    }

    fn candidates(&self, _anchors: &[usize], _fresh: usize) -> Vec<usize> {
        (0..self.m.size()).collect()
    }

    fn instance(&self, f: &FinitePrepared, params: &[usize]) -> Result<DefinableSubset> {
        check_params(&f.source, params.len())?;
        crate::logic::instance_with(&self.m, &f.compiled, f.source.object_arity(), params)
    }

    fn intersect(&self, a: &DefinableSubset, b: &DefinableSubset) -> DefinableSubset {
        a.intersection(b)
    }

    fn difference(&self, a: &DefinableSubset, b: &DefinableSubset) -> DefinableSubset {
        a.difference(b)
    }

    fn satisfy(
        &self,
        s: &DefinableSubset,
        lits: &[Literal<'_, FinitePrepared, usize>],
    ) -> Result<Option<Vec<usize>>> {
        for l in lits {
            check_params(&l.formula.source, l.params.len())?;
            if l.formula.source.object_arity() != s.arity() {
                return Err(Error::InvalidFormula("literal sort differs from the base set".into()));
            }
        }
        let mut env = Vec::new();
        for x in s.tuples() {
            let ok = lits.iter().all(|l| {
                env.clear();
                env.extend_from_slice(&x);
                env.extend_from_slice(&l.params);
                l.formula.compiled.eval_in(&self.m, &mut env) == l.positive
            });
            if ok {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }

    fn holds(&self, f: &FinitePrepared, x: &[usize], params: &[usize]) -> Result<bool> {
        check_params(&f.source, params.len())?;
        let env: Vec<usize> = x.iter().chain(params).copied().collect();
        Ok(f.compiled.eval(&self.m, &env))
    }

    fn points(&self, s: &DefinableSubset) -> Option<Vec<Vec<usize>>> {
        Some(s.tuples().collect())
    }

    fn render(&self, v: &usize) -> String {
        self.m.universe()[*v].clone()
    }

    fn parse_value(&self, text: &str) -> Result<usize> {
        self.m.element(text)
    }
}

pub(crate) fn check_params(f: &PartitionedFormula, given: usize) -> Result<()> {
    if given != f.param_arity() {
        return Err(Error::InvalidFormula(format!(
            "`{}` takes {} parameters, got {given}",
            f.body(),
            f.param_arity()
        )));
    }
    Ok(())
}
