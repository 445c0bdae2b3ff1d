//! Satisfiability of conjunctions of order constraints over ℚ.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::rational::{int, midpoint, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Var(usize),
    Const(Rat),
}

/// A conjunction of `a < b`, `a <= b` and `a = b` constraints.
#[derive(Debug, Clone, Default)]
pub struct OrderProblem {
    vars: usize,
    constraints: Vec<(Operand, Operand, Strength)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strength {
    Strict,
    Weak,
}

impl OrderProblem {
    pub fn new(vars: usize) -> Self {
        OrderProblem {
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn lt(&mut self, a: Operand, b: Operand) {
        self.constraints.push((a, b, Strength::Strict));
    }

    pub fn le(&mut self, a: Operand, b: Operand) {
        self.constraints.push((a, b, Strength::Weak));
    }

    pub fn eq(&mut self, a: Operand, b: Operand) {
        self.constraints.push((a.clone(), b.clone(), Strength::Weak));
        self.constraints.push((b, a, Strength::Weak));
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Adds every constraint of `other` (same variables).
    pub fn extend(&mut self, other: &OrderProblem) {
        self.constraints.extend(other.constraints.iter().cloned());
    }

    pub fn truncate(&mut self, len: usize) {
        self.constraints.truncate(len);
    }

    pub fn is_satisfiable(&self) -> bool {
        self.solve().is_some()
    }

    /// A satisfying assignment of the variables, if one exists.
    pub fn solve(&self) -> Option<Vec<Rat>> {
        let mut consts: Vec<Rat> = self
            .constraints
            .iter()
            .flat_map(|(a, b, _)| [a, b])
            .filter_map(|o| match o {
                Operand::Const(r) => Some(r.clone()),
                Operand::Var(_) => None,
            })
            .collect();
        consts.sort();
        consts.dedup();
        let mut g: DiGraph<(), Strength> = DiGraph::new();
        let var_nodes: Vec<NodeIndex> = (0..self.vars).map(|_| g.add_node(())).collect();
        let const_nodes: Vec<NodeIndex> = consts.iter().map(|_| g.add_node(())).collect();
        for w in const_nodes.windows(2) {
            g.add_edge(w[0], w[1], Strength::Strict);
        }
        let node = |o: &Operand| match o {
            Operand::Var(i) => var_nodes[*i],
            Operand::Const(r) => const_nodes[consts.binary_search(r).expect("collected above")],
        };
        for (a, b, s) in &self.constraints {
            // Ground constraints are checked directly.
            if let (Operand::Const(x), Operand::Const(y)) = (a, b) {
                let ok = match s {
                    Strength::Strict => x < y,
                    Strength::Weak => x <= y,
                };
                if !ok {
                    return None;
                }
                continue;
            }
            g.add_edge(node(a), node(b), *s);
        }
        // Components come out in reverse topological order.
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0usize; g.node_count()];
        for (c, members) in sccs.iter().enumerate() {
            for v in members {
                comp[v.index()] = c;
            }
        }
        let const_of = |v: NodeIndex| {
            let i = v.index();
            (i >= self.vars).then(|| consts[i - self.vars].clone())
        };
        let mut fixed: Vec<Option<Rat>> = vec![None; sccs.len()];
        for (c, members) in sccs.iter().enumerate() {
            let mut found = members.iter().filter_map(|v| const_of(*v));
            fixed[c] = found.next();
            if found.next().is_some() {
                return None;
            }
        }
        for e in g.edge_indices() {
            let (a, b) = g.edge_endpoints(e).expect("edge exists");
            if comp[a.index()] == comp[b.index()] && g[e] == Strength::Strict {
                return None;
            }
        }
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
        for e in g.edge_indices() {
            let (a, b) = g.edge_endpoints(e).expect("edge exists");
            let (ca, cb) = (comp[a.index()], comp[b.index()]);
            if ca != cb {
                succ[ca].push(cb);
                pred[cb].push(ca);
            }
        }
        // Smallest constant reachable from each component.
        let mut hi: Vec<Option<Rat>> = vec![None; sccs.len()];
        for c in 0..sccs.len() {
            let mut best = fixed[c].clone();
            for d in &succ[c] {
                if let Some(h) = &hi[*d] {
                    if best.as_ref().map_or(true, |b| h < b) {
                        best = Some(h.clone());
                    }
                }
            }
            hi[c] = best;
        }
        let mut value: Vec<Option<Rat>> = vec![None; sccs.len()];
        for c in (0..sccs.len()).rev() {
            let lo = pred[c]
                .iter()
                .map(|p| value[*p].clone().expect("predecessors come first"))
                .max();
            let v = match (&fixed[c], lo, &hi[c]) {
                (Some(f), lo, _) => {
                    if lo.is_some_and(|l| l >= *f) {
                        return None;
                    }
                    f.clone()
                }
                (None, Some(l), Some(h)) => {
                    if l >= *h {
                        return None;
                    }
                    midpoint(&l, h)
                }
                (None, Some(l), None) => l + int(1),
                (None, None, Some(h)) => h - int(1),
                (None, None, None) => int(0),
            };
            value[c] = Some(v);
        }
        Some(
            var_nodes
                .iter()
                .map(|v| value[comp[v.index()]].clone().expect("assigned"))
                .collect(),
        )
    }
}
