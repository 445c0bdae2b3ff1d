//! A seeded family of order formulas in at most three variables with
//! constants from {0, 1}.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::order::{coordinate_vars, OrderFormula};
use crate::logic::{Formula, Term};
use crate::rational::int;

const HAND_PICKED: &[(&str, usize)] = &[
    ("true", 1),
    ("x0=0", 1),
    ("0<x0 & x0<1", 1),
    ("x0<0 | x0=1", 1),
    ("true", 2),
    ("x0=x1", 2),
    ("x0<x1", 2),
    ("x0<x1 & x1<x0", 2),
    ("x0=0 & x1=1", 2),
    ("exists y. x0<y & y<x1", 2),
    ("x0<x1 & x1<1 & 0<x0", 2),
    ("x0=x1 | x1=0", 2),
    ("true", 3),
    ("x0<x1 & x1<x2", 3),
    ("x0=x1 & x1=x2", 3),
    ("x0=x1 & x1<x2", 3),
    ("x2=0 & x0<x1", 3),
    ("forall y. (x0<y -> x1<y)", 2),
];

fn term(rng: &mut ChaCha8Rng, m: usize, consts: &[i64], bound: Option<&str>) -> Term {
    let extra = usize::from(bound.is_some());
    let k = rng.gen_range(0..m + consts.len() + extra);
    if k < m {
        Term::var(&format!("x{k}"))
    } else if k < m + consts.len() {
        Term::Num(int(consts[k - m]))
    } else {
        Term::var(bound.expect("bound variable"))
    }
}

fn atom(rng: &mut ChaCha8Rng, m: usize, consts: &[i64], bound: Option<&str>) -> Formula {
    // At least one side is a coordinate, so no atom is ground.
    let mut a = Term::var(&format!("x{}", rng.gen_range(0..m)));
    let mut b = term(rng, m, consts, bound);
    for _ in 0..4 {
        if b != a {
            break;
        }
        b = term(rng, m, consts, bound);
    }
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut a, &mut b);
    }
    let f = if rng.gen_bool(0.75) { Formula::lt(a, b) } else { Formula::eq(a, b) };
    if rng.gen_bool(0.2) {
        Formula::not(f)
    } else {
        f
    }
}

fn random_formula(rng: &mut ChaCha8Rng, m: usize, consts: &[i64], bound: Option<&str>, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng, m, consts, bound);
    }
    let a = random_formula(rng, m, consts, bound, depth - 1);
    let b = random_formula(rng, m, consts, bound, depth - 1);
    if rng.gen_bool(0.6) {
        Formula::and(a, b)
    } else {
        Formula::or(a, b)
    }
}

/// The hand-picked formulas followed by `generated` random ones (distinct
/// as printed), m ≤ 3, at most two constants from {0, 1}; about one in
/// five carries an existential quantifier.
pub fn generated_suite(seed: u64, generated: usize) -> Vec<OrderFormula> {
    let mut out: Vec<OrderFormula> = HAND_PICKED
        .iter()
        .map(|(t, m)| OrderFormula::parse(t, Some(*m)).expect("hand-picked formula parses"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let const_sets: [&[i64]; 4] = [&[], &[0], &[1], &[0, 1]];
    let mut made = 0;
    let mut attempts = 0;
    while made < generated && attempts < generated * 50 {
        attempts += 1;
        let m = rng.gen_range(1..=3);
        let consts = *const_sets.choose(&mut rng).expect("nonempty");
        let f = if rng.gen_bool(0.2) {
            Formula::exists("z", random_formula(&mut rng, m, consts, Some("z"), 2))
        } else {
            random_formula(&mut rng, m, consts, None, 2)
        };
        let f = OrderFormula::new(f, coordinate_vars(m)).expect("generated formula is well formed");
        if out.iter().any(|g| g.arity() == f.arity() && g.to_string() == f.to_string()) {
            continue;
        }
        out.push(f);
        made += 1;
    }
    out
}
