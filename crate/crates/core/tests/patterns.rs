use opdim_core::logic::{parity_combine, parse_partitioned};
use opdim_core::ominimal::{coordinate_pool, standard_grid, DloContext};
use opdim_core::patterns::*;
use opdim_core::rational::{int, ratio};
use opdim_core::{Context, DloSet, FiniteContext, FiniteStructure, PartitionedFormula, Rat, Signature};

const BUDGET: u64 = 1_000_000;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn order(text: &str, x: &[&str], y: &[&str]) -> PartitionedFormula {
    parse_partitioned(text, &Signature::order(), &names(x), Some(&names(y))).unwrap()
}

fn ints(v: &[i64]) -> Vec<Vec<Rat>> {
    v.iter().map(|k| vec![int(*k)]).collect()
}

fn ird(formulas: Vec<PartitionedFormula>, witnesses: Vec<Vec<Vec<Rat>>>) -> Pattern<Rat> {
    let len = witnesses.first().map_or(0, |r| r.len());
    Pattern::new(PatternKind::Ird, formulas, witnesses, len).unwrap()
}

#[test]
fn ird_thresholds_on_the_line() {
    let ctx = DloContext::new();
    let s = DloSet::full(1);
    let psi = order("x<y", &["x"], &["y"]);
    let up = ird(vec![psi.clone()], vec![ints(&[0, 1, 2])]);
    assert!(check_ird(&ctx, &s, &up, BUDGET).unwrap().valid);
    let down = ird(vec![psi], vec![ints(&[2, 1, 0])]);
    let r = check_ird(&ctx, &s, &down, BUDGET).unwrap();
    assert!(!r.valid);
    assert_eq!(r.failing, Some(vec![1]));
    let empty = ird(Vec::new(), Vec::new());
    assert!(check_ird(&ctx, &s, &empty, BUDGET).unwrap().valid);
}

#[test]
fn ict_intervals() {
    let ctx = DloContext::new();
    let s = DloSet::full(1);
    let interval = order("y0<x & x<y1", &["x"], &["y0", "y1"]);
    let pairs = vec![vec![int(0), int(1)], vec![int(1), int(2)], vec![int(2), int(3)]];
    let p = Pattern::new(PatternKind::Ict, vec![interval.clone()], vec![pairs], 3).unwrap();
    assert!(check_ict(&ctx, &s, &p, BUDGET).unwrap().valid);
    // Nested intervals cannot isolate an inner one from the outer.
    let nested = vec![vec![int(0), int(10)], vec![int(1), int(9)], vec![int(2), int(8)]];
    let p = Pattern::new(PatternKind::Ict, vec![interval], vec![nested], 3).unwrap();
    assert!(!check_ict(&ctx, &s, &p, BUDGET).unwrap().valid);
    // The same cut twice.
    let cut = order("x<y", &["x"], &["y"]);
    let p = Pattern::new(PatternKind::Ict, vec![cut.clone(), cut], vec![ints(&[0, 1]), ints(&[0, 1])], 2).unwrap();
    assert!(!check_ict(&ctx, &s, &p, BUDGET).unwrap().valid);
    let empty: Pattern<Rat> = Pattern::new(PatternKind::Ict, Vec::new(), Vec::new(), 3).unwrap();
    assert!(check_ict(&ctx, &s, &empty, BUDGET).unwrap().valid);
}

#[test]
fn selector_overflow_is_reported() {
    let ctx = DloContext::new();
    let psi = order("x<y", &["x"], &["y"]);
    let p = ird(vec![psi.clone(), psi], vec![ints(&[0, 1, 2]), ints(&[0, 1, 2])]);
    let err = check_ird(&ctx, &DloSet::full(1), &p, 8).unwrap_err();
    assert!(err.is_budget());
}

#[test]
fn ird_to_ict_halves_and_verifies() {
    let ctx = DloContext::new();
    let s = DloSet::full(1);
    let p = ird(vec![order("x<y", &["x"], &["y"])], vec![ints(&[0, 1, 2, 3])]);
    let q = ird_to_ict(&p).unwrap();
    assert_eq!((q.depth(), q.length), (1, 2));
    assert_eq!(q.formulas[0].body().to_string(), "~(x<y_0 <-> x<y_1)");
    assert_eq!(q.witnesses[0][1], vec![int(2), int(3)]);
    assert!(check_ict(&ctx, &s, &q, BUDGET).unwrap().valid);
    let odd = ird(vec![order("x<y", &["x"], &["y"])], vec![ints(&[0, 1, 2])]);
    assert_eq!(ird_to_ict(&odd), Err(opdim_core::Error::OddLength(3)));
}

#[test]
fn searches_on_the_line_and_the_plane() {
    let ctx = DloContext::new();
    let grid = standard_grid(&[]);
    let (line, _) = search_ird(&ctx, &DloSet::full(1), &coordinate_pool(1, false), 2, 2, &grid, BUDGET).unwrap();
    assert_eq!(line, SearchOutcome::NoneExhaustive);
    let (plane, _) = search_ird(&ctx, &DloSet::full(2), &coordinate_pool(2, false), 2, 2, &grid, BUDGET).unwrap();
    let p = plane.found().expect("depth 2 in the plane");
    assert!(check_ird(&ctx, &DloSet::full(2), p, BUDGET).unwrap().valid);
    // Dropping a row keeps a pattern.
    assert!(check_ird(&ctx, &DloSet::full(2), &p.drop_row(0), BUDGET).unwrap().valid);
    let (tiny, _) = search_ird(&ctx, &DloSet::full(2), &coordinate_pool(2, false), 2, 2, &grid, 3).unwrap();
    assert_eq!(tiny, SearchOutcome::NoneBudget);
}

#[test]
fn pure_equality_has_no_ird_rows() {
    let ctx = FiniteContext::new(FiniteStructure::pure_equality(5));
    let s = ctx.full_set(1);
    let eq = vec![parse_partitioned("x=y", ctx.signature(), &names(&["x"]), None).unwrap()];
    let grid: Vec<usize> = (0..5).collect();
    let (r, _) = search_ird(&ctx, &s, &eq, 1, 2, &grid, BUDGET).unwrap();
    assert_eq!(r, SearchOutcome::NoneExhaustive);
    let mut both = eq.clone();
    both.push(parse_partitioned("~x=y", ctx.signature(), &names(&["x"]), None).unwrap());
    let (r, _) = search_ird(&ctx, &s, &both, 1, 3, &grid, BUDGET).unwrap();
    assert_eq!(r, SearchOutcome::NoneExhaustive);
}

#[test]
fn dp_rank_lower_bounds() {
    let ctx = DloContext::new();
    let grid = standard_grid(&[]);
    let interval = vec![order("y0<x & x<y1", &["x"], &["y0", "y1"])];
    let line = dp_rank_lower(&ctx, &DloSet::full(1), &interval, 2, &grid, 2, BUDGET).unwrap();
    assert!(line.value >= 1);
    let plane = dp_rank_lower(&ctx, &DloSet::full(2), &coordinate_pool(2, true), 2, &grid, 2, BUDGET).unwrap();
    assert_eq!(plane.value, 2);
    // Equality singles out one element among `length` distinct ones, so a
    // pure set only stays at 0 when it is smaller than the length.
    let small = FiniteContext::new(FiniteStructure::pure_equality(2));
    let eq = vec![parse_partitioned("x=y", small.signature(), &names(&["x"]), None).unwrap()];
    let r = dp_rank_lower(&small, &small.full_set(1), &eq, 3, &[0, 1], 2, BUDGET).unwrap();
    assert_eq!((r.value, r.stopped), (0, "none_exhaustive"));
    let big = FiniteContext::new(FiniteStructure::pure_equality(4));
    let r = dp_rank_lower(&big, &big.full_set(1), &eq, 3, &[0, 1, 2, 3], 2, BUDGET).unwrap();
    assert_eq!(r.value, 1);
}

#[test]
fn staircase_alternation_gives_ird() {
    let ctx = DloContext::new();
    let s = DloSet::full(2);
    let phi = order("x0<y0 & x1<y1", &["x0", "x1"], &["y0", "y1"]);
    // b_q runs up in the first coordinate and down in the second.
    let seq: Vec<Vec<Rat>> = (0..9).map(|q| vec![int(q - 4), int(4 - q)]).collect();
    let a = vec![ratio(-3, 2), ratio(-3, 2)];
    let values: Vec<bool> = seq.iter().map(|b| b[0] > a[0] && b[1] > a[1]).collect();
    assert_eq!(alternation(&values).unwrap().len(), 3);
    let p = ird_from_alternation(&ctx, &s, &a, &phi, &seq, 2, BUDGET).unwrap().expect("pattern");
    assert_eq!(p.depth(), 2);
    assert!(check_ird(&ctx, &s, &p, BUDGET).unwrap().valid);
    let constant: Vec<Vec<Rat>> = (0..4).map(|q| vec![int(q), int(q)]).collect();
    let low = vec![int(-10), int(-10)];
    assert!(ird_from_alternation(&ctx, &s, &low, &phi, &constant, 2, BUDGET).unwrap().is_none());
}

#[test]
fn parity_of_a_staircase() {
    let ctx = DloContext::new();
    let phi = order("x<y", &["x"], &["y"]);
    for n in 0..4usize {
        let psi = parity_combine(&phi, n + 1).unwrap();
        let prepared = ctx.prepare(&psi).unwrap();
        // φ(0, b_{q,i}) holds iff q > i: n + 1 thresholds along q.
        let values: Vec<bool> = (0..=2 * (n as i64 + 1))
            .map(|t| {
                let q = ratio(t, 2) - ratio(1, 4);
                let b: Vec<Rat> = (0..=n as i64).map(|i| &q - int(i)).collect();
                ctx.holds(&prepared, &[int(0)], &b).unwrap()
            })
            .collect();
        assert_eq!(alternation(&values).unwrap().len(), n + 2, "n = {n}");
    }
}

#[test]
fn json_round_trip() {
    let ctx = DloContext::new();
    let p = ird(vec![order("x<y", &["x"], &["y"])], vec![vec![vec![ratio(1, 2)], vec![int(3)]]]);
    let text = p.to_json(&ctx);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["depth"], 1);
    assert_eq!(v["witnesses"][0][0][0], "1/2");
    assert_eq!(Pattern::from_json(&ctx, &text).unwrap(), p);
}
