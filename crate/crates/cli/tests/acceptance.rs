//! The acceptance suite: one PASS/FAIL line per criterion. Runs without
//! the test harness so the lines always reach the output.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opdim_core::logic::{encode_delta, parse_partitioned, FiniteStructure, FormulaSet, Signature};
use opdim_core::multiorder::{enumerate_multicuts, generate_generic, grid_embed, pairwise_comparable, Incomparable};
use opdim_core::ominimal::{
    coordinate_pool, dimension, generated_suite, ird_witness_from_dim, product, standard_grid, Dim,
    DimMethod,
};
use opdim_core::patterns::{check_ict, check_ird, ird_to_ict, search_ird, SearchOutcome, DEFAULT_SELECTOR_BOUND};
use opdim_core::ranks::{gamma_consistent, localized_op_dimension, op_dimension, op_rank, shelah_rank2, DEFAULT_GAMMA_BOUND};
use opdim_core::rational::int;
use opdim_core::{Context, DloContext, FiniteContext, MultiOrder, OrderFormula, PartitionedFormula, RankValue, Rat};

const CAP: u32 = 6;
const BUDGET: u64 = 5_000_000;
/// Length 2 cannot separate dim d from d+1 on a union of two d-dimensional
/// pieces (a diagonal plus a line carries a depth-2 pattern of length 2).
const SEARCH_LENGTH: usize = 3;

fn line(id: u32, pass: bool, detail: String) -> bool {
    println!("criterion {id:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// R(x;y), R(y;x) and x=y over one binary relation.
fn binary_pool() -> Vec<PartitionedFormula> {
    let sig = Signature::binary("R");
    let x = vec!["x".to_string()];
    let y = vec!["y".to_string()];
    ["R(x,y)", "R(y,x)", "x=y"]
        .iter()
        .map(|t| parse_partitioned(t, &sig, &x, Some(&y)).expect("pool formula parses"))
        .collect()
}

/// Every Δ of one or two pool formulas.
const DELTAS: &[&[usize]] = &[&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]];

fn permute_bits(k: usize, bits: u64, s: u32, perm: &[usize]) -> (u64, u32) {
    let mut b = 0u64;
    for a in 0..k {
        for c in 0..k {
            if bits >> (a * k + c) & 1 == 1 {
                b |= 1 << (perm[a] * k + perm[c]);
            }
        }
    }
    let t = (0..k).filter(|a| s >> a & 1 == 1).fold(0u32, |t, a| t | 1 << perm[a]);
    (b, t)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..k {
            if !cur.contains(&e) {
                cur.push(e);
                go(cur, k, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), k, &mut out);
    out
}

/// One (structure, S) pair per isomorphism class, for |M| ≤ 4. Nothing in
/// the suite mentions constants, so ranks are invariant under relabeling.
fn orbit_representatives() -> Vec<(usize, u64, u32)> {
    let mut out = Vec::new();
    for k in 1..=4usize {
        let perms = permutations(k);
        for bits in 0..1u64 << (k * k) {
            for s in 0..1u32 << k {
                let least = perms.iter().map(|p| permute_bits(k, bits, s, p)).min().expect("k ≥ 1");
                if least == (bits, s) {
                    out.push((k, bits, s));
                }
            }
        }
    }
    out
}

fn subset(ctx: &FiniteContext, mask: u32) -> <FiniteContext as Context>::Set {
    let k = ctx.structure().size();
    let tuples: Vec<Vec<usize>> = (0..k).filter(|a| mask >> a & 1 == 1).map(|a| vec![a]).collect();
    ctx.subset(1, &tuples).expect("unary subset")
}

fn criteria_1_2() -> (bool, bool) {
    let pool = binary_pool();
    let reps = orbit_representatives();

    let start = Instant::now();
    let mut pairs = 0u64;
    let mut bad = Vec::new();
    for &(k, bits, s) in &reps {
        let ctx = FiniteContext::new(FiniteStructure::binary_from_bits(k, bits));
        let set = subset(&ctx, s);
        for d in DELTAS {
            let delta: Vec<PartitionedFormula> = d.iter().map(|i| pool[*i].clone()).collect();
            let a = op_rank(&ctx, &set, &delta, 1, CAP);
            let b = shelah_rank2(&ctx, &set, &delta, CAP);
            pairs += 1;
            if a != b {
                bad.push(format!("k={k} bits={bits:#x} S={s:#b} Δ={d:?}: {a:?} vs {b:?}"));
            }
        }
    }
    let t1 = start.elapsed();
    let ok1 = bad.is_empty() && t1 <= Duration::from_secs(300);
    let one = line(
        1,
        ok1,
        format!(
            "opR_1 = R(-,-,2): {pairs} comparisons over {} (M, S) classes with |M| ≤ 4, {} discrepancies, {}{}",
            reps.len(),
            bad.len(),
            secs(t1),
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    );

    let start = Instant::now();
    let mut checks = 0u64;
    let mut skipped = 0u64;
    let mut bad = Vec::new();
    for &(k, bits, s) in &reps {
        if s == 0 {
            continue;
        }
        let m = FiniteStructure::binary_from_bits(k, bits);
        let ctx = FiniteContext::new(m.clone());
        let set = subset(&ctx, s);
        for d in DELTAS {
            let delta: Vec<PartitionedFormula> = d.iter().map(|i| pool[*i].clone()).collect();
            // Two formulas are coded with two distinct elements.
            if d.len() == 2 && k < 2 {
                skipped += 1;
                continue;
            }
            let phi = encode_delta(&FormulaSet::new(delta.clone()).expect("nonempty"), &m).expect("codes fit");
            for n in 1..=2usize {
                let r = op_rank(&ctx, &set, &delta, n, CAP).expect("consistent S");
                for beta in 0..=2usize {
                    let g = gamma_consistent(&ctx, &set, &phi, n, beta, DEFAULT_GAMMA_BOUND).expect("within bound");
                    checks += 1;
                    if g.is_some() != r.at_least(beta as u32) {
                        bad.push(format!("k={k} bits={bits:#x} S={s:#b} Δ={d:?} n={n} β={beta}: Γ {} vs {r:?}", g.is_some()));
                    }
                }
            }
        }
    }
    let two = line(
        2,
        bad.is_empty(),
        format!(
            "Γ_(n,β) consistent ⇔ opR_n ≥ β for n ≤ 2, β ≤ 2: {checks} checks, {} discrepancies, {skipped} two-formula cases on |M| = 1 skipped, {}{}",
            bad.len(),
            secs(start.elapsed()),
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    );
    (one, two)
}

struct Case {
    m: FiniteStructure,
    s: u32,
    delta: Vec<usize>,
    n: usize,
}

fn random_mask(rng: &mut ChaCha8Rng, within: u32) -> u32 {
    loop {
        let m = rng.gen::<u32>() & within;
        if m != 0 {
            return m;
        }
    }
}

fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let k = rng.gen_range(2..=5usize);
    let bits = rng.gen::<u64>() & ((1u64 << (k * k)) - 1);
    let mut delta: Vec<usize> = (0..3).filter(|_| rng.gen_bool(0.5)).collect();
    if delta.is_empty() {
        delta.push(rng.gen_range(0..3));
    }
    Case {
        m: FiniteStructure::binary_from_bits(k, bits),
        s: random_mask(rng, (1 << k) - 1),
        delta,
        n: rng.gen_range(1..=2),
    }
}

fn rank_of(m: &FiniteStructure, s: u32, delta: &[usize], n: usize, pool: &[PartitionedFormula]) -> RankValue {
    let ctx = FiniteContext::new(m.clone());
    let d: Vec<PartitionedFormula> = delta.iter().map(|i| pool[*i].clone()).collect();
    op_rank(&ctx, &subset(&ctx, s), &d, n, CAP).expect("nonempty S")
}

fn criterion_3() -> bool {
    let pool = binary_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut violations = [0u32; 3];
    let mut below_max = 0u32;
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let whole = rank_of(&c.m, c.s, &c.delta, c.n, &pool);
        let sub = random_mask(&mut rng, c.s);
        let fewer: Vec<usize> = c.delta[..rng.gen_range(1..=c.delta.len())].to_vec();
        if rank_of(&c.m, sub, &c.delta, c.n, &pool) > whole || rank_of(&c.m, c.s, &fewer, c.n, &pool) > whole {
            violations[0] += 1;
        }
    }
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let k = c.m.size();
        let other = random_mask(&mut rng, (1 << k) - 1);
        let a = rank_of(&c.m, c.s, &c.delta, c.n, &pool);
        let b = rank_of(&c.m, other, &c.delta, c.n, &pool);
        let joint = rank_of(&c.m, c.s | other, &c.delta, c.n, &pool);
        if joint != a.max(b) {
            violations[1] += 1;
        }
        if joint < a.max(b) {
            below_max += 1;
        }
    }
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let k = c.m.size();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let moved = c.m.permuted(&perm).expect("permutation");
        let s = (0..k).filter(|a| c.s >> a & 1 == 1).fold(0u32, |t, a| t | 1 << perm[a]);
        if rank_of(&moved, s, &c.delta, c.n, &pool) != rank_of(&c.m, c.s, &c.delta, c.n, &pool) {
            violations[2] += 1;
        }
    }
    line(
        3,
        violations == [0, 0, 0],
        format!(
            "monotonicity / union / permutation invariance, 200 cases each: {} / {} / {} violations ({} unions ranked below the max), {}",
            violations[0],
            violations[1],
            violations[2],
            below_max,
            secs(start.elapsed())
        ),
    )
}

fn criterion_4() -> bool {
    let r = pairwise_comparable(&[vec![0, 1], vec![0, 2]]);
    let expected = Incomparable {
        first: 0,
        second: 1,
        order: 0,
    };
    line(
        4,
        r == Ok(Some(expected)),
        format!("pairwise_comparable{{(0,1),(0,2)}} = {r:?}"),
    )
}

fn criterion_5() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut passed = 0;
    for _ in 0..200 {
        let size = rng.gen_range(0..=6usize);
        let n = rng.gen_range(1..=3usize);
        let orders: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                let mut o: Vec<usize> = (0..size).collect();
                o.shuffle(&mut rng);
                o
            })
            .collect();
        let b = MultiOrder::new((0..size).map(|e| format!("e{e}")).collect(), orders).expect("permutations");
        let g = grid_embed(&b);
        let pts: Vec<&Vec<usize>> = b.universe().iter().map(|e| &g.points[e]).collect();
        let in_grid = pts.iter().all(|p| p.len() == n && p.iter().all(|c| *c < size.max(1)));
        let exact = (0..size).all(|x| {
            (0..size).all(|y| x == y || (0..n).all(|i| b.less(i, x, y) == (pts[x][i] < pts[y][i])))
        });
        if g.verified && in_grid && exact {
            passed += 1;
        }
    }
    line(
        5,
        passed == 200,
        format!("grid embeddings preserving and reflecting every order: {passed}/200"),
    )
}

/// An IRD pattern with the set it lives in, on the line, the plane or a
/// finite chain.
enum Source {
    Dlo(opdim_core::DloSet, opdim_core::Pattern<Rat>),
    Finite(FiniteContext, opdim_core::Pattern<usize>),
}

fn ict_of_ird<C: Context>(ctx: &C, s: &C::Set, p: &opdim_core::Pattern<C::Value>) -> (bool, bool) {
    let ird_ok = check_ird(ctx, s, p, DEFAULT_SELECTOR_BOUND).map(|r| r.valid).unwrap_or(false);
    if !ird_ok {
        return (false, false);
    }
    let ict_ok = ird_to_ict(p)
        .and_then(|q| check_ict(ctx, s, &q, DEFAULT_SELECTOR_BOUND))
        .map(|r| r.valid)
        .unwrap_or(false);
    (true, ict_ok)
}

fn criterion_6() -> bool {
    let dlo = DloContext::new();
    let suite: Vec<OrderFormula> = generated_suite(6, 24)
        .into_iter()
        .filter(|f| matches!(dimension(f, DimMethod::Projection).map(|r| r.dim), Ok(Dim::Value(n)) if n > 0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let start = Instant::now();
    let (mut verified, mut transformed) = (0, 0);
    for i in 0..50usize {
        let length = 2 * rng.gen_range(1..=2usize);
        let source = match i % 3 {
            0 => {
                let f = &suite[(i / 3) % suite.len()];
                let w = ird_witness_from_dim(f, length).expect("dimension computes").expect("positive dim");
                let s = dlo.define(f.formula(), f.vars()).expect("order formula");
                Some(Source::Dlo(s, w.pattern))
            }
            1 => {
                let m = rng.gen_range(1..=2usize);
                let depth = rng.gen_range(1..=m);
                let grid: Vec<Rat> = (0..=length as i64).map(int).collect();
                let s = dlo.full(m).expect("full set");
                let (out, _) = search_ird(&dlo, &s, &coordinate_pool(m, false), depth, length, &grid, BUDGET)
                    .expect("search runs");
                match out {
                    SearchOutcome::Found(p) => Some(Source::Dlo(s, p)),
                    _ => None,
                }
            }
            _ => {
                let ctx = FiniteContext::new(FiniteStructure::chain(rng.gen_range(length + 1..=8)));
                let pool: Vec<PartitionedFormula> = ["x<y", "y<x"]
                    .iter()
                    .map(|t| parse_partitioned(t, ctx.signature(), &["x".to_string()], None).expect("parses"))
                    .collect();
                let s = ctx.full_set(1);
                let grid: Vec<usize> = (0..ctx.structure().size()).collect();
                let (out, _) = search_ird(&ctx, &s, &pool, 1, length, &grid, BUDGET).expect("search runs");
                match out {
                    SearchOutcome::Found(p) => Some(Source::Finite(ctx, p)),
                    _ => None,
                }
            }
        };
        let (v, t) = match &source {
            Some(Source::Dlo(s, p)) => ict_of_ird(&dlo, s, p),
            Some(Source::Finite(ctx, p)) => ict_of_ird(ctx, &ctx.full_set(1), p),
            None => (false, false),
        };
        verified += usize::from(v);
        transformed += usize::from(v && t);
    }
    line(
        6,
        verified > 0 && transformed == verified,
        format!(
            "IRD → ICT: {transformed}/{verified} verified even-length IRD patterns transform to valid ICT patterns ({} of 50 cases produced one), {}",
            verified,
            secs(start.elapsed())
        ),
    )
}

fn criterion_7(suite: &[OrderFormula]) -> bool {
    let dlo = DloContext::new();
    let start = Instant::now();
    let mut failures = Vec::new();
    for f in suite {
        let by_diagram = dimension(f, DimMethod::Diagram).expect("dimension").dim;
        let by_projection = dimension(f, DimMethod::Projection).expect("dimension").dim;
        if by_diagram != by_projection {
            failures.push(format!("{f}: diagram {by_diagram} vs projection {by_projection}"));
            continue;
        }
        let d = by_projection.value().unwrap_or(0);
        if d > 0 {
            match ird_witness_from_dim(f, 3) {
                Ok(Some(w)) if w.check.valid && w.pattern.depth() == d => {}
                other => {
                    failures.push(format!("{f}: no verified depth-{d} witness ({:?})", other.map(|w| w.map(|w| w.check))));
                    continue;
                }
            }
        }
        let depth = by_projection.value().map_or(0, |d| d + 1);
        let s = dlo.define(f.formula(), f.vars()).expect("order formula");
        let grid = standard_grid(&f.constants());
        match search_ird(&dlo, &s, &coordinate_pool(f.arity(), true), depth, SEARCH_LENGTH, &grid, BUDGET) {
            Ok((SearchOutcome::NoneExhaustive, _)) => {}
            other => failures.push(format!("{f}: depth {depth} search gave {:?}", other.map(|o| o.0.label()))),
        }
    }
    let t = start.elapsed();
    line(
        7,
        failures.is_empty() && suite.len() >= 30 && t <= Duration::from_secs(600),
        format!(
            "o-minimal dimension on {} formulas: diagram = projection, verified depth-dim witness, none_exhaustive at dim+1; {} failures, {}{}",
            suite.len(),
            failures.len(),
            secs(t),
            failures.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_8(suite: &[OrderFormula]) -> bool {
    let start = Instant::now();
    let dims: Vec<Dim> = suite
        .iter()
        .map(|f| dimension(f, DimMethod::Projection).expect("dimension").dim)
        .collect();
    let mut pairs = 0;
    let mut failures = Vec::new();
    for (i, f) in suite.iter().enumerate() {
        for (j, g) in suite.iter().enumerate() {
            let p = product(f, g).expect("product");
            let expected = match (dims[i], dims[j]) {
                (Dim::Value(a), Dim::Value(b)) => Dim::Value(a + b),
                _ => Dim::Empty,
            };
            let got = dimension(&p, DimMethod::Projection).expect("dimension").dim;
            pairs += 1;
            if got != expected {
                failures.push(format!("{f} × {g}: {got} vs {expected}"));
            }
        }
    }
    let dlo = DloContext::new();
    let lt = parse_partitioned("x<y", dlo.signature(), &["x".to_string()], None).expect("parses");
    let full = dlo.full(1).expect("line");
    let opd: Vec<usize> = [4, 6, 8]
        .iter()
        .map(|cap| localized_op_dimension(&dlo, &full, std::slice::from_ref(&lt), *cap).expect("rank").value)
        .collect();
    line(
        8,
        failures.is_empty() && opd == [1, 1, 1],
        format!(
            "dim(X×Y) = dim X + dim Y on {pairs} suite pairs ({} failures); opD(ℚ, {{x<y}}) at caps 4/6/8 = {opd:?}, {}{}",
            failures.len(),
            secs(start.elapsed()),
            failures.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_9() -> bool {
    let mut bad = Vec::new();
    for k in 1..=6usize {
        let ctx = FiniteContext::new(FiniteStructure::pure_equality(k));
        let x = vec!["x".to_string()];
        let eq = parse_partitioned("x=y", ctx.signature(), &x, None).expect("parses");
        let ne = parse_partitioned("~x=y", ctx.signature(), &x, None).expect("parses");
        let s = ctx.full_set(1);
        let (d, _) = op_dimension(&ctx, &s, &[vec![eq.clone()], vec![ne.clone()], vec![eq.clone(), ne.clone()]], CAP)
            .expect("rank");
        let grid: Vec<usize> = (0..k).collect();
        let (one, _) = search_ird(&ctx, &s, &[eq.clone()], 1, 2, &grid, BUDGET).expect("search");
        let (both, _) = search_ird(&ctx, &s, &[eq, ne], 1, 3, &grid, BUDGET).expect("search");
        if d != 0 || one != SearchOutcome::NoneExhaustive || both != SearchOutcome::NoneExhaustive {
            bad.push(format!("k={k}: opD {d}, {{x=y}} {}, {{x=y, x≠y}} {}", one.label(), both.label()));
        }
    }
    line(
        9,
        bad.is_empty(),
        format!(
            "pure equality, |M| = 1..6: opD = 0 and depth-1 IRD search none_exhaustive; {} failures{}",
            bad.len(),
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_10() -> bool {
    let mut wrong = Vec::new();
    for k in 0..=5usize {
        for n in 1..=3usize {
            for b in [MultiOrder::chain(k, n), generate_generic(n, k, (k * 10 + n) as u64, 64).expect("small")] {
                let cuts = enumerate_multicuts(&b);
                let distinct: HashSet<_> = cuts.iter().collect();
                if cuts.len() != (k + 1).pow(n as u32) || distinct.len() != cuts.len() {
                    wrong.push(format!("k={k} n={n}: {} cuts", cuts.len()));
                }
            }
        }
    }
    let mut unstable = Vec::new();
    for tr in common::TRANSCRIPTS {
        let a = common::transcript(tr);
        let b = common::transcript(tr);
        let golden: Option<serde_json::Value> = std::fs::read_to_string(common::golden_path(tr.name))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok());
        if a != b || golden.as_ref() != Some(&a) {
            unstable.push(tr.name);
        }
    }
    line(
        10,
        wrong.is_empty() && unstable.is_empty(),
        format!(
            "(k+1)^n multi-cuts for k ≤ 5, n ≤ 3: {} mismatches; {} golden transcripts rerun twice, {} unstable {:?}",
            wrong.len(),
            common::TRANSCRIPTS.len(),
            unstable.len(),
            unstable
        ),
    )
}

/// Criterion numbers on the command line restrict the run to those.
fn main() {
    common::in_crate_dir();
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |id: u32| only.is_empty() || only.contains(&id);
    let suite = generated_suite(0, 24);
    let mut results = Vec::new();
    if want(1) || want(2) {
        let (one, two) = criteria_1_2();
        results.extend([one, two]);
    }
    let rest: [(u32, &dyn Fn() -> bool); 8] = [
        (3, &criterion_3),
        (4, &criterion_4),
        (5, &criterion_5),
        (6, &criterion_6),
        (7, &|| criterion_7(&suite)),
        (8, &|| criterion_8(&suite)),
        (9, &criterion_9),
        (10, &criterion_10),
    ];
    for (id, run) in rest {
        if want(id) {
            results.push(run());
        }
    }
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
