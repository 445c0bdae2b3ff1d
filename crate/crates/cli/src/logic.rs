//! rank, opdim, dprank, ird and ict.

use serde_json::json;

use opdim_core::patterns::{check_pattern, dp_rank_lower, search_pattern, PatternFile};
use opdim_core::ranks::{op_dimension, op_rank_report, shelah_rank2};
use opdim_core::{PartitionedFormula, Pattern, PatternKind, RankValue};

use crate::host::{base_set, deltas, grid, load, on_host, HostGrid};
use crate::{read, Failure, PatternArgs, Payload, RunConfig, Target};

pub(crate) fn show(r: &RankValue) -> String {
    match r {
        RankValue::Exact(v) => format!("exact {v}"),
        RankValue::AtLeast(v) => format!("at_least {v}"),
    }
}

fn texts(fs: &[PartitionedFormula]) -> Vec<String> {
    fs.iter().map(|f| f.body().to_string()).collect()
}

fn kind_name(kind: PatternKind) -> &'static str {
    match kind {
        PatternKind::Ird => "ird",
        PatternKind::Ict => "ict",
    }
}

pub(crate) fn rank(t: &Target, n: usize, shelah: bool, cfg: &RunConfig) -> Result<Payload, Failure> {
    on_host!(load(&t.context, cfg)?, ctx => rank_in(&ctx, t, n, shelah, cfg))
}

fn rank_in<C: HostGrid>(ctx: &C, t: &Target, n: usize, shelah: bool, cfg: &RunConfig) -> Result<Payload, Failure> {
    let delta: Vec<PartitionedFormula> = deltas(ctx, &t.delta, &t.vars)?.concat();
    let s = base_set(ctx, t.set.as_deref(), &t.vars)?;
    let report = op_rank_report(ctx, &s, &delta, n, cfg.cap)?;
    let mut summary = format!("opR_{n} = {}", show(&report.rank));
    let mut value = json!({
        "context": t.context,
        "delta": texts(&delta),
        "n": n,
        "cap": cfg.cap,
        "rank": report.rank,
        "witness_tree": report.witness_tree,
    });
    if shelah {
        let r2 = shelah_rank2(ctx, &s, &delta, cfg.cap)?;
        summary += &format!(", R(-,-,2) = {}", show(&r2));
        value["shelah_rank2"] = json!(r2);
    }
    Payload::new(&value, summary)
}

pub(crate) fn opdim(t: &Target, cfg: &RunConfig) -> Result<Payload, Failure> {
    on_host!(load(&t.context, cfg)?, ctx => opdim_in(&ctx, t, cfg))
}

fn opdim_in<C: HostGrid>(ctx: &C, t: &Target, cfg: &RunConfig) -> Result<Payload, Failure> {
    let pool = deltas(ctx, &t.delta, &t.vars)?;
    let s = base_set(ctx, t.set.as_deref(), &t.vars)?;
    let (value, traces) = op_dimension(ctx, &s, &pool, cfg.cap)?;
    let per: Vec<_> = pool
        .iter()
        .zip(&traces)
        .map(|(d, tr)| json!({"delta": texts(d), "value": tr.value, "ranks": tr.ranks}))
        .collect();
    Payload::new(
        &json!({"context": t.context, "cap": cfg.cap, "value": value, "pool": per}),
        format!("opD = {value} (cap {})", cfg.cap),
    )
}

pub(crate) fn dprank(t: &Target, length: usize, cfg: &RunConfig) -> Result<Payload, Failure> {
    on_host!(load(&t.context, cfg)?, ctx => dprank_in(&ctx, t, length, cfg))
}

fn dprank_in<C: HostGrid>(ctx: &C, t: &Target, length: usize, cfg: &RunConfig) -> Result<Payload, Failure> {
    let pool = deltas(ctx, &t.delta, &t.vars)?.concat();
    let s = base_set(ctx, t.set.as_deref(), &t.vars)?;
    let g = grid(ctx, cfg, &s, &pool)?;
    let r = dp_rank_lower(ctx, &s, &pool, length, &g, cfg.cap as usize, cfg.budget)?;
    let pattern: Option<PatternFile> = r.pattern.as_ref().map(|p| p.to_file(ctx));
    Payload::new(
        &json!({
            "context": t.context,
            "length": length,
            "cap": cfg.cap,
            "value": r.value,
            "stopped": r.stopped,
            "pattern": pattern,
        }),
        format!("dp-rank ≥ {} (stopped: {})", r.value, r.stopped),
    )
}

pub(crate) fn pattern(a: &PatternArgs, kind: PatternKind, cfg: &RunConfig) -> Result<Payload, Failure> {
    on_host!(load(&a.target.context, cfg)?, ctx => pattern_in(&ctx, a, kind, cfg))
}

fn pattern_in<C: HostGrid>(ctx: &C, a: &PatternArgs, kind: PatternKind, cfg: &RunConfig) -> Result<Payload, Failure> {
    let t = &a.target;
    let name = kind_name(kind);
    if let Some(path) = &a.check {
        let p: Pattern<C::Value> = Pattern::from_json(ctx, &read(path)?)?;
        if p.kind != kind {
            return Err(Failure::input(
                "InvalidFormula",
                format!("{path} holds an {} pattern", kind_name(p.kind)),
            ));
        }
        let vars = p.formulas.first().map_or(t.vars.clone(), |f| f.object_vars().to_vec());
        let s = base_set(ctx, t.set.as_deref(), &vars)?;
        let r = check_pattern(ctx, &s, &p, cfg.selector_bound)?;
        let verdict = if r.valid { "valid" } else { "invalid" };
        return Payload::new(
            &json!({
                "context": t.context,
                "kind": name,
                "mode": "check",
                "depth": p.depth(),
                "length": p.length,
                "check": r,
            }),
            format!("{name} pattern of depth {} and length {}: {verdict}", p.depth(), p.length),
        );
    }
    let pool = deltas(ctx, &t.delta, &t.vars)?.concat();
    let s = base_set(ctx, t.set.as_deref(), &t.vars)?;
    let g = grid(ctx, cfg, &s, &pool)?;
    let (outcome, stats) = search_pattern(ctx, &s, kind, &pool, a.depth, a.length, &g, cfg.budget)?;
    let found: Option<PatternFile> = outcome.found().map(|p| p.to_file(ctx));
    Payload::new(
        &json!({
            "context": t.context,
            "kind": name,
            "mode": "search",
            "depth": a.depth,
            "length": a.length,
            "grid": g.iter().map(|v| ctx.render(v)).collect::<Vec<_>>(),
            "outcome": outcome.label(),
            "pattern": found,
            "stats": stats,
        }),
        format!("{name} depth {} length {}: {}", a.depth, a.length, outcome.label()),
    )
}
