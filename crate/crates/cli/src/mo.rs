//! The `mo` subcommands.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::json;

use opdim_core::logic::parse_partitioned;
use opdim_core::multiorder::{
    amalgamate, check_embedding, check_mop_witness, enumerate_multicuts, extension_failure, generate_generic,
    grid_embed, linearize_grid, MultiOrderFile, PictureWitness,
};
use opdim_core::{Context, Error, MultiOrder};

use crate::host::{load, on_host};
use crate::{json, Failure, MoCommand, Payload, RunConfig};

/// Largest multi-cut list enumerated.
const MAX_CUTS: u128 = 1_000_000;

fn multiorder(path: &str, cfg: &RunConfig) -> Result<MultiOrder, Failure> {
    let file: MultiOrderFile = json(path)?;
    Ok(from_file(&file, cfg)?)
}

fn from_file(file: &MultiOrderFile, cfg: &RunConfig) -> opdim_core::Result<MultiOrder> {
    if file.universe.len() > cfg.max_points {
        return Err(Error::CapExceeded {
            size: file.universe.len() as u128,
            cap: cfg.max_points as u128,
        });
    }
    MultiOrder::from_file(file)
}

/// An embedding given as a name map, as element indices.
fn indices(a: &MultiOrder, b: &MultiOrder, map: &BTreeMap<String, String>) -> opdim_core::Result<Vec<usize>> {
    a.universe()
        .iter()
        .map(|x| {
            let y = map
                .get(x)
                .ok_or_else(|| Error::NotEmbedding(format!("`{x}` is not mapped")))?;
            b.element(y)
        })
        .collect()
}

fn names(from: &MultiOrder, to: &MultiOrder, map: &[usize]) -> BTreeMap<String, String> {
    from.universe()
        .iter()
        .zip(map)
        .map(|(x, y)| (x.clone(), to.universe()[*y].clone()))
        .collect()
}

#[derive(Deserialize)]
struct AmalgamFile {
    a: MultiOrderFile,
    b: MultiOrderFile,
    c: MultiOrderFile,
    e1: BTreeMap<String, String>,
    e2: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct PictureFile {
    source: MultiOrderFile,
    map: BTreeMap<String, Vec<String>>,
    formula: String,
    object_vars: Vec<String>,
    #[serde(default)]
    param_vars: Option<Vec<String>>,
}

pub(crate) fn run(cmd: &MoCommand, cfg: &RunConfig) -> Result<Payload, Failure> {
    match cmd {
        MoCommand::Gen { n, size } => {
            let b = generate_generic(*n, *size, cfg.seed, cfg.max_points)?;
            Payload::new(
                &json!({"multiorder": b.to_file()}),
                format!("{n}-multi-order on {size} points (seed {})", cfg.seed),
            )
        }
        MoCommand::Cuts { file, list } => {
            let b = multiorder(file, cfg)?;
            let count = (b.len() as u128 + 1).checked_pow(b.n() as u32).unwrap_or(u128::MAX);
            if count > MAX_CUTS {
                return Err(Error::SearchOverflow {
                    what: "multi-cuts",
                    size: count,
                    bound: MAX_CUTS,
                }
                .into());
            }
            let cuts = enumerate_multicuts(&b);
            let shown: Option<Vec<Vec<usize>>> = list.then(|| cuts.iter().map(|c| c.cuts.clone()).collect());
            Payload::new(
                &json!({"n": b.n(), "size": b.len(), "count": cuts.len(), "multicuts": shown}),
                format!("{} multi-cuts", cuts.len()),
            )
        }
        MoCommand::Embed { file } => {
            let e = grid_embed(&multiorder(file, cfg)?);
            let verdict = if e.verified { "verified" } else { "NOT verified" };
            Payload::new(&e, format!("embedding into {}^{}: {verdict}", e.side, e.n))
        }
        MoCommand::Linearize { side_log, n } => {
            let l = linearize_grid(*side_log, *n, cfg.seed, cfg.max_points)?;
            Payload::new(
                &json!({
                    "side": 1usize << side_log,
                    "n": n,
                    "points": l.order.len(),
                    "homomorphism": l.homomorphism,
                    "multiorder": l.order.to_file(),
                }),
                format!(
                    "(2^{side_log})^{n} linearized; injective homomorphism: {}",
                    l.homomorphism
                ),
            )
        }
        MoCommand::Amalgamate { file } => {
            let f: AmalgamFile = json(file)?;
            let (a, b, c) = (from_file(&f.a, cfg)?, from_file(&f.b, cfg)?, from_file(&f.c, cfg)?);
            let e1 = indices(&a, &b, &f.e1)?;
            let e2 = indices(&a, &c, &f.e2)?;
            let am = amalgamate(&a, &b, &c, &e1, &e2)?;
            let agree = e1.iter().zip(&e2).all(|(x, y)| am.f[*x] == am.g[*y]);
            let verified =
                agree && check_embedding(&b, &am.d, &am.f).is_ok() && check_embedding(&c, &am.d, &am.g).is_ok();
            Payload::new(
                &json!({
                    "d": am.d.to_file(),
                    "f": names(&b, &am.d, &am.f),
                    "g": names(&c, &am.d, &am.g),
                    "verified": verified,
                }),
                format!("amalgam on {} points; embeddings verified: {verified}", am.d.len()),
            )
        }
        MoCommand::Extcheck { file, k } => {
            let b = multiorder(file, cfg)?;
            if *k > b.len() {
                return Err(Failure::input("InvalidConfig", format!("k = {k} exceeds |B| = {}", b.len())));
            }
            let failure = extension_failure(&b, *k).map(|(s, t)| {
                json!({
                    "subset": s.iter().map(|e| b.universe()[*e].clone()).collect::<Vec<_>>(),
                    "positions": t,
                })
            });
            let holds = failure.is_none();
            Payload::new(
                &json!({"k": k, "holds": holds, "failure": failure}),
                format!("extension property at level {k}: {holds}"),
            )
        }
        MoCommand::Moptest { context, file } => {
            let f: PictureFile = json(file)?;
            let source = from_file(&f.source, cfg)?;
            on_host!(load(context, cfg)?, ctx => moptest(&ctx, source, &f, cfg))
        }
    }
}

fn moptest<C: Context>(ctx: &C, source: MultiOrder, f: &PictureFile, cfg: &RunConfig) -> Result<Payload, Failure> {
    let phi = parse_partitioned(&f.formula, ctx.signature(), &f.object_vars, f.param_vars.as_deref())?;
    let g = source
        .universe()
        .iter()
        .map(|e| {
            f.map
                .get(e)
                .ok_or_else(|| Error::UnknownElement(format!("`{e}` has no image")))?
                .iter()
                .map(|v| ctx.parse_value(v))
                .collect::<opdim_core::Result<Vec<_>>>()
        })
        .collect::<opdim_core::Result<Vec<_>>>()?;
    let report = check_mop_witness(ctx, &PictureWitness { source, g, phi }, cfg.budget)?;
    let how = if report.exhaustive { "exhaustive" } else { "budget" };
    Payload::new(
        &report,
        format!("definable multi-cuts: {}/{} ({how})", report.definable, report.multicuts),
    )
}
