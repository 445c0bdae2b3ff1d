//! The `omin` subcommands, all over (ℚ, <).

use serde_json::json;

use opdim_core::ominimal::{dimension, ird_witness_from_dim, order_diagrams, product, Dim, DimMethod};
use opdim_core::rational::format_rat;
use opdim_core::{DloContext, OrderFormula};

use crate::{Failure, Method, OminCommand, Payload, RunConfig};

fn method(m: Method) -> DimMethod {
    match m {
        Method::Diagram => DimMethod::Diagram,
        Method::Projection => DimMethod::Projection,
    }
}

/// dim(X × Y) as predicted from the factors.
fn sum(a: Dim, b: Dim) -> Dim {
    match (a, b) {
        (Dim::Value(x), Dim::Value(y)) => Dim::Value(x + y),
        _ => Dim::Empty,
    }
}

pub(crate) fn run(cmd: &OminCommand, _cfg: &RunConfig) -> Result<Payload, Failure> {
    match cmd {
        OminCommand::Qe { formula, m } => {
            let f = OrderFormula::parse(formula, *m)?;
            let q = f.qe()?;
            Payload::new(
                &json!({"formula": f.to_string(), "vars": f.vars(), "qe": q.to_string()}),
                q.to_string(),
            )
        }
        OminCommand::Dim { formula, m, method: how } => {
            let f = OrderFormula::parse(formula, *m)?;
            let r = dimension(&f, method(*how))?;
            Payload::new(&r, format!("dim = {}", r.dim))
        }
        OminCommand::Cells { formula, m } => {
            let f = OrderFormula::parse(formula, *m)?;
            let cells: Vec<_> = order_diagrams(&f, &[])?
                .iter()
                .map(|d| {
                    json!({
                        "formula": d.formula(f.vars()).to_string(),
                        "dimension": d.dimension(),
                        "representative": d.representative().iter().map(format_rat).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Payload::new(
                &json!({"vars": f.vars(), "count": cells.len(), "cells": cells}),
                format!("{} cells", cells.len()),
            )
        }
        OminCommand::Irdwitness { formula, m, length } => {
            let f = OrderFormula::parse(formula, *m)?;
            match ird_witness_from_dim(&f, *length)? {
                Some(w) => {
                    let verdict = if w.check.valid { "verified" } else { "NOT verified" };
                    Payload::new(
                        &json!({
                            "dimension": w.report,
                            "pattern": w.pattern.to_file(&DloContext::new()),
                            "check": w.check,
                        }),
                        format!("IRD pattern of depth {}: {verdict}", w.pattern.depth()),
                    )
                }
                None => {
                    let r = dimension(&f, DimMethod::Projection)?;
                    Payload::new(
                        &json!({"dimension": r, "pattern": null, "check": null}),
                        format!("dim = {}: no IRD pattern of positive depth", r.dim),
                    )
                }
            }
        }
        OminCommand::Prodcheck { x, y, m1, m2 } => {
            let fx = OrderFormula::parse(x, *m1)?;
            let fy = OrderFormula::parse(y, *m2)?;
            let p = product(&fx, &fy)?;
            let mut rows = Vec::new();
            let mut additive = true;
            for how in [DimMethod::Diagram, DimMethod::Projection] {
                let (dx, dy, dp) = (
                    dimension(&fx, how)?.dim,
                    dimension(&fy, how)?.dim,
                    dimension(&p, how)?.dim,
                );
                additive &= dp == sum(dx, dy);
                rows.push(json!({"method": how, "x": dx, "y": dy, "product": dp}));
            }
            Payload::new(
                &json!({"product": p.to_string(), "dims": rows, "additive": additive}),
                format!("dim(X×Y) = dim X + dim Y: {additive}"),
            )
        }
    }
}
