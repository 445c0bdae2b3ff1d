//! Loading a context argument: "dlo" or a structure file.

use opdim_core::logic::{parse_formula, parse_partitioned, FiniteStructure};
use opdim_core::ominimal::standard_grid;
use opdim_core::{Context, DloContext, FiniteContext, PartitionedFormula, Rat};

use crate::{read, Failure, RunConfig};

pub(crate) enum Host {
    Finite(FiniteContext),
    Dlo(DloContext),
}

/// Runs `$body` with `$ctx` bound to whichever context `$host` holds.
macro_rules! on_host {
    ($host:expr, $ctx:ident => $body:expr) => {
        match $host {
            $crate::host::Host::Finite($ctx) => $body,
            $crate::host::Host::Dlo($ctx) => $body,
        }
    };
}
pub(crate) use on_host;

pub(crate) fn load(arg: &str, cfg: &RunConfig) -> Result<Host, Failure> {
    if arg == "dlo" {
        return Ok(Host::Dlo(DloContext::new()));
    }
    let text = read(arg)?;
    let m = FiniteStructure::from_json(&text, cfg.max_universe)?;
    Ok(Host::Finite(FiniteContext::new(m)))
}

/// The witness grid used when --grid is not given.
pub(crate) trait HostGrid: Context {
    fn default_grid(&self, anchors: &[Self::Value]) -> Vec<Self::Value>;
}

impl HostGrid for FiniteContext {
    fn default_grid(&self, _anchors: &[usize]) -> Vec<usize> {
        (0..self.structure().size()).collect()
    }
}

impl HostGrid for DloContext {
    fn default_grid(&self, anchors: &[Rat]) -> Vec<Rat> {
        standard_grid(anchors)
    }
}

/// Each --delta value is one Δ, its formulas separated by ';'.
pub(crate) fn deltas<C: Context>(
    ctx: &C,
    specs: &[String],
    vars: &[String],
) -> Result<Vec<Vec<PartitionedFormula>>, Failure> {
    let mut out = Vec::new();
    for spec in specs {
        let delta = spec
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| parse_partitioned(t, ctx.signature(), vars, None))
            .collect::<opdim_core::Result<Vec<_>>>()?;
        if delta.is_empty() {
            return Err(Failure::input("InvalidFormula", format!("empty formula set `{spec}`")));
        }
        out.push(delta);
    }
    if out.is_empty() {
        return Err(Failure::input("InvalidFormula", "no --delta formulas given".into()));
    }
    Ok(out)
}

/// S from --set over the object variables, or all of M^|vars|.
pub(crate) fn base_set<C: Context>(ctx: &C, set: Option<&str>, vars: &[String]) -> Result<C::Set, Failure> {
    Ok(match set {
        Some(text) => ctx.define(&parse_formula(text, ctx.signature())?, vars)?,
        None => ctx.full(vars.len())?,
    })
}

pub(crate) fn grid<C: HostGrid>(
    ctx: &C,
    cfg: &RunConfig,
    s: &C::Set,
    formulas: &[PartitionedFormula],
) -> Result<Vec<C::Value>, Failure> {
    if let Some(g) = &cfg.grid {
        return Ok(g.iter().map(|v| ctx.parse_value(v.trim())).collect::<opdim_core::Result<_>>()?);
    }
    let mut anchors = ctx.anchors(s);
    for f in formulas {
        anchors.extend(ctx.formula_anchors(&ctx.prepare(f)?));
    }
    anchors.sort();
    anchors.dedup();
    Ok(ctx.default_grid(&anchors))
}
