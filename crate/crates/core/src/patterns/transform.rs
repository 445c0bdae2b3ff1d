use std::collections::BTreeSet;

use super::{Pattern, PatternKind};
use crate::error::{Error, Result};
use crate::logic::{fresh_name, Formula, PartitionedFormula};

/// The row formula ¬[ψ(x, y₀) ↔ ψ(x, y₁)] on two renamed copies of the
/// parameters.
fn differs(psi: &PartitionedFormula) -> Result<PartitionedFormula> {
    let mut used: BTreeSet<String> = psi.body().all_vars();
    used.extend(psi.object_vars().iter().cloned());
    let mut copy = |suffix: usize| -> Vec<String> {
        psi.param_vars()
            .iter()
            .map(|v| {
                let name = fresh_name(&format!("{v}_{suffix}"), &used);
                used.insert(name.clone());
                name
            })
            .collect()
    };
    let (y0, y1) = (copy(0), copy(1));
    let x = psi.object_vars().to_vec();
    let a = psi.renamed(&x, &y0)?;
    let b = psi.renamed(&x, &y1)?;
    let body = Formula::not(Formula::iff(a.body().clone(), b.body().clone()));
    let mut y = y0;
    y.extend(y1);
    PartitionedFormula::new(body, x, y)
}

/// An ICT pattern of the same depth and half the length: row i uses
/// ¬[ψ_i(x, y₀) ↔ ψ_i(x, y₁)] with witnesses c_{j,i} = b_{2j,i} b_{2j+1,i}.
pub fn ird_to_ict<V: Clone>(p: &Pattern<V>) -> Result<Pattern<V>> {
    if p.kind != PatternKind::Ird {
        return Err(Error::InvalidFormula("ird_to_ict needs an IRD pattern".into()));
    }
    if p.length % 2 == 1 {
        return Err(Error::OddLength(p.length));
    }
    let formulas = p.formulas.iter().map(differs).collect::<Result<Vec<_>>>()?;
    let witnesses = p
        .witnesses
        .iter()
        .map(|row| {
            row.chunks(2)
                .map(|pair| pair[0].iter().chain(&pair[1]).cloned().collect())
                .collect()
        })
        .collect();
    Pattern::new(PatternKind::Ict, formulas, witnesses, p.length / 2)
}
