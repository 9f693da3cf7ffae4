//! Projection of a global model onto a subset of its unknowns.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Schema, TTerm, TFormula, TypedFormula};
use crate::model::{assemble, CarrierRef, DomainModel, ModelDraft, ModelError, VarShape};
use crate::semantics::{sigma1_mentions, sigma1_reach};
use crate::solver::TaskSpec;
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubmodelError {
    #[error("`{0}` is not a level-1 symbol of the model")]
    NotAnUnknown(Name),
    #[error("formula {formula} is kept but depends on dropped symbol `{symbol}`")]
    DanglingDependency { formula: usize, symbol: Name },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn term_literals(t: &TTerm, out: &mut BTreeSet<Name>) {
    match t {
        TTerm::Lit(Value::Enum(v)) => {
            out.insert(v.clone());
        }
        TTerm::Apply(_, args) | TTerm::VarApply(_, args) => args.iter().for_each(|a| term_literals(a, out)),
        TTerm::Arith(_, l, r) => {
            term_literals(l, out);
            term_literals(r, out);
        }
        TTerm::Snap(_, t) => term_literals(t, out),
        _ => {}
    }
}

fn formula_literals(f: &TFormula, out: &mut BTreeSet<Name>) {
    match f {
        TFormula::Pred(_, args) | TFormula::VarPred(_, args) => args.iter().for_each(|a| term_literals(a, out)),
        TFormula::Compare(_, l, r) => {
            term_literals(l, out);
            term_literals(r, out);
        }
        TFormula::Not(g) => formula_literals(g, out),
        TFormula::And(l, r) | TFormula::Or(l, r) | TFormula::Implies(l, r) => {
            formula_literals(l, out);
            formula_literals(r, out);
        }
    }
}

fn snap_scales(f: &TFormula, out: &mut BTreeSet<Name>) {
    fn term(t: &TTerm, out: &mut BTreeSet<Name>) {
        match t {
            TTerm::Snap(s, inner) => {
                out.insert(s.clone());
                term(inner, out);
            }
            TTerm::Apply(_, args) | TTerm::VarApply(_, args) => args.iter().for_each(|a| term(a, out)),
            TTerm::Arith(_, l, r) => {
                term(l, out);
                term(r, out);
            }
            _ => {}
        }
    }
    match f {
        TFormula::Pred(_, args) | TFormula::VarPred(_, args) => args.iter().for_each(|a| term(a, out)),
        TFormula::Compare(_, l, r) => {
            term(l, out);
            term(r, out);
        }
        TFormula::Not(g) => snap_scales(g, out),
        TFormula::And(l, r) | TFormula::Or(l, r) | TFormula::Implies(l, r) => {
            snap_scales(l, out);
            snap_scales(r, out);
        }
    }
}

/// Keep the unknowns in `keep`, the formulas that mention only kept
/// unknowns, and everything those need; see [`extract_submodel_excluding`].
pub fn extract_submodel(global: &DomainModel, keep: &BTreeSet<Name>) -> Result<DomainModel, SubmodelError> {
    extract_submodel_excluding(global, keep, &BTreeSet::new())
}

/// Like [`extract_submodel`], but never carries the symbols in `exclude`
/// along; a kept formula that needs one fails with `DanglingDependency`.
///
/// Required closure: the symbols kept formulas mention, the symbols their
/// higher-order variables range over, symbols named by facts of required
/// symbols, and the scales all of these are declared over. Σ⁰ symbols and
/// facts of required symbols come along unchanged.
pub fn extract_submodel_excluding(
    global: &DomainModel,
    keep: &BTreeSet<Name>,
    exclude: &BTreeSet<Name>,
) -> Result<DomainModel, SubmodelError> {
    for k in keep {
        if !global.symbol(k).is_some_and(|d| d.layer == 1) {
            return Err(SubmodelError::NotAnUnknown(k.clone()));
        }
    }
    let kept_formulas: Vec<&TypedFormula> =
        global.formulas().iter().filter(|f| sigma1_mentions(global, f).is_subset(keep)).collect();

    let mut required: BTreeSet<Name> = keep.clone();
    let mut variables: BTreeSet<Name> = BTreeSet::new();
    for f in &kept_formulas {
        if let Some(s) = sigma1_reach(global, f).difference(keep).next() {
            return Err(SubmodelError::DanglingDependency { formula: f.index + 1, symbol: s.clone() });
        }
        for s in &f.symbols {
            if exclude.contains(s) {
                return Err(SubmodelError::DanglingDependency { formula: f.index + 1, symbol: s.clone() });
            }
            required.insert(s.clone());
        }
        for v in &f.free_vars {
            variables.insert(v.clone());
            let Some(decl) = global.variable(v) else { continue };
            if decl.order < 2 {
                continue;
            }
            for value in global.variable_range(decl) {
                if let Value::Sym(s) = value {
                    if !exclude.contains(&s) {
                        required.insert(s);
                    }
                }
            }
        }
    }
    // Task inputs from layer 0 and every Σ⁰ object stay available.
    for d in global.signature().symbols().filter(|d| d.layer == 0) {
        required.insert(d.name.clone());
    }
    // Symbols named by facts of required symbols.
    loop {
        let mut grew = false;
        for fact in global.fact_entries() {
            if !required.contains(&fact.symbol) {
                continue;
            }
            for v in fact.args.iter().chain(fact.value.iter()) {
                if let Value::Sym(s) = v {
                    if exclude.contains(s) {
                        return Err(SubmodelError::DanglingDependency { formula: 0, symbol: s.clone() });
                    }
                    grew |= required.insert(s.clone());
                }
            }
        }
        if !grew {
            break;
        }
    }

    let source = global.draft();
    let mut draft = ModelDraft::new(source.order);
    let mut scales: BTreeSet<Name> = BTreeSet::new();
    let mut literals: BTreeSet<Name> = BTreeSet::new();
    for f in &kept_formulas {
        formula_literals(&f.body, &mut literals);
        snap_scales(&f.body, &mut scales);
    }
    for d in source.signature.symbols() {
        if required.contains(&d.name) && (d.layer != 1 || keep.contains(&d.name)) {
            for c in d.args.iter().chain(d.result.iter()) {
                if let CarrierRef::Scale(s) = c {
                    scales.insert(s.clone());
                }
            }
            draft.signature.insert_unchecked(d.clone());
        }
    }
    for v in &variables {
        if let Some(decl) = source.variables.get(v) {
            match &decl.shape {
                VarShape::Scale(s) => {
                    scales.insert(s.clone());
                }
                VarShape::Symbol(shape) => {
                    for c in shape.args.iter().chain(shape.result.iter()) {
                        if let CarrierRef::Scale(s) = c {
                            scales.insert(s.clone());
                        }
                    }
                }
            }
            draft.variables.insert(v.clone(), decl.clone());
        }
    }
    for lit in &literals {
        if let Some(s) = global.enum_scale(lit) {
            scales.insert(s);
        }
    }
    for s in source.scales.iter().filter(|s| scales.contains(s.name())) {
        draft.scales.insert(s.clone())?;
    }
    draft.facts = source.facts.iter().filter(|f| draft.signature.get(&f.symbol).is_some()).cloned().collect();
    draft.formulas = kept_formulas.iter().map(|f| source.formulas[f.index].clone()).collect();
    for s in source.sources.values() {
        let mut s = s.clone();
        s.symbols.retain(|n| draft.signature.get(n).is_some());
        if !s.symbols.is_empty() || draft.facts.iter().any(|f| f.origin.as_ref().is_some_and(|o| o.table == s.id)) {
            draft.sources.insert(s.id.clone(), s);
        }
    }
    // Keep the stored tasks that still make sense over the projection.
    let bare = assemble(draft.clone())?;
    for t in source.tasks.values() {
        if TaskSpec::from_source(&bare, t).is_ok() {
            draft.tasks.insert(t.name.clone(), t.clone());
        }
    }
    Ok(assemble(draft)?)
}
