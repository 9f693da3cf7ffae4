//! Assignment enumeration and solution checking.

use std::collections::BTreeSet;

use super::{Assignment, Candidate, Evaluator, SemanticsError, Truth};
use crate::formula::{Schema, TypedFormula};
use crate::model::{DomainModel, SymbolKind};
use crate::value::{Name, Value};

/// Exhaustive assignments to `vars` (first variable varies slowest).
/// The count is the product of the range sizes; no variables yield exactly
/// one empty assignment.
pub fn enumerate_assignments(model: &DomainModel, vars: &[Name]) -> Vec<Assignment> {
    let ranges: Vec<Vec<Value>> = vars
        .iter()
        .map(|v| model.variable(v).map(|d| model.variable_range(d)).unwrap_or_default())
        .collect();
    if ranges.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        out.push(Assignment {
            bindings: vars.iter().zip(&idx).zip(&ranges).map(|((n, &i), r)| (n.clone(), r[i].clone())).collect(),
        });
        let mut k = vars.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < ranges[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// A formula paired with its precomputed assignments.
#[derive(Clone, Debug)]
pub struct PreparedFormula<'m> {
    pub formula: &'m TypedFormula,
    pub assignments: Vec<Assignment>,
}

impl<'m> PreparedFormula<'m> {
    pub fn new(model: &DomainModel, formula: &'m TypedFormula) -> Self {
        PreparedFormula { formula, assignments: enumerate_assignments(model, &formula.free_vars) }
    }

    /// The first assignment under which the formula is not True.
    pub fn first_failure(&self, model: &DomainModel, candidate: &Candidate) -> Option<(Assignment, Truth)> {
        let ev = Evaluator::new(model, candidate);
        self.assignments.iter().find_map(|a| {
            let t = ev.formula(&self.formula.body, a);
            (!t.is_true()).then(|| (a.clone(), t))
        })
    }

    pub fn holds(&self, model: &DomainModel, candidate: &Candidate) -> bool {
        self.first_failure(model, candidate).is_none()
    }
}

/// Σ¹ symbols a formula mentions.
pub fn sigma1_mentions(model: &DomainModel, f: &TypedFormula) -> BTreeSet<Name> {
    f.symbols.iter().filter(|s| model.symbol(s).is_some_and(|d| d.layer == 1)).cloned().collect()
}

/// Σ¹ symbols a formula can reach: mentions plus the ranges of its
/// higher-order variables.
pub fn sigma1_reach(model: &DomainModel, f: &TypedFormula) -> BTreeSet<Name> {
    let mut out = sigma1_mentions(model, f);
    for v in &f.free_vars {
        let Some(decl) = model.variable(v) else { continue };
        if decl.order < 2 {
            continue;
        }
        for value in model.variable_range(decl) {
            if let Value::Sym(s) = value {
                if model.symbol(&s).is_some_and(|d| d.layer == 1) {
                    out.insert(s);
                }
            }
        }
    }
    out
}

/// Formulas within a task's scope: those whose Σ¹ mentions are all in `scope`.
pub fn scoped_formulas<'m>(model: &'m DomainModel, scope: &BTreeSet<Name>) -> Vec<&'m TypedFormula> {
    model.formulas().iter().filter(|f| sigma1_mentions(model, f).is_subset(scope)).collect()
}

/// The solution check: every formula is True under every assignment. Undefined fails.
pub fn check_solution(model: &DomainModel, candidate: &Candidate) -> Result<bool, SemanticsError> {
    for f in model.formulas() {
        for s in sigma1_mentions(model, f) {
            if !candidate.is_bound(&s) {
                return Err(SemanticsError::IncompleteCandidate(s));
            }
        }
    }
    Ok(model.formulas().iter().all(|f| PreparedFormula::new(model, f).holds(model, candidate)))
}

/// Solution check restricted to a formula subset (task scope).
pub fn check_formulas(model: &DomainModel, candidate: &Candidate, formulas: &[PreparedFormula<'_>]) -> bool {
    formulas.iter().all(|f| f.holds(model, candidate))
}

/// Whether a Σ¹ symbol is an object constant (the only enumerable unknown).
pub fn is_constant(model: &DomainModel, symbol: &str) -> bool {
    model.symbol(symbol).is_some_and(|d| d.kind == SymbolKind::Const)
}
