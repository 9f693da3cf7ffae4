//! Extraction of chaining rules from the formula set.

use std::collections::BTreeSet;

use crate::formula::{RelOp, Schema, TFormula, TTerm};
use crate::model::{DomainModel, Interp, SymbolKind};
use crate::semantics::{enumerate_assignments, scoped_formulas, sigma1_reach, Assignment};
use crate::value::Name;

use super::TaskSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// `head := expr` when the antecedent holds.
    Assign { head: Name, expr: TTerm },
    /// Pick head values from the tuples of a stored predicate. `args[i]` is
    /// `None` at head positions.
    Choose { pred: Name, args: Vec<Option<TTerm>>, heads: Vec<(usize, Name)> },
}

#[derive(Clone, Debug)]
pub struct Rule {
    /// Index of the source formula in the model.
    pub formula: usize,
    pub antecedent: Vec<TFormula>,
    pub kind: RuleKind,
    pub assignments: Vec<Assignment>,
    /// Outputs the rule's truth can depend on.
    pub deps: BTreeSet<Name>,
}

impl Rule {
    pub fn heads(&self) -> Vec<&Name> {
        match &self.kind {
            RuleKind::Assign { head, .. } => vec![head],
            RuleKind::Choose { heads, .. } => heads.iter().map(|(_, h)| h).collect(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    /// Formulas of the task scope that yield no rule (check-only).
    pub constraints: Vec<usize>,
}

/// Whether `t` mentions the constant `c`.
fn mentions(t: &TTerm, c: &Name) -> bool {
    match t {
        TTerm::Const(n) => n == c,
        TTerm::Lit(_) | TTerm::SymRef(_) | TTerm::VarVal(_) | TTerm::VarRef(_) => false,
        TTerm::Apply(_, args) | TTerm::VarApply(_, args) => args.iter().any(|a| mentions(a, c)),
        TTerm::Arith(_, l, r) => mentions(l, c) || mentions(r, c),
        TTerm::Snap(_, t) => mentions(t, c),
    }
}

fn extract(
    model: &DomainModel,
    f: &TFormula,
    antecedent: &[TFormula],
    outputs: &BTreeSet<Name>,
    out: &mut Vec<(Vec<TFormula>, RuleKind)>,
) {
    match f {
        TFormula::And(a, b) => {
            extract(model, a, antecedent, outputs, out);
            extract(model, b, antecedent, outputs, out);
        }
        TFormula::Implies(a, b) => {
            let mut ant = antecedent.to_vec();
            ant.push((**a).clone());
            extract(model, b, &ant, outputs, out);
        }
        TFormula::Compare(RelOp::Eq, l, r) => {
            for (side, other) in [(l, r), (r, l)] {
                if let TTerm::Const(c) = side {
                    if outputs.contains(c) && !mentions(other, c) {
                        out.push((antecedent.to_vec(), RuleKind::Assign { head: c.clone(), expr: other.clone() }));
                    }
                }
            }
        }
        TFormula::Pred(p, args) => {
            let stored = model.symbol(p).is_some_and(|d| d.layer != 1 && d.kind == SymbolKind::Pred)
                && matches!(model.fact(p), Some(Interp::Pred(_)));
            if !stored {
                return;
            }
            let heads: Vec<(usize, Name)> = args
                .iter()
                .enumerate()
                .filter_map(|(i, a)| match a {
                    TTerm::Const(c) if outputs.contains(c) => Some((i, c.clone())),
                    _ => None,
                })
                .collect();
            if heads.is_empty() {
                return;
            }
            let args = args
                .iter()
                .enumerate()
                .map(|(i, a)| if heads.iter().any(|(j, _)| *j == i) { None } else { Some(a.clone()) })
                .collect();
            out.push((antecedent.to_vec(), RuleKind::Choose { pred: p.clone(), args, heads }));
        }
        _ => {}
    }
}

/// Split the task's formulas into chaining rules and check-only constraints.
pub fn compile_rules(model: &DomainModel, task: &TaskSpec) -> RuleSet {
    let outputs: BTreeSet<Name> = task.outputs.iter().cloned().collect();
    let mut set = RuleSet::default();
    for f in scoped_formulas(model, &task.scope()) {
        let mut found = Vec::new();
        extract(model, &f.body, &[], &outputs, &mut found);
        if found.is_empty() {
            set.constraints.push(f.index);
            continue;
        }
        let deps: BTreeSet<Name> = sigma1_reach(model, f).intersection(&outputs).cloned().collect();
        let assignments = enumerate_assignments(model, &f.free_vars);
        for (antecedent, kind) in found {
            set.rules.push(Rule { formula: f.index, antecedent, kind, assignments: assignments.clone(), deps: deps.clone() });
        }
    }
    set
}

/// Check-only formulas (no rule for a task whose outputs are every Σ¹
/// constant) that constrain nothing a rule derives; used for W-UNCONVERTIBLE.
/// A check over derived values is the normal use of a constraint and is
/// not reported.
pub fn unconvertible_formulas(model: &DomainModel) -> Vec<usize> {
    let outputs: BTreeSet<Name> = model
        .sigma1()
        .filter(|d| d.kind == SymbolKind::Const)
        .map(|d| d.name.clone())
        .collect();
    let mut heads: BTreeSet<Name> = BTreeSet::new();
    let mut check_only = Vec::new();
    for f in model.formulas() {
        let mut found = Vec::new();
        extract(model, &f.body, &[], &outputs, &mut found);
        if found.is_empty() {
            check_only.push(f);
        }
        for (_, kind) in found {
            match kind {
                RuleKind::Assign { head, .. } => {
                    heads.insert(head);
                }
                RuleKind::Choose { heads: hs, .. } => heads.extend(hs.into_iter().map(|(_, h)| h)),
            }
        }
    }
    check_only
        .into_iter()
        .filter(|f| sigma1_reach(model, f).is_disjoint(&heads))
        .map(|f| f.index)
        .collect()
}
