//! Pertinency, completeness and consistency diagnostics.
//!
//! Reports serialize one diagnostic per line as `CODE<TAB>location<TAB>message`
//! and are ordered by (code, location).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::formula::Schema;
use crate::model::{assemble, audit_draft, DomainModel, IssueClass, ModelDraft};
use crate::semantics::{
    enumeration_order, oracle_solutions, scoped_formulas, sigma1_reach, stage_of, Candidate, OracleConfig, PreparedFormula, SemanticsError, Truth,
};
use crate::solver::{solve, unconvertible_formulas, SolveConfig, TaskSpec};
use crate::value::{Name, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Code {
    #[serde(rename = "E-SCALE")]
    Scale,
    #[serde(rename = "E-UNDECL")]
    Undeclared,
    #[serde(rename = "E-TYPE")]
    Type,
    #[serde(rename = "E-INCONS")]
    Inconsistent,
    #[serde(rename = "E-NOSOL")]
    NoSolution,
    #[serde(rename = "W-UNUSED")]
    Unused,
    #[serde(rename = "W-UNCONVERTIBLE")]
    Unconvertible,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Scale => "E-SCALE",
            Code::Undeclared => "E-UNDECL",
            Code::Type => "E-TYPE",
            Code::Inconsistent => "E-INCONS",
            Code::NoSolution => "E-NOSOL",
            Code::Unused => "W-UNUSED",
            Code::Unconvertible => "W-UNCONVERTIBLE",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::Unused | Code::Unconvertible => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub location: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Diagnostic {
    pub fn new(code: Code, location: impl Into<String>, message: impl Into<String>, witness: Option<String>) -> Self {
        Diagnostic { code, severity: code.severity(), location: location.into(), message: message.into(), witness }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace(['\t', '\n'], " ");
        write!(f, "{}\t{}\t{}", self.code, self.location, message)?;
        if let Some(w) = &self.witness {
            write!(f, " [witness: {}]", w.replace(['\t', '\n'], " "))?;
        }
        Ok(())
    }
}

/// Deterministic order: (code, location), then message.
pub fn sort_diagnostics(d: &mut [Diagnostic]) {
    d.sort_by(|a, b| (a.code, &a.location, &a.message).cmp(&(b.code, &b.location, &b.message)));
}

/// Line-oriented report; empty string for no diagnostics.
pub fn render_report(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("{x}\n")).collect()
}

pub fn has_errors(d: &[Diagnostic]) -> bool {
    d.iter().any(Diagnostic::is_error)
}

fn audit_code(class: IssueClass) -> Code {
    match class {
        IssueClass::Pertinency => Code::Scale,
        IssueClass::Undeclared => Code::Undeclared,
        IssueClass::Structure => Code::Type,
    }
}

fn audit(draft: &ModelDraft, keep: impl Fn(IssueClass) -> bool) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = audit_draft(draft)
        .into_iter()
        .filter(|i| keep(i.class))
        .map(|i| Diagnostic::new(audit_code(i.class), i.location, i.error.to_string(), i.witness))
        .collect();
    sort_diagnostics(&mut out);
    out
}

/// E-SCALE for every fact tuple holding an off-scale or non-reified value.
pub fn validate_pertinency(draft: &ModelDraft) -> Vec<Diagnostic> {
    audit(draft, |c| c == IssueClass::Pertinency)
}

/// E-UNDECL for references to undeclared names and E-TYPE for other
/// structural defects; then W-UNUSED for level-1 symbols no formula
/// mentions and W-UNCONVERTIBLE for checks over values no rule derives.
pub fn validate_completeness(draft: &ModelDraft) -> Vec<Diagnostic> {
    let mut out = audit(draft, |c| c != IssueClass::Pertinency);
    if out.iter().any(Diagnostic::is_error) {
        return out;
    }
    // Warnings need compiled formulas.
    let Ok(model) = assemble(draft.clone()) else { return out };
    let mentioned: BTreeSet<_> = model.formulas().iter().flat_map(|f| f.symbols.iter().cloned()).collect();
    for d in model.sigma1() {
        if !mentioned.contains(&d.name) {
            out.push(Diagnostic::new(
                Code::Unused,
                format!("symbol {}", d.name),
                format!("level-1 symbol `{}` is mentioned by no formula", d.name),
                None,
            ));
        }
    }
    for i in unconvertible_formulas(&model) {
        out.push(Diagnostic::new(
            Code::Unconvertible,
            format!("formula {}", i + 1),
            format!("`{}` yields no chaining rule and constrains no derived value; it only filters candidates", model.formulas()[i].text()),
            None,
        ));
    }
    sort_diagnostics(&mut out);
    out
}

/// Pertinency and completeness together.
pub fn validate_model(draft: &ModelDraft) -> Vec<Diagnostic> {
    let mut out = validate_pertinency(draft);
    out.extend(validate_completeness(draft));
    sort_diagnostics(&mut out);
    out
}

/// E-INCONS for formulas that fail whatever the unknowns are (they mention
/// no Σ¹ symbol, directly or through a variable range), and, with a probe
/// task, E-NOSOL when the probe has no solution. E-NOSOL names, per
/// rejecting formula, the first candidate it rejected and the assignment.
pub fn validate_consistency(
    model: &DomainModel,
    probe: Option<&TaskSpec>,
    config: &OracleConfig,
) -> Result<Vec<Diagnostic>, SemanticsError> {
    let mut out = Vec::new();
    let empty = Candidate::new();
    for f in model.formulas() {
        if !sigma1_reach(model, f).is_empty() {
            continue;
        }
        if let Some((a, t)) = PreparedFormula::new(model, f).first_failure(model, &empty) {
            out.push(Diagnostic::new(
                Code::Inconsistent,
                format!("formula {}", f.index + 1),
                format!("`{}` is {} independently of any candidate", f.text(), truth_word(t)),
                Some(a.describe()),
            ));
        }
    }
    if let Some(task) = probe {
        // A solver solution is a checked witness, so the oracle only runs
        // when chaining finds nothing.
        let witnessed = solve(model, task, &SolveConfig::default()).is_ok_and(|o| !o.set.is_empty());
        if !witnessed && oracle_solutions(model, task, config)?.is_empty() {
            out.extend(explain_no_solution(model, task));
        }
    }
    sort_diagnostics(&mut out);
    Ok(out)
}

fn truth_word(t: Truth) -> &'static str {
    match t {
        Truth::False => "false",
        Truth::Undefined => "undefined",
        Truth::True => "true",
    }
}

/// Walk the candidate tree like the oracle does and record, for each
/// formula that cuts off a subtree, its first witness.
fn explain_no_solution(model: &DomainModel, task: &TaskSpec) -> Vec<Diagnostic> {
    let domains: Vec<Vec<Value>> = task
        .outputs
        .iter()
        .map(|o| model.symbol(o).and_then(|d| d.result.as_ref()).map(|c| model.carrier_values(c)).unwrap_or_default())
        .collect();
    let order = enumeration_order(model, task, &domains);
    let outputs: Vec<Name> = order.iter().map(|&i| task.outputs[i].clone()).collect();
    let domains: Vec<Vec<Value>> = order.iter().map(|&i| domains[i].clone()).collect();
    let n = outputs.len();
    let mut stages: Vec<Vec<PreparedFormula<'_>>> = (0..=n).map(|_| Vec::new()).collect();
    for f in scoped_formulas(model, &task.scope()) {
        stages[stage_of(model, f, &outputs)].push(PreparedFormula::new(model, f));
    }
    let mut rejections: BTreeMap<usize, String> = BTreeMap::new();
    let mut survivors = 0usize;
    let mut stack: Vec<(Candidate, usize)> = vec![(task.base_candidate(), 0)];
    while let Some((c, depth)) = stack.pop() {
        if let Some((f, a)) = stages[depth].iter().find_map(|f| f.first_failure(model, &c).map(|(a, _)| (f, a))) {
            rejections.entry(f.formula.index).or_insert_with(|| {
                let bound: Vec<String> =
                    task.outputs.iter().filter_map(|o| c.constant(o).map(|v| format!("{o}={v}"))).collect();
                format!("candidate {{{}}} under {}", bound.join(", "), a.describe())
            });
            continue;
        }
        if depth == n {
            survivors += 1;
            continue;
        }
        for v in domains[depth].iter().rev() {
            let mut next = c.clone();
            next.bind_const(outputs[depth].clone(), v.clone());
            stack.push((next, depth + 1));
        }
    }
    let location = format!("task {}", task.name);
    let mut out: Vec<Diagnostic> = rejections
        .into_iter()
        .map(|(i, witness)| {
            let f = &model.formulas()[i];
            Diagnostic::new(
                Code::NoSolution,
                location.clone(),
                format!("no solution: formula {} `{}` rejects candidates", i + 1, f.text()),
                Some(witness),
            )
        })
        .collect();
    if survivors > 0 {
        out.push(Diagnostic::new(
            Code::NoSolution,
            location,
            format!("no solution: the criterion `{}` rejects all {survivors} candidates that satisfy the formulas", task.criterion.describe()),
            None,
        ));
    }
    if out.is_empty() {
        out.push(Diagnostic::new(Code::NoSolution, format!("task {}", task.name), "no solution", None));
    }
    out
}
