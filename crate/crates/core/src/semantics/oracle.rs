//! Brute-force enumeration of the definitional solution set.

use std::collections::BTreeSet;

use super::check::{scoped_formulas, sigma1_reach, PreparedFormula};
use super::{Candidate, SemanticsError, SolutionSet};
use crate::model::{DomainModel, SymbolKind};
use crate::formula::{Schema, TypedFormula};
use crate::par::{self, ExecMode};
use crate::solver::{apply_criterion, TaskSpec};
use crate::value::{Name, Value};

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest admissible nominal candidate count.
    pub budget: u128,
    pub mode: ExecMode,
    /// Reject a subtree as soon as a formula whose unknowns are all bound
    /// fails. Exact; disabling it only costs time.
    pub prune: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: DEFAULT_BUDGET, mode: ExecMode::default(), prune: true }
    }
}

impl OracleConfig {
    pub fn with_budget(budget: u128) -> Self {
        OracleConfig { budget, ..Self::default() }
    }
}

/// candidates passing the solution check for the task, before the criterion, sorted.
pub fn oracle_candidates(
    model: &DomainModel,
    task: &TaskSpec,
    config: &OracleConfig,
) -> Result<Vec<Candidate>, SemanticsError> {
    let mut domains: Vec<Vec<Value>> = Vec::with_capacity(task.outputs.len());
    let mut nominal: u128 = 1;
    for o in &task.outputs {
        let decl = model.symbol(o).ok_or_else(|| SemanticsError::UnsupportedOutputKind(o.clone()))?;
        if decl.kind != SymbolKind::Const || decl.layer != 1 {
            return Err(SemanticsError::UnsupportedOutputKind(o.clone()));
        }
        let values = model.carrier_values(decl.result.as_ref().expect("constants have a result"));
        nominal = nominal.saturating_mul(values.len() as u128);
        domains.push(values);
    }
    if nominal > config.budget {
        return Err(SemanticsError::OracleBudgetExceeded { limit: config.budget, required: nominal });
    }

    let order = enumeration_order(model, task, &domains);
    let outputs: Vec<Name> = order.iter().map(|&i| task.outputs[i].clone()).collect();
    let domains: Vec<Vec<Value>> = order.iter().map(|&i| domains[i].clone()).collect();

    let n = outputs.len();
    let mut stages: Vec<Vec<PreparedFormula<'_>>> = (0..=n).map(|_| Vec::new()).collect();
    for f in scoped_formulas(model, &task.scope()) {
        let depth = if config.prune { stage_of(model, f, &outputs) } else { n };
        stages[depth].push(PreparedFormula::new(model, f));
    }
    let passes = |c: &Candidate, depth: usize| stages[depth].iter().all(|f| f.holds(model, c));

    let base = task.base_candidate();
    if !passes(&base, 0) {
        return Ok(Vec::new());
    }
    let chunks = par::map(config.mode, &domains[0], |v| {
        let mut c = base.clone();
        c.bind_const(outputs[0].clone(), v.clone());
        let mut out = Vec::new();
        if passes(&c, 1) {
            descend(&mut c, 1, &outputs, &domains, &passes, &mut out);
        }
        out
    });
    let mut all: Vec<Candidate> = chunks.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// Number of leading outputs that must be bound before `f` can be decided.
pub(crate) fn stage_of(model: &DomainModel, f: &TypedFormula, outputs: &[Name]) -> usize {
    let reach = sigma1_reach(model, f);
    outputs.iter().enumerate().filter(|(_, o)| reach.contains(*o)).map(|(i, _)| i + 1).max().unwrap_or(0)
}

/// A binding order for the outputs that lets formulas be decided early:
/// greedily take the output completing the most formulas, then the one
/// with the smallest domain. Any order gives the same solution set.
pub(crate) fn enumeration_order(model: &DomainModel, task: &TaskSpec, domains: &[Vec<Value>]) -> Vec<usize> {
    let outputs: BTreeSet<&Name> = task.outputs.iter().collect();
    let reaches: Vec<BTreeSet<Name>> = scoped_formulas(model, &task.scope())
        .into_iter()
        .map(|f| sigma1_reach(model, f).into_iter().filter(|s| outputs.contains(s)).collect())
        .collect();
    let mut chosen: BTreeSet<Name> = BTreeSet::new();
    let mut order = Vec::with_capacity(task.outputs.len());
    while order.len() < task.outputs.len() {
        let best = (0..task.outputs.len())
            .filter(|i| !order.contains(i))
            .max_by_key(|&i| {
                let o = &task.outputs[i];
                let completes = reaches
                    .iter()
                    .filter(|r| r.contains(o) && r.iter().all(|s| s == o || chosen.contains(s)))
                    .count();
                (completes, std::cmp::Reverse(domains[i].len()), std::cmp::Reverse(i))
            })
            .expect("an output is left");
        chosen.insert(task.outputs[best].clone());
        order.push(best);
    }
    order
}

fn descend(
    c: &mut Candidate,
    bound: usize,
    outputs: &[Name],
    domains: &[Vec<Value>],
    passes: &(impl Fn(&Candidate, usize) -> bool + Sync),
    out: &mut Vec<Candidate>,
) {
    if bound == outputs.len() {
        out.push(c.clone());
        return;
    }
    let symbol = &outputs[bound];
    for v in &domains[bound] {
        c.bind_const(symbol.clone(), v.clone());
        if passes(c, bound + 1) {
            descend(c, bound + 1, outputs, domains, passes, out);
        }
    }
    c.unbind(symbol);
}

/// The definitional solution set: enumerate, check, apply the criterion.
pub fn oracle_solutions(
    model: &DomainModel,
    task: &TaskSpec,
    config: &OracleConfig,
) -> Result<SolutionSet, SemanticsError> {
    let candidates = oracle_candidates(model, task, config)?;
    let kept = apply_criterion(model, &candidates, &task.criterion)?;
    Ok(SolutionSet::from_candidates(&task.outputs, kept.iter().map(|&i| &candidates[i])))
}
