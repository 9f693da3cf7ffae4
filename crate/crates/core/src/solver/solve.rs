use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use super::chain::{forward_chain, Branch, ChainConfig};
use super::criterion::apply_criterion;
use super::explain::Explanation;
use super::{SolveError, TaskSpec};
use crate::model::DomainModel;
use crate::par::{self, ExecMode};
use crate::semantics::{scoped_formulas, Candidate, PreparedFormula, Solution, SolutionSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    pub chain: ChainConfig,
    /// How the solution check runs.
    pub mode: ExecMode,
}

/// Pipeline stage that left nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    ForwardChain,
    SolutionCheck,
    Criterion,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::ForwardChain => "forward_chain",
            Stage::SolutionCheck => "solution_check",
            Stage::Criterion => "criterion",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolvedSolution {
    pub id: String,
    pub solution: Solution,
    pub candidate: Candidate,
    pub explanation: Explanation,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub task: TaskSpec,
    pub set: SolutionSet,
    /// In the order of `set.solutions`.
    pub solutions: Vec<SolvedSolution>,
}

/// Content hash of (model, task, candidate), stable across runs.
pub fn solution_id(model: &DomainModel, task: &TaskSpec, solution: &Solution) -> String {
    let mut h = Sha256::new();
    h.update(model.hash().as_bytes());
    h.update(b"\n");
    h.update(task.describe().as_bytes());
    h.update(b"\n");
    h.update(solution.describe().as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}

/// Forward chaining, then the solution check, then the criterion.
pub fn solve(model: &DomainModel, task: &TaskSpec, config: &SolveConfig) -> Result<SolveOutcome, SolveError> {
    let chained = match forward_chain(model, task, &config.chain) {
        Ok(c) => c,
        Err(SolveError::NoDerivation(symbol)) => {
            return Err(SolveError::NoSolution { stage: Stage::ForwardChain, detail: format!("NoDerivation({symbol})") })
        }
        Err(e) => return Err(e),
    };
    let prepared: Vec<PreparedFormula<'_>> =
        scoped_formulas(model, &task.scope()).into_iter().map(|f| PreparedFormula::new(model, f)).collect();
    let verdicts = par::map(config.mode, &chained.branches, |b| {
        prepared.iter().find_map(|f| f.first_failure(model, &b.candidate).map(|(a, t)| (f.formula.index, a, t)))
    });
    let mut seen = BTreeSet::new();
    let mut passing: Vec<&Branch> = Vec::new();
    let mut first_failure = None;
    for (b, verdict) in chained.branches.iter().zip(verdicts) {
        match verdict {
            None => {
                if seen.insert(b.candidate.clone()) {
                    passing.push(b);
                }
            }
            Some(f) => {
                first_failure.get_or_insert(f);
            }
        }
    }
    if passing.is_empty() {
        let detail = match first_failure {
            Some((i, a, t)) => format!(
                "formula `{}` is {:?} under {}",
                model.formulas()[i].text(),
                t,
                a.describe()
            ),
            None => "no candidate".into(),
        };
        return Err(SolveError::NoSolution { stage: Stage::SolutionCheck, detail });
    }
    let candidates: Vec<Candidate> = passing.iter().map(|b| b.candidate.clone()).collect();
    let kept = apply_criterion(model, &candidates, &task.criterion)?;
    if kept.is_empty() {
        return Err(SolveError::NoSolution { stage: Stage::Criterion, detail: task.criterion.describe() });
    }
    let mut solutions: Vec<SolvedSolution> = kept
        .into_iter()
        .map(|i| {
            let branch = passing[i];
            let solution = Solution::project(&branch.candidate, &task.outputs);
            let id = solution_id(model, task, &solution);
            let explanation = Explanation::build(model, task, branch, id.clone());
            SolvedSolution { id, solution, candidate: branch.candidate.clone(), explanation }
        })
        .collect();
    solutions.sort_by(|a, b| a.solution.cmp(&b.solution));
    let set = SolutionSet::new(&task.outputs, solutions.iter().map(|s| s.solution.clone()));
    Ok(SolveOutcome { task: task.clone(), set, solutions })
}
