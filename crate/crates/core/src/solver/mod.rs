//! The reasoning engine: tasks, rule extraction, forward chaining,
//! criteria and explanations.

mod chain;
mod criterion;
mod explain;
mod rules;
mod solve;
mod task;

pub use chain::{forward_chain, Branch, ChainConfig, ChainResult, Derivation};
pub use criterion::{apply_criterion, CriterionError};
pub use explain::{ExplainError, ExplainFormat, Explanation, ExplanationNode};
pub use rules::{compile_rules, unconvertible_formulas, Rule, RuleKind, RuleSet};
pub use solve::{solution_id, solve, SolveConfig, SolveOutcome, SolvedSolution, Stage};
pub use task::{Criterion, Direction, TaskError, TaskSpec};

use thiserror::Error;

use crate::value::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no derivation for output `{0}` on any branch")]
    NoDerivation(Name),
    #[error("no solution (stage {stage}): {detail}")]
    NoSolution { stage: Stage, detail: String },
    #[error("forward chaining exceeded {0} iterations")]
    IterationCapExceeded(usize),
    #[error("forward chaining exceeded {0} branches")]
    BranchBudgetExceeded(usize),
    #[error("divergent derivations for `{symbol}`: {values:?}")]
    Conflict { symbol: Name, values: Vec<String> },
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Task(#[from] TaskError),
}
