//! Three-valued semantics, solution checking and the brute-force oracle.

mod check;
mod eval;
mod oracle;
mod solution;
mod truth;

pub use check::{
    check_formulas, check_solution, enumerate_assignments, is_constant, scoped_formulas, sigma1_mentions,
    sigma1_reach, PreparedFormula,
};
pub use eval::{Access, Assignment, Candidate, Evaluator};
pub use oracle::{oracle_candidates, oracle_solutions, OracleConfig, DEFAULT_BUDGET};
pub(crate) use oracle::{enumeration_order, stage_of};
pub use solution::{compare_solution_sets, SetDiff, Solution, SolutionSet};
pub use truth::Truth;

use thiserror::Error;

use crate::solver::CriterionError;
use crate::value::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("candidate leaves level-1 symbol `{0}` unbound")]
    IncompleteCandidate(Name),
    #[error("oracle budget exceeded: {required} candidates, limit {limit}")]
    OracleBudgetExceeded { limit: u128, required: u128 },
    #[error("output `{0}` is not a level-1 object constant")]
    UnsupportedOutputKind(Name),
    #[error("solution sets range over different outputs: {left:?} vs {right:?}")]
    SchemaMismatch { left: Vec<Name>, right: Vec<Name> },
    #[error(transparent)]
    Criterion(#[from] CriterionError),
}
