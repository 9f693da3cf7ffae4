use std::cmp::Ordering;

use thiserror::Error;

use super::{Criterion, Direction};
use crate::model::DomainModel;
use crate::semantics::{Assignment, Candidate, Evaluator, PreparedFormula};
use crate::value::Number;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("objective is undefined for candidate {0}")]
    ObjectiveUndefined(String),
}

pub(crate) fn describe_candidate(c: &Candidate) -> String {
    let parts: Vec<String> = c
        .bindings()
        .iter()
        .filter_map(|(n, i)| i.as_const().map(|v| format!("{n}={v}")))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// Indices of the candidates the criterion keeps, in input order. Ties are
/// all kept.
pub fn apply_criterion(
    model: &DomainModel,
    candidates: &[Candidate],
    criterion: &Criterion,
) -> Result<Vec<usize>, CriterionError> {
    match criterion {
        Criterion::None => Ok((0..candidates.len()).collect()),
        Criterion::Predicate(f) => {
            let prepared = PreparedFormula::new(model, f);
            Ok((0..candidates.len()).filter(|&i| prepared.holds(model, &candidates[i])).collect())
        }
        Criterion::Optimize { direction, typed, .. } => {
            let mut scores: Vec<Number> = Vec::with_capacity(candidates.len());
            for c in candidates {
                let v = Evaluator::new(model, c).term(typed, &Assignment::default());
                match v.as_ref().and_then(|v| v.as_number()) {
                    Some(n) => scores.push(*n),
                    None => return Err(CriterionError::ObjectiveUndefined(describe_candidate(c))),
                }
            }
            let better = |a: &Number, b: &Number| match direction {
                Direction::Maximize => a.cmp(b),
                Direction::Minimize => b.cmp(a),
            };
            let Some(best) = scores.iter().copied().max_by(|a, b| better(a, b)) else { return Ok(Vec::new()) };
            Ok((0..candidates.len()).filter(|&i| better(&scores[i], &best) == Ordering::Equal).collect())
        }
    }
}
