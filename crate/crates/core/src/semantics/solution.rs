use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Candidate, SemanticsError};
use crate::value::{Name, Value};

/// Values of the output unknowns for one solution.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Solution {
    pub values: BTreeMap<Name, Value>,
}

impl Solution {
    pub fn project(candidate: &Candidate, outputs: &[Name]) -> Self {
        Solution {
            values: outputs
                .iter()
                .filter_map(|o| candidate.constant(o).map(|v| (o.clone(), v.clone())))
                .collect(),
        }
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.values.iter().map(|(n, v)| format!("{n}={v}")).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Solutions ordered by output name, then value order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub outputs: Vec<Name>,
    pub solutions: Vec<Solution>,
}

impl SolutionSet {
    pub fn new(outputs: &[Name], solutions: impl IntoIterator<Item = Solution>) -> Self {
        let set: BTreeSet<Solution> = solutions.into_iter().collect();
        let mut outputs = outputs.to_vec();
        outputs.sort();
        SolutionSet { outputs, solutions: set.into_iter().collect() }
    }

    pub fn from_candidates<'c>(outputs: &[Name], candidates: impl IntoIterator<Item = &'c Candidate>) -> Self {
        Self::new(outputs, candidates.into_iter().map(|c| Solution::project(c, outputs)))
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Symmetric difference of two solution sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SetDiff {
    pub missing_in_left: Vec<Solution>,
    pub missing_in_right: Vec<Solution>,
}

impl SetDiff {
    pub fn is_empty(&self) -> bool {
        self.missing_in_left.is_empty() && self.missing_in_right.is_empty()
    }
}

pub fn compare_solution_sets(left: &SolutionSet, right: &SolutionSet) -> Result<SetDiff, SemanticsError> {
    if left.outputs != right.outputs {
        return Err(SemanticsError::SchemaMismatch { left: left.outputs.clone(), right: right.outputs.clone() });
    }
    let l: BTreeSet<&Solution> = left.solutions.iter().collect();
    let r: BTreeSet<&Solution> = right.solutions.iter().collect();
    Ok(SetDiff {
        missing_in_left: r.difference(&l).map(|s| (*s).clone()).collect(),
        missing_in_right: l.difference(&r).map(|s| (*s).clone()).collect(),
    })
}
