use std::collections::{BTreeMap, BTreeSet};

use crate::value::Value;

/// Interpretation of one symbol. Functions are partial lookup tables;
/// predicates are tuple sets (membership encodes the map into the one-point set).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interp {
    Const(Value),
    Func(BTreeMap<Vec<Value>, Value>),
    Pred(BTreeSet<Vec<Value>>),
}

impl Interp {
    pub fn len(&self) -> usize {
        match self {
            Interp::Const(_) => 1,
            Interp::Func(t) => t.len(),
            Interp::Pred(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_const(&self) -> Option<&Value> {
        match self {
            Interp::Const(v) => Some(v),
            _ => None,
        }
    }
}
