//! Unchecked model components, as read from a file or built by tools.

use std::collections::BTreeMap;

use super::{ScaleSystem, Signature, VariableDecl};
use crate::value::{Name, Value};

/// Where a fact came from, for explanations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactOrigin {
    pub table: Name,
    /// One-based row number in the source table.
    pub row: usize,
}

/// One fact tuple: `f(args) = value`, `p(args)` or `c = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactEntry {
    pub level: u8,
    pub symbol: Name,
    pub args: Vec<Value>,
    pub value: Option<Value>,
    pub origin: Option<FactOrigin>,
}

impl FactEntry {
    /// Fact text in model-file syntax, without origin.
    pub fn describe(&self) -> String {
        let mut out = self.symbol.to_string();
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            out.push_str(&format!("({})", args.join(", ")));
        }
        if let Some(v) = &self.value {
            out.push_str(&format!(" = {v}"));
        }
        out
    }
}

/// Formula source text with its position in the model file (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSource {
    pub text: String,
    pub line: usize,
    pub col: usize,
}

impl FormulaSource {
    pub fn new(text: impl Into<String>) -> Self {
        FormulaSource { text: text.into(), line: 1, col: 1 }
    }
}

/// Provenance of a compiled know-how table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowHowSource {
    pub id: Name,
    pub title: String,
    pub usage: String,
    pub provenance: String,
    pub symbols: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriterionSource {
    None,
    Predicate(String),
    Maximize(String),
    Minimize(String),
}

/// A named task as written in the model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSource {
    pub name: Name,
    pub inputs: Vec<(Name, Value)>,
    pub outputs: Vec<Name>,
    pub criterion: CriterionSource,
}

/// Everything a model is made of, before checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDraft {
    pub order: u8,
    pub scales: ScaleSystem,
    pub signature: Signature,
    pub variables: BTreeMap<Name, VariableDecl>,
    pub facts: Vec<FactEntry>,
    pub formulas: Vec<FormulaSource>,
    pub sources: BTreeMap<Name, KnowHowSource>,
    pub tasks: BTreeMap<Name, TaskSource>,
}

impl ModelDraft {
    pub fn new(order: u8) -> Self {
        ModelDraft {
            order,
            scales: ScaleSystem::new(),
            signature: Signature::new(),
            variables: BTreeMap::new(),
            facts: Vec::new(),
            formulas: Vec::new(),
            sources: BTreeMap::new(),
            tasks: BTreeMap::new(),
        }
    }
}
