//! Task specifications: inputs, output unknowns and a criterion.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{check_formula, check_objective, parse_formula, parse_term, Schema, TTerm, Term, TypedFormula};
use crate::model::{CriterionSource, DomainModel, Interp, SymbolKind, TaskSource};
use crate::semantics::Candidate;
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("task has no outputs")]
    NoOutputs,
    #[error("output `{0}` is not a level-1 symbol")]
    OutputNotUnknown(Name),
    #[error("output `{0}` is not an object constant")]
    OutputNotConstant(Name),
    #[error("input `{0}` must be a level-0 or level-1 symbol")]
    InputLevel(Name),
    #[error("`{0}` is both an input and an output")]
    InputOutputOverlap(Name),
    #[error("input `{symbol}` = {value} is not on its declared carrier")]
    BadInputValue { symbol: Name, value: String },
    #[error("criterion: {0}")]
    Criterion(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    None,
    /// Keep candidates on which the formula is True under every assignment.
    Predicate(TypedFormula),
    Optimize { direction: Direction, objective: Term, typed: TTerm },
}

impl Criterion {
    /// Criterion text as written in a task block.
    pub fn describe(&self) -> String {
        match self {
            Criterion::None => "none".into(),
            Criterion::Predicate(f) => format!("predicate {}", f.formula),
            Criterion::Optimize { direction, objective, .. } => format!("{} {objective}", direction.keyword()),
        }
    }

    pub fn parse(model: &DomainModel, source: &CriterionSource) -> Result<Self, TaskError> {
        let err = |e: String| TaskError::Criterion(e);
        Ok(match source {
            CriterionSource::None => Criterion::None,
            CriterionSource::Predicate(text) => {
                let f = parse_formula(text, model).map_err(|e| err(e.to_string()))?;
                Criterion::Predicate(check_formula(0, &f, model).map_err(|e| err(e.to_string()))?)
            }
            CriterionSource::Maximize(text) | CriterionSource::Minimize(text) => {
                let direction =
                    if matches!(source, CriterionSource::Maximize(_)) { Direction::Maximize } else { Direction::Minimize };
                let objective = parse_term(text, model).map_err(|e| err(e.to_string()))?;
                let mut has_vars = false;
                objective.for_each_var(&mut |_| has_vars = true);
                if has_vars {
                    return Err(err("objectives may not contain variables".into()));
                }
                let typed = check_objective(&objective, model).map_err(|e| err(e.to_string()))?;
                Criterion::Optimize { direction, objective, typed }
            }
        })
    }

    pub fn to_source(&self) -> CriterionSource {
        match self {
            Criterion::None => CriterionSource::None,
            Criterion::Predicate(f) => CriterionSource::Predicate(f.formula.to_string()),
            Criterion::Optimize { direction: Direction::Maximize, objective, .. } => {
                CriterionSource::Maximize(objective.to_string())
            }
            Criterion::Optimize { direction: Direction::Minimize, objective, .. } => {
                CriterionSource::Minimize(objective.to_string())
            }
        }
    }
}

/// A professional task: given inputs, find values of the output unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub name: Name,
    pub inputs: BTreeMap<Name, Interp>,
    /// Σ¹ object constants, in name order.
    pub outputs: Vec<Name>,
    pub criterion: Criterion,
}

impl TaskSpec {
    pub fn new(
        model: &DomainModel,
        name: &str,
        inputs: BTreeMap<Name, Interp>,
        outputs: impl IntoIterator<Item = Name>,
        criterion: Criterion,
    ) -> Result<Self, TaskError> {
        let outputs: BTreeSet<Name> = outputs.into_iter().collect();
        if outputs.is_empty() {
            return Err(TaskError::NoOutputs);
        }
        for o in &outputs {
            let decl = model.symbol(o).ok_or_else(|| TaskError::UnknownSymbol(o.clone()))?;
            if decl.layer != 1 {
                return Err(TaskError::OutputNotUnknown(o.clone()));
            }
            if decl.kind != SymbolKind::Const {
                return Err(TaskError::OutputNotConstant(o.clone()));
            }
            if inputs.contains_key(o) {
                return Err(TaskError::InputOutputOverlap(o.clone()));
            }
        }
        let mut resolved = BTreeMap::new();
        for (symbol, interp) in inputs {
            let decl = model.symbol(&symbol).ok_or_else(|| TaskError::UnknownSymbol(symbol.clone()))?;
            if decl.layer > 1 {
                return Err(TaskError::InputLevel(symbol.clone()));
            }
            let bad = |v: &dyn std::fmt::Display| TaskError::BadInputValue { symbol: symbol.clone(), value: v.to_string() };
            let fits = |carrier: &crate::model::CarrierRef, v: &Value| -> Result<Value, TaskError> {
                let v = model.resolve_value(carrier, v);
                if model.carrier_values(carrier).contains(&v) {
                    Ok(v)
                } else {
                    Err(bad(&v))
                }
            };
            let interp = match (decl.kind, interp) {
                (SymbolKind::Const, Interp::Const(v)) => Interp::Const(fits(decl.result.as_ref().expect("const"), &v)?),
                (SymbolKind::Func, Interp::Func(t)) => {
                    let mut table = BTreeMap::new();
                    for (args, v) in t {
                        if args.len() != decl.arity() {
                            return Err(bad(&format!("{args:?}")));
                        }
                        let args = decl.args.iter().zip(&args).map(|(c, a)| fits(c, a)).collect::<Result<Vec<_>, _>>()?;
                        table.insert(args, fits(decl.result.as_ref().expect("func"), &v)?);
                    }
                    Interp::Func(table)
                }
                (SymbolKind::Pred, Interp::Pred(t)) => {
                    let mut set = BTreeSet::new();
                    for args in t {
                        if args.len() != decl.arity() {
                            return Err(bad(&format!("{args:?}")));
                        }
                        set.insert(decl.args.iter().zip(&args).map(|(c, a)| fits(c, a)).collect::<Result<Vec<_>, _>>()?);
                    }
                    Interp::Pred(set)
                }
                (_, other) => return Err(bad(&format!("{other:?}"))),
            };
            resolved.insert(symbol, interp);
        }
        Ok(TaskSpec { name: crate::value::name(name), inputs: resolved, outputs: outputs.into_iter().collect(), criterion })
    }

    /// Convenience constructor for constant inputs.
    pub fn with_constants(
        model: &DomainModel,
        name: &str,
        inputs: &[(&str, Value)],
        outputs: &[&str],
        criterion: Criterion,
    ) -> Result<Self, TaskError> {
        let inputs = inputs.iter().map(|(s, v)| (crate::value::name(s), Interp::Const(v.clone()))).collect();
        Self::new(model, name, inputs, outputs.iter().map(|s| crate::value::name(s)), criterion)
    }

    pub fn from_source(model: &DomainModel, source: &TaskSource) -> Result<Self, TaskError> {
        let criterion = Criterion::parse(model, &source.criterion)?;
        let inputs = source.inputs.iter().map(|(s, v)| (s.clone(), Interp::Const(v.clone()))).collect();
        Self::new(model, &source.name, inputs, source.outputs.iter().cloned(), criterion)
    }

    /// Look up a named task stored in the model.
    pub fn named(model: &DomainModel, task: &str) -> Result<Self, TaskError> {
        let source = model.tasks().get(task).ok_or_else(|| TaskError::UnknownTask(task.to_string()))?;
        Self::from_source(model, source)
    }

    pub fn to_source(&self) -> TaskSource {
        TaskSource {
            name: self.name.clone(),
            inputs: self
                .inputs
                .iter()
                .filter_map(|(s, i)| i.as_const().map(|v| (s.clone(), v.clone())))
                .collect(),
            outputs: self.outputs.clone(),
            criterion: self.criterion.to_source(),
        }
    }

    /// Same task with another criterion.
    pub fn with_criterion(&self, criterion: Criterion) -> Self {
        TaskSpec { criterion, ..self.clone() }
    }

    /// Σ¹ symbols the task talks about: inputs and outputs.
    pub fn scope(&self) -> BTreeSet<Name> {
        self.inputs.keys().chain(&self.outputs).cloned().collect()
    }

    /// The candidate holding only the inputs.
    pub fn base_candidate(&self) -> Candidate {
        Candidate::from_bindings(self.inputs.clone())
    }

    /// Canonical text used for hashing and display.
    pub fn describe(&self) -> String {
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|(s, i)| match i {
                Interp::Const(v) => format!("{s}={v}"),
                other => format!("{s}={other:?}"),
            })
            .collect();
        let outputs: Vec<&str> = self.outputs.iter().map(|o| o.as_ref()).collect();
        format!(
            "task {} inputs [{}] outputs [{}] criterion {}",
            self.name,
            inputs.join(", "),
            outputs.join(", "),
            self.criterion.describe()
        )
    }
}
