//! JSON shapes shared by the service and the command line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use knowbase::knowhow::KnowHowError;
use knowbase::model::{CriterionSource, DomainModel, Interp, ModelError, ScaleKind, SymbolKind, TaskSource};
use knowbase::solver::{Criterion, SolveError, SolveOutcome, TaskError, TaskSpec};
use knowbase::validation::{Code, Diagnostic};
use knowbase::value::{name, parse_number, Value};
use knowbase::workspace::{solution_set_id, WorkspaceError};

/// Bumped on any incompatible change to a response body.
pub const SCHEMA_VERSION: u32 = 1;

pub fn value_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Num(n) if n.is_integer() => serde_json::Value::from(*n.numer()),
        other => serde_json::Value::String(other.to_string()),
    }
}

/// Numbers (JSON or textual, `a/b` included) become numbers, other strings
/// identifiers.
pub fn value_from_json(v: &serde_json::Value) -> Option<Value> {
    let text = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.trim().to_string(),
        _ => return None,
    };
    if let Some((a, b)) = text.split_once('/') {
        let (a, b) = (parse_number(a.trim())?, parse_number(b.trim())?);
        return (b != 0.into()).then(|| Value::Num(a / b));
    }
    Some(match parse_number(&text) {
        Some(n) => Value::Num(n),
        None if !text.is_empty() => Value::Enum(name(&text)),
        None => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CriterionJson {
    None,
    Maximize { term: String },
    Minimize { term: String },
    Predicate { formula: String },
}

impl From<&CriterionSource> for CriterionJson {
    fn from(c: &CriterionSource) -> Self {
        match c {
            CriterionSource::None => CriterionJson::None,
            CriterionSource::Maximize(t) => CriterionJson::Maximize { term: t.clone() },
            CriterionSource::Minimize(t) => CriterionJson::Minimize { term: t.clone() },
            CriterionSource::Predicate(f) => CriterionJson::Predicate { formula: f.clone() },
        }
    }
}

impl From<CriterionJson> for CriterionSource {
    fn from(c: CriterionJson) -> Self {
        match c {
            CriterionJson::None => CriterionSource::None,
            CriterionJson::Maximize { term } => CriterionSource::Maximize(term),
            CriterionJson::Minimize { term } => CriterionSource::Minimize(term),
            CriterionJson::Predicate { formula } => CriterionSource::Predicate(formula),
        }
    }
}

/// `none`, `maximize <term>`, `minimize <term>` or `predicate <formula>`;
/// a colon may stand for the space.
pub fn parse_criterion(text: &str) -> Option<CriterionSource> {
    let text = text.trim();
    let (kw, rest) = match text.find([' ', ':']) {
        Some(i) => (&text[..i], text[i + 1..].trim()),
        None => (text, ""),
    };
    match (kw, rest.is_empty()) {
        ("none", true) => Some(CriterionSource::None),
        ("maximize", false) => Some(CriterionSource::Maximize(rest.into())),
        ("minimize", false) => Some(CriterionSource::Minimize(rest.into())),
        ("predicate", false) => Some(CriterionSource::Predicate(rest.into())),
        _ => None,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaleSummary {
    pub name: String,
    pub kind: &'static str,
    pub values: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnknownSummary {
    pub name: String,
    pub kind: &'static str,
    pub carrier: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskSummary {
    pub name: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub criterion: CriterionJson,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableSummary {
    pub id: String,
    pub title: String,
    pub usage: String,
    pub symbols: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelSummary {
    pub schema_version: u32,
    pub model_hash: String,
    pub order: u8,
    pub scales: Vec<ScaleSummary>,
    pub unknowns: Vec<UnknownSummary>,
    /// Criterion kinds a solve request may use.
    pub criteria: Vec<&'static str>,
    /// Numeric unknowns, usable as optimization terms.
    pub objectives: Vec<String>,
    pub tasks: Vec<TaskSummary>,
    pub tables: Vec<TableSummary>,
}

fn task_summary(t: &TaskSource) -> TaskSummary {
    TaskSummary {
        name: t.name.to_string(),
        inputs: t.inputs.iter().map(|(k, v)| (k.to_string(), value_to_json(v))).collect(),
        outputs: t.outputs.iter().map(ToString::to_string).collect(),
        criterion: (&t.criterion).into(),
    }
}

pub fn model_summary(model: &DomainModel) -> ModelSummary {
    let scales = model
        .scales()
        .iter()
        .map(|s| ScaleSummary {
            name: s.name().to_string(),
            kind: match s.kind() {
                ScaleKind::Enumerated(_) => "enum",
                ScaleKind::Integer { .. } => "int",
                ScaleKind::Decimal { .. } => "dec",
            },
            values: s.values().iter().map(value_to_json).collect(),
            unit: s.unit().map(str::to_string),
        })
        .collect();
    let unknowns = model
        .sigma1()
        .map(|d| UnknownSummary {
            name: d.name.to_string(),
            kind: d.kind.keyword(),
            carrier: d.describe(),
        })
        .collect();
    let objectives = model
        .sigma1()
        .filter(|d| d.kind == SymbolKind::Const)
        .filter(|d| {
            matches!(d.result.as_ref(), Some(knowbase::model::CarrierRef::Scale(s))
                if model.scales().get(s).is_some_and(|s| s.is_numeric()))
        })
        .map(|d| d.name.to_string())
        .collect();
    let tables = model
        .sources()
        .values()
        .map(|s| TableSummary {
            id: s.id.to_string(),
            title: s.title.clone(),
            usage: s.usage.clone(),
            symbols: s.symbols.iter().map(ToString::to_string).collect(),
        })
        .collect();
    ModelSummary {
        schema_version: SCHEMA_VERSION,
        model_hash: model.hash().to_string(),
        order: model.order(),
        scales,
        unknowns,
        criteria: vec!["none", "maximize", "minimize", "predicate"],
        objectives,
        tasks: model.tasks().values().map(task_summary).collect(),
        tables,
    }
}

/// Body of `POST /solve`. A stored `task` supplies defaults for the fields
/// left out.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolveRequest {
    #[serde(default)]
    pub task: Option<String>,
    #[serde(default)]
    pub inputs: Option<BTreeMap<String, serde_json::Value>>,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
    #[serde(default)]
    pub criterion: Option<CriterionJson>,
}

fn diag(code: Code, location: impl Into<String>, message: impl ToString) -> Diagnostic {
    Diagnostic::new(code, location, message.to_string(), None)
}

pub fn task_diagnostic(e: &TaskError) -> Diagnostic {
    match e {
        TaskError::UnknownTask(t) => diag(Code::Undeclared, format!("task {t}"), e),
        TaskError::UnknownSymbol(s) => diag(Code::Undeclared, format!("symbol {s}"), e),
        TaskError::BadInputValue { symbol, value } => Diagnostic::new(
            Code::Scale,
            format!("input {symbol}"),
            e.to_string(),
            Some(format!("{symbol} = {value}")),
        ),
        TaskError::OutputNotUnknown(s)
        | TaskError::OutputNotConstant(s)
        | TaskError::InputLevel(s)
        | TaskError::InputOutputOverlap(s) => diag(Code::Type, format!("symbol {s}"), e),
        TaskError::NoOutputs | TaskError::Criterion(_) => diag(Code::Type, "task", e),
    }
}

/// Resolve a request against a model. Errors are request defects.
pub fn build_task(model: &DomainModel, req: &SolveRequest) -> Result<TaskSpec, Vec<Diagnostic>> {
    let base = match &req.task {
        Some(t) => Some(TaskSpec::named(model, t).map_err(|e| vec![task_diagnostic(&e)])?.to_source()),
        None => None,
    };
    let mut inputs: Vec<(String, Value)> = base
        .as_ref()
        .map(|b| b.inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
        .unwrap_or_default();
    if let Some(given) = &req.inputs {
        let mut bad = Vec::new();
        inputs.retain(|(k, _)| !given.contains_key(k));
        for (k, v) in given {
            match value_from_json(v) {
                Some(v) => inputs.push((k.clone(), v)),
                None => bad.push(diag(Code::Type, format!("input {k}"), format!("`{v}` is not a scale value"))),
            }
        }
        if !bad.is_empty() {
            return Err(bad);
        }
    }
    let outputs: Vec<String> = match (&req.outputs, &base) {
        (Some(o), _) => o.clone(),
        (None, Some(b)) => b.outputs.iter().map(ToString::to_string).collect(),
        (None, None) => Vec::new(),
    };
    let criterion: CriterionSource = match (&req.criterion, &base) {
        (Some(c), _) => c.clone().into(),
        (None, Some(b)) => b.criterion.clone(),
        (None, None) => CriterionSource::None,
    };
    let criterion = Criterion::parse(model, &criterion).map_err(|e| vec![task_diagnostic(&e)])?;
    let inputs: BTreeMap<_, _> = inputs.into_iter().map(|(k, v)| (name(&k), Interp::Const(v))).collect();
    let label = req.task.as_deref().unwrap_or("adhoc");
    TaskSpec::new(model, label, inputs, outputs.iter().map(|o| name(o)), criterion).map_err(|e| vec![task_diagnostic(&e)])
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionJson {
    pub id: String,
    pub values: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResponse {
    pub schema_version: u32,
    pub model_hash: String,
    pub task: String,
    pub solution_set_id: Option<String>,
    pub solutions: Vec<SolutionJson>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn solve_response(model: &DomainModel, task: &TaskSpec, result: &Result<SolveOutcome, SolveError>) -> SolveResponse {
    let mut resp = SolveResponse {
        schema_version: SCHEMA_VERSION,
        model_hash: model.hash().to_string(),
        task: task.name.to_string(),
        solution_set_id: None,
        solutions: Vec::new(),
        diagnostics: Vec::new(),
    };
    match result {
        Ok(out) => {
            resp.solution_set_id = Some(solution_set_id(out));
            resp.solutions = out
                .solutions
                .iter()
                .zip(&out.set.solutions)
                .map(|(s, sol)| SolutionJson {
                    id: s.id.clone(),
                    values: sol.values.iter().map(|(k, v)| (k.to_string(), value_to_json(v))).collect(),
                })
                .collect();
        }
        Err(e) => resp.diagnostics.push(solve_diagnostic(task, e)),
    }
    resp
}

pub fn solve_diagnostic(task: &TaskSpec, e: &SolveError) -> Diagnostic {
    let at = format!("task {}", task.name);
    match e {
        SolveError::Task(t) => task_diagnostic(t),
        SolveError::Criterion(_) => diag(Code::Type, at, e),
        SolveError::Conflict { .. } => diag(Code::Inconsistent, at, e),
        _ => diag(Code::NoSolution, at, e),
    }
}

/// Whether a failed solve is the request's fault rather than the model's.
pub fn is_request_error(e: &SolveError) -> bool {
    matches!(e, SolveError::Task(_) | SolveError::Criterion(_))
}

pub fn knowhow_diagnostics(table: &str, e: &WorkspaceError) -> Vec<Diagnostic> {
    let at = format!("table {table}");
    match e {
        WorkspaceError::Rejected(d) => d.clone(),
        WorkspaceError::KnowHow(k) => vec![match k {
            KnowHowError::ScaleMismatch(_) => diag(Code::Scale, at, k),
            KnowHowError::Model(ModelError::PertinencyFailed { fact, .. }) => {
                Diagnostic::new(Code::Scale, at, k.to_string(), Some(fact.clone()))
            }
            KnowHowError::UnboundResultColumn(_) | KnowHowError::UnboundConditionColumn { .. } => {
                diag(Code::Undeclared, at, k)
            }
            _ => diag(Code::Type, at, k),
        }],
        other => vec![diag(Code::Type, at, other)],
    }
}
