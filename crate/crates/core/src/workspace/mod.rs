//! Persistence, sub-model extraction and the shared session store.

mod document;
mod session;
mod submodel;

pub use document::{parse_document, save_draft, DocumentError};
pub use session::solution_set_id;
pub use session::{SessionEntry, Workspace, WorkspaceError};
pub use submodel::{extract_submodel, extract_submodel_excluding, SubmodelError};

use thiserror::Error;

use crate::model::{assemble, audit_draft, DomainModel, ModelDraft, ModelError};

/// A model defect pinned to a place in the model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedError {
    pub line: usize,
    pub col: usize,
    pub location: String,
    pub error: ModelError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{line}:{col}: parse error: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{}", render_located(.0))]
    Invalid(Vec<LocatedError>),
}

fn render_located(errors: &[LocatedError]) -> String {
    let lines: Vec<String> = errors
        .iter()
        .map(|e| {
            if e.line == 0 {
                format!("{}: {}", e.location, e.error)
            } else {
                format!("{}:{}: {}: {}", e.line, e.col, e.location, e.error)
            }
        })
        .collect();
    lines.join("\n")
}

impl LoadError {
    /// Position of the first reported problem, when known.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            LoadError::Parse { line, col, .. } => Some((*line, *col)),
            LoadError::Invalid(v) => v.first().filter(|e| e.line > 0).map(|e| (e.line, e.col)),
        }
    }
}

impl From<DocumentError> for LoadError {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Parse { line, col, message } => LoadError::Parse { line, col, message },
            DocumentError::Model { line, col, error } => {
                LoadError::Invalid(vec![LocatedError { line, col, location: "declaration".into(), error }])
            }
        }
    }
}

/// Canonical model file text.
pub fn save_model(model: &DomainModel) -> String {
    save_draft(model.draft())
}

/// Assemble a draft, reporting every audit finding with its file position.
pub fn assemble_located(draft: ModelDraft) -> Result<DomainModel, LoadError> {
    let issues = audit_draft(&draft);
    if !issues.is_empty() {
        let located = issues
            .into_iter()
            .map(|i| {
                let (line, col) = i
                    .location
                    .strip_prefix("formula ")
                    .and_then(|n| n.parse::<usize>().ok())
                    .and_then(|n| draft.formulas.get(n.checked_sub(1)?))
                    .map(|f| (f.line, f.col))
                    .unwrap_or((0, 0));
                LocatedError { line, col, location: i.location, error: i.error }
            })
            .collect();
        return Err(LoadError::Invalid(located));
    }
    assemble(draft).map_err(|error| LoadError::Invalid(vec![LocatedError { line: 0, col: 0, location: "model".into(), error }]))
}

/// Parse and assemble a model file.
pub fn load_model(text: &str) -> Result<DomainModel, LoadError> {
    assemble_located(parse_document(text)?)
}

/// Merge a model-file fragment (any sections) into a copy of `base`.
/// Redeclaring a scale, variable, symbol, table or task is a clash.
pub fn extend_draft(base: &ModelDraft, fragment: &str) -> Result<ModelDraft, LoadError> {
    let extra = parse_document(fragment)?;
    let clash = |n: &crate::value::Name| {
        LoadError::Invalid(vec![LocatedError {
            line: 0,
            col: 0,
            location: "fragment".into(),
            error: ModelError::NameClash(n.clone()),
        }])
    };
    let mut draft = base.clone();
    for s in extra.scales.iter() {
        if draft.scales.contains(s.name()) {
            return Err(clash(s.name()));
        }
        draft.scales.insert(s.clone()).map_err(|error| {
            LoadError::Invalid(vec![LocatedError { line: 0, col: 0, location: "fragment".into(), error }])
        })?;
    }
    for (n, v) in extra.variables {
        if draft.variables.contains_key(&n) || draft.signature.get(&n).is_some() {
            return Err(clash(&n));
        }
        draft.variables.insert(n, v);
    }
    for d in extra.signature.symbols() {
        if draft.signature.get(&d.name).is_some() || draft.variables.contains_key(&d.name) {
            return Err(clash(&d.name));
        }
        draft.order = draft.order.max(d.layer);
        draft.signature.insert_unchecked(d.clone());
    }
    draft.facts.extend(extra.facts);
    draft.formulas.extend(extra.formulas);
    for (n, s) in extra.sources {
        if draft.sources.insert(n.clone(), s).is_some() {
            return Err(clash(&n));
        }
    }
    for (n, t) in extra.tasks {
        if draft.tasks.insert(n.clone(), t).is_some() {
            return Err(clash(&n));
        }
    }
    Ok(draft)
}
