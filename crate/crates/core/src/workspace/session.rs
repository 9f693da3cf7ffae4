//! The store the tools share: the current model, the session log, the
//! know-how tables and the feedback received.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{load_model, save_model, LoadError};
use crate::knowhow::{
    add_facts, compile_knowhow, ingest_feedback, DecisionRecord, KnowHowBinding, KnowHowError, KnowHowTable, ModelDelta,
    TableError,
};
use crate::model::DomainModel;
use crate::semantics::{Solution, SolutionSet};
use crate::solver::{solve, ExplainError, Explanation, SolveConfig, SolveError, SolveOutcome, TaskSpec};
use crate::validation::{has_errors, validate_model, Diagnostic};

#[derive(Debug, Clone, Error)]
pub enum WorkspaceError {
    #[error("model rejected: {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Rejected(Vec<Diagnostic>),
    #[error(transparent)]
    KnowHow(#[from] KnowHowError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("the model changed while this update was prepared")]
    Stale,
    #[error("table `{id}`: {error}")]
    Table { id: String, error: TableError },
}

/// One solve run, as kept in the session log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionEntry {
    pub seq: usize,
    pub task: String,
    pub model_hash: String,
    pub solution_set_id: String,
    pub solutions: Vec<Solution>,
    pub solution_ids: Vec<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Content id of a solve result: the task and its solution ids.
pub fn solution_set_id(outcome: &SolveOutcome) -> String {
    let mut h = Sha256::new();
    h.update(outcome.task.describe().as_bytes());
    for s in &outcome.solutions {
        h.update(b"\n");
        h.update(s.id.as_bytes());
    }
    hex::encode(h.finalize())[..16].to_string()
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct Workspace {
    model: Arc<DomainModel>,
    session: Vec<SessionEntry>,
    explanations: BTreeMap<String, Explanation>,
    tables: BTreeMap<crate::value::Name, KnowHowTable>,
    feedback: Vec<DecisionRecord>,
}

impl Workspace {
    /// A workspace over a model with no error-level diagnostics.
    pub fn new(model: DomainModel) -> Result<Self, WorkspaceError> {
        check(&model)?;
        Ok(Workspace {
            model: Arc::new(model),
            session: Vec::new(),
            explanations: BTreeMap::new(),
            tables: BTreeMap::new(),
            feedback: Vec::new(),
        })
    }

    /// The current model snapshot.
    pub fn model(&self) -> Arc<DomainModel> {
        Arc::clone(&self.model)
    }

    /// Swap in a new model after validation.
    pub fn replace_model(&mut self, model: DomainModel) -> Result<(), WorkspaceError> {
        check(&model)?;
        self.model = Arc::new(model);
        Ok(())
    }

    /// Swap in `next` only if the current model is still the snapshot with
    /// hash `expected`, registering the table it was compiled from.
    pub fn swap_model(
        &mut self,
        expected: &str,
        next: DomainModel,
        table: Option<KnowHowTable>,
    ) -> Result<(), WorkspaceError> {
        if self.model.hash() != expected {
            return Err(WorkspaceError::Stale);
        }
        self.replace_model(next)?;
        if let Some(t) = table {
            self.tables.insert(t.id.clone(), t);
        }
        Ok(())
    }

    pub fn solve(&mut self, task: &TaskSpec, config: &SolveConfig) -> Result<SolveOutcome, WorkspaceError> {
        let outcome = solve(&self.model, task, config)?;
        let hash = self.model.hash().to_owned();
        self.record(&hash, &outcome);
        Ok(outcome)
    }

    /// Log a solve run made against some snapshot and keep its explanations.
    pub fn record(&mut self, model_hash: &str, outcome: &SolveOutcome) -> SessionEntry {
        for s in &outcome.solutions {
            self.explanations.insert(s.id.clone(), s.explanation.clone());
        }
        let entry = SessionEntry {
            seq: self.session.len() + 1,
            task: outcome.task.describe(),
            model_hash: model_hash.to_string(),
            solution_set_id: solution_set_id(outcome),
            solutions: outcome.set.solutions.clone(),
            solution_ids: outcome.solutions.iter().map(|s| s.id.clone()).collect(),
            timestamp: now(),
        };
        self.session.push(entry.clone());
        entry
    }

    pub fn explanation(&self, solution_id: &str) -> Result<&Explanation, ExplainError> {
        self.explanations.get(solution_id).ok_or_else(|| ExplainError::TraceMissing(solution_id.to_string()))
    }

    pub fn session(&self) -> &[SessionEntry] {
        &self.session
    }

    pub fn tables(&self) -> &BTreeMap<crate::value::Name, KnowHowTable> {
        &self.tables
    }

    pub fn feedback(&self) -> &[DecisionRecord] {
        &self.feedback
    }

    /// Compile a table into the current model and swap the result in.
    pub fn add_knowhow(
        &mut self,
        table: KnowHowTable,
        binding: &KnowHowBinding,
        class: &str,
    ) -> Result<ModelDelta, WorkspaceError> {
        let delta = compile_knowhow(&self.model, &table, binding, class)?;
        self.apply(&delta)?;
        self.tables.insert(table.id.clone(), table);
        Ok(delta)
    }

    pub fn add_feedback(&mut self, record: DecisionRecord) -> Result<ModelDelta, WorkspaceError> {
        let delta = ingest_feedback(&self.model, &record)?;
        self.apply(&delta)?;
        self.feedback.push(record);
        Ok(delta)
    }

    fn apply(&mut self, delta: &ModelDelta) -> Result<(), WorkspaceError> {
        let next = add_facts(&self.model, delta)?;
        self.replace_model(next)
    }

    /// Deterministic text of the persistent state: the model followed by
    /// the know-how tables it was built from.
    pub fn export(&self) -> String {
        let mut out = save_model(&self.model);
        for t in self.tables.values() {
            out.push_str("\n# table ");
            out.push_str(&t.id);
            out.push('\n');
            for line in t.to_text().lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }

    /// Inverse of [`Workspace::export`]: the model plus the tables kept in
    /// `# table` comment blocks. The tables are registered, not recompiled.
    pub fn import(text: &str) -> Result<Self, WorkspaceError> {
        let mut ws = Workspace::new(load_model(text)?)?;
        let mut blocks: Vec<(String, String)> = Vec::new();
        let mut current: Option<(String, String)> = None;
        for line in text.lines() {
            if let Some(id) = line.strip_prefix("# table ") {
                blocks.extend(current.take());
                current = Some((id.trim().to_string(), String::new()));
            } else if let Some((_, body)) = current.as_mut() {
                match line.strip_prefix("# ").or_else(|| (line == "#").then_some("")) {
                    Some(l) => {
                        body.push_str(l);
                        body.push('\n');
                    }
                    None => blocks.extend(current.take()),
                }
            }
        }
        blocks.extend(current);
        for (id, body) in blocks {
            let table = KnowHowTable::parse(&body).map_err(|error| WorkspaceError::Table { id, error })?;
            ws.tables.insert(table.id.clone(), table);
        }
        Ok(ws)
    }

    /// Solutions of the latest run of a task, if any.
    pub fn last_solutions(&self, task_description: &str) -> Option<SolutionSet> {
        let e = self.session.iter().rev().find(|e| e.task == task_description)?;
        let outputs: Vec<_> = e.solutions.first().map(|s| s.values.keys().cloned().collect()).unwrap_or_default();
        Some(SolutionSet::new(&outputs, e.solutions.iter().cloned()))
    }
}

fn check(model: &DomainModel) -> Result<(), WorkspaceError> {
    let diagnostics = validate_model(model.draft());
    if has_errors(&diagnostics) {
        return Err(WorkspaceError::Rejected(diagnostics));
    }
    Ok(())
}
