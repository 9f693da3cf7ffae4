//! Local JSON-over-HTTP service.
//!
//! Reads work on an immutable model snapshot taken at the start of the
//! request. Model swaps go through a single slot: a swap that finds the
//! slot busy, or finds the model changed under it, answers 409.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use knowbase::knowhow::{add_facts, compile_knowhow, KnowHowBinding, KnowHowTable};
use knowbase::semantics::OracleConfig;
use knowbase::solver::{solve, SolveConfig};
use knowbase::validation::{validate_consistency, validate_model, Code, Diagnostic};
use knowbase::value::name;
use knowbase::workspace::{Workspace, WorkspaceError};

use crate::api::{self, SolveRequest, SCHEMA_VERSION};

pub struct AppState {
    workspace: RwLock<Workspace>,
    swap: tokio::sync::Mutex<()>,
    oracle: OracleConfig,
}

impl AppState {
    pub fn new(workspace: Workspace, oracle: OracleConfig) -> Arc<Self> {
        Arc::new(AppState { workspace: RwLock::new(workspace), swap: tokio::sync::Mutex::new(()), oracle })
    }

    fn snapshot(&self) -> Arc<knowbase::model::DomainModel> {
        self.workspace.read().expect("workspace lock").model()
    }

    pub fn snapshot_hash(&self) -> String {
        self.snapshot().hash().to_string()
    }

    /// Take the swap slot; model updates answer 409 until the guard drops.
    pub async fn hold_swap_slot(&self) -> tokio::sync::MutexGuard<'_, ()> {
        self.swap.lock().await
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/model", get(get_model))
        .route("/solve", post(post_solve))
        .route("/explanations/{id}", get(get_explanation))
        .route("/knowhow", post(post_knowhow))
        .route("/validate", post(post_validate))
        .route("/session", get(get_session))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

fn failure(status: StatusCode, error: impl ToString, diagnostics: Vec<Diagnostic>) -> Response {
    let body = json!({
        "schemaVersion": SCHEMA_VERSION,
        "error": error.to_string(),
        "diagnostics": diagnostics,
    });
    (status, Json(body)).into_response()
}

fn malformed(e: impl ToString) -> Response {
    let d = Diagnostic::new(Code::Type, "request", e.to_string(), None);
    failure(StatusCode::BAD_REQUEST, "malformed request", vec![d])
}

// Responses are built once per request; boxing buys nothing.
#[allow(clippy::result_large_err)]
fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, Response> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(malformed)
}

async fn get_model(State(state): State<Arc<AppState>>) -> Response {
    Json(api::model_summary(&state.snapshot())).into_response()
}

async fn post_solve(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: SolveRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(resp) => return resp,
    };
    let model = state.snapshot();
    let task = match api::build_task(&model, &req) {
        Ok(t) => t,
        Err(d) => return failure(StatusCode::BAD_REQUEST, "invalid task", d),
    };
    let solved = {
        let (model, task) = (Arc::clone(&model), task.clone());
        tokio::task::spawn_blocking(move || solve(&model, &task, &SolveConfig::default())).await
    };
    let result = match solved {
        Ok(r) => r,
        Err(e) => return failure(StatusCode::INTERNAL_SERVER_ERROR, e, Vec::new()),
    };
    if let Err(e) = &result {
        if api::is_request_error(e) {
            return failure(StatusCode::BAD_REQUEST, "invalid task", vec![api::solve_diagnostic(&task, e)]);
        }
    }
    if let Ok(out) = &result {
        state.workspace.write().expect("workspace lock").record(model.hash(), out);
    }
    Json(api::solve_response(&model, &task, &result)).into_response()
}

async fn get_explanation(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    let ws = state.workspace.read().expect("workspace lock");
    match ws.explanation(&id) {
        Ok(e) => Json(json!({ "schemaVersion": SCHEMA_VERSION, "explanation": e })).into_response(),
        Err(e) => failure(StatusCode::NOT_FOUND, e, Vec::new()),
    }
}

/// Body of `POST /knowhow` when sent as JSON; a plain-text body is the
/// table document itself.
#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct KnowHowRequest {
    table: String,
    #[serde(default)]
    class: Option<String>,
    #[serde(default)]
    bind: std::collections::BTreeMap<String, String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct KnowHowResponse {
    schema_version: u32,
    model_hash: String,
    delta: knowbase::knowhow::DeltaSummary,
    diagnostics: Vec<Diagnostic>,
}

async fn post_knowhow(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let Ok(text) = std::str::from_utf8(&body) else { return malformed("body is not UTF-8") };
    let req = if text.trim_start().starts_with('{') {
        match serde_json::from_str::<KnowHowRequest>(text) {
            Ok(r) => r,
            Err(e) => return malformed(e),
        }
    } else {
        KnowHowRequest { table: text.to_string(), ..KnowHowRequest::default() }
    };
    let mut table = match KnowHowTable::parse(&req.table) {
        Ok(t) => t,
        Err(e) => return malformed(e),
    };
    if let Some(c) = req.class {
        table.class = Some(name(&c));
    }
    table.bind.extend(req.bind.iter().map(|(k, v)| (name(k), name(v))));
    let Some(class) = table.class.clone() else {
        return malformed("the table names no class; add a `class:` header or a `class` field");
    };

    let Ok(_slot) = state.swap.try_lock() else {
        return failure(StatusCode::CONFLICT, "another model update is in progress", Vec::new());
    };
    let model = state.snapshot();
    let id = table.id.to_string();
    let prepared = compile_knowhow(&model, &table, &KnowHowBinding::declared(&table), &class)
        .and_then(|delta| add_facts(&model, &delta).map(|next| (delta, next)))
        .map_err(WorkspaceError::from);
    let (delta, next) = match prepared {
        Ok(p) => p,
        Err(e) => return failure(StatusCode::UNPROCESSABLE_ENTITY, &e, api::knowhow_diagnostics(&id, &e)),
    };
    let warnings = validate_model(next.draft());
    let hash = next.hash().to_string();
    let swapped = state.workspace.write().expect("workspace lock").swap_model(model.hash(), next, Some(table));
    match swapped {
        Ok(()) => Json(KnowHowResponse {
            schema_version: SCHEMA_VERSION,
            model_hash: hash,
            delta: delta.summary(),
            diagnostics: warnings,
        })
        .into_response(),
        Err(WorkspaceError::Stale) => failure(StatusCode::CONFLICT, WorkspaceError::Stale, Vec::new()),
        Err(e) => failure(StatusCode::UNPROCESSABLE_ENTITY, &e, api::knowhow_diagnostics(&id, &e)),
    }
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ValidateRequest {
    #[serde(default)]
    probe: Option<SolveRequest>,
}

async fn post_validate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: ValidateRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(resp) => return resp,
    };
    let model = state.snapshot();
    let mut diagnostics = validate_model(model.draft());
    let probe = match &req.probe {
        Some(p) => match api::build_task(&model, p) {
            Ok(t) => Some(t),
            Err(d) => return failure(StatusCode::BAD_REQUEST, "invalid probe", d),
        },
        None => None,
    };
    let oracle = state.oracle;
    let checked = {
        let model = Arc::clone(&model);
        tokio::task::spawn_blocking(move || validate_consistency(&model, probe.as_ref(), &oracle)).await
    };
    match checked {
        Ok(Ok(d)) => diagnostics.extend(d),
        Ok(Err(e)) => return failure(StatusCode::UNPROCESSABLE_ENTITY, e, Vec::new()),
        Err(e) => return failure(StatusCode::INTERNAL_SERVER_ERROR, e, Vec::new()),
    }
    knowbase::validation::sort_diagnostics(&mut diagnostics);
    Json(json!({
        "schemaVersion": SCHEMA_VERSION,
        "modelHash": model.hash(),
        "diagnostics": diagnostics,
    }))
    .into_response()
}

async fn get_session(State(state): State<Arc<AppState>>) -> Response {
    let ws = state.workspace.read().expect("workspace lock");
    Json(json!({ "schemaVersion": SCHEMA_VERSION, "entries": ws.session() })).into_response()
}
